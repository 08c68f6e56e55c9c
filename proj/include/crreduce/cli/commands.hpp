#pragma once

// Subcommands of the crreduce tool. Each returns the process exit code:
// 0 pass, 1 input error, 2 not generic, 3 property failure, 4 generation
// failure.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "crreduce/cli/io.hpp"

namespace crreduce::cli {

enum ExitCode : int {
  kPass = 0,
  kInputError = 1,
  kNotGeneric = 2,
  kPropertyFailure = 3,
  kGenerationFailure = 4,
};

struct ReduceOptions {
  std::string input;
  std::uint64_t seed = 0;
  std::string output;
  ToleranceOverrides tol;
};

struct ClassifyOptions {
  std::string input;
  std::uint64_t seed = 0;
  std::string output;
  ToleranceOverrides tol;
};

struct VerifyOptions {
  std::string input;
  std::vector<std::uint64_t> seeds;
  std::string output;
  /// Negative control: perturbs K before the invariant checks.
  bool debug_corrupt_k = false;
  ToleranceOverrides tol;
};

struct GenerateOptions {
  std::string mode = "cr";
  int n = 1;
  /// "p,q"; empty means (n, 0).
  std::string signature;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string kind = "integrable";
  std::string output;
  /// Optional family file: the epsilon family for integrable/generic, the t
  /// family (with t_star) for degenerate.
  std::string family_output;
  bool randomize_basis = true;
  ToleranceOverrides tol;
};

struct PathOptions {
  std::vector<std::string> inputs;
  std::string family;
  double t_start = 0.0;
  double t_end = 1.0;
  int samples = 16;
  std::uint64_t seed = 0;
  std::string output;
  ToleranceOverrides tol;
};

int cmd_reduce(const ReduceOptions& opt, std::ostream& out, std::ostream& err);
int cmd_classify(const ClassifyOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_path(const PathOptions& opt, std::ostream& out, std::ostream& err);

/// "0..9" or "0,3,7" (ranges and lists may be mixed).
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace crreduce::cli
