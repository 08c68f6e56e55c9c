#pragma once

// JSON documents read and written by the command-line tool. Parsing is
// strict: unknown fields, wrong shapes and non-finite numbers are rejected
// with InvalidInput.

#include <optional>
#include <string>

#include <json.hpp>

#include "crreduce/generator.hpp"
#include "crreduce/structures.hpp"

namespace crreduce::cli {

using json = nlohmann::ordered_json;

struct ToleranceOverrides {
  std::optional<double> tau_rank;
  std::optional<double> tau_eig;
  std::optional<double> tau_verify;

  void apply_to(Tolerances& tol) const;
};

struct InstanceFile {
  Instance instance;
  ToleranceOverrides tolerances;
};

struct FamilyFile {
  Family family;
  std::optional<double> t_star;
  std::string label;
};

json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j, Index rows, Index cols, const std::string& what);
json complex_matrix_to_json(const CMat& m);
json complex_to_json(Complex z);

json instance_to_json(const Instance& inst, const ToleranceOverrides& tol = {});
InstanceFile instance_from_json(const json& j);

json family_to_json(const FamilyFile& fam);
FamilyFile family_from_json(const json& j);

json read_json(const std::string& path);
/// Writes with a trailing newline; "-" means stdout.
void write_json(const std::string& path, const json& j);

InstanceFile read_instance_file(const std::string& path);
FamilyFile read_family_file(const std::string& path);

/// Defaults, overridden by CRREDUCE_TOL="rank,eig,verify" when set.
Tolerances default_tolerances();
Tolerances parse_tolerance_triple(const std::string& text);

Mode parse_mode(const std::string& text);
const char* mode_key(Mode mode);

}  // namespace crreduce::cli
