#include <iostream>

#include <CLI11.hpp>

#include "crreduce/cli/commands.hpp"

namespace {

using namespace crreduce::cli;

void add_tolerance_flags(CLI::App* cmd, ToleranceOverrides& tol) {
  cmd->add_option("--tol-rank", tol.tau_rank, "Relative rank threshold");
  cmd->add_option("--tol-eig", tol.tau_eig, "Relative eigenvalue clustering radius");
  cmd->add_option("--tol-verify", tol.tau_verify, "Residual bound for postcondition checks");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Induced partially integrable structures for almost CR and almost Lagrangian data"};
  app.require_subcommand(1);

  ReduceOptions reduce_opt;
  auto* reduce = app.add_subcommand("reduce", "Compute the induced structure K and write a report");
  reduce->add_option("input", reduce_opt.input, "Instance file")->required();
  reduce->add_option("--seed", reduce_opt.seed, "Seed for the free choices in e");
  reduce->add_option("--output", reduce_opt.output, "Report file");
  add_tolerance_flags(reduce, reduce_opt.tol);

  ClassifyOptions classify_opt;
  auto* classify = app.add_subcommand("classify", "Classify an instance; decompose mixed ones");
  classify->add_option("input", classify_opt.input, "Instance file")->required();
  classify->add_option("--seed", classify_opt.seed, "Seed for the block reductions");
  classify->add_option("--output", classify_opt.output, "Report file");
  add_tolerance_flags(classify, classify_opt.tol);

  VerifyOptions verify_opt;
  std::string seeds = "0..9";
  auto* verify = app.add_subcommand("verify", "Check uniqueness and the invariant suite");
  verify->add_option("input", verify_opt.input, "Instance file")->required();
  verify->add_option("--seeds", seeds, "Seeds, e.g. 0..9 or 1,4,7")->capture_default_str();
  verify->add_option("--output", verify_opt.output, "Report file");
  verify->add_flag("--debug-corrupt-k", verify_opt.debug_corrupt_k, "Perturb K before checking (negative control)");
  add_tolerance_flags(verify, verify_opt.tol);

  GenerateOptions gen_opt;
  auto* generate = app.add_subcommand("generate", "Write a fixture or random instance");
  generate->add_option("--mode", gen_opt.mode, "cr or lagrangian")->capture_default_str();
  generate->add_option("--n", gen_opt.n, "Half the real dimension")->capture_default_str();
  generate->add_option("--signature", gen_opt.signature, "Complex signature p,q of g (CR)");
  generate->add_option("--epsilon", gen_opt.epsilon, "Perturbation size")->capture_default_str();
  generate->add_option("--seed", gen_opt.seed, "Seed")->capture_default_str();
  generate->add_option("--kind", gen_opt.kind, "integrable, generic or degenerate")->capture_default_str();
  generate->add_option("--output", gen_opt.output, "Instance file")->required();
  generate->add_option("--family-output", gen_opt.family_output, "Family file");
  bool standard_basis = false;
  generate->add_flag("--standard-basis", standard_basis, "Keep the standard coordinates");
  add_tolerance_flags(generate, gen_opt.tol);

  PathOptions path_opt;
  auto* path = app.add_subcommand("path", "Sample K and the classification along a path");
  path->add_option("inputs", path_opt.inputs, "Instance files in path order");
  path->add_option("--family", path_opt.family, "Family file (base, direction, structure)");
  path->add_option("--t-start", path_opt.t_start, "First parameter value")->capture_default_str();
  path->add_option("--t-end", path_opt.t_end, "Last parameter value")->capture_default_str();
  path->add_option("--samples", path_opt.samples, "Number of grid points")->capture_default_str();
  path->add_option("--seed", path_opt.seed, "Seed used at every sample");
  path->add_option("--output", path_opt.output, "Report file");
  add_tolerance_flags(path, path_opt.tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (*reduce) return cmd_reduce(reduce_opt, std::cout, std::cerr);
    if (*classify) return cmd_classify(classify_opt, std::cout, std::cerr);
    if (*verify) {
      verify_opt.seeds = parse_seed_list(seeds);
      return cmd_verify(verify_opt, std::cout, std::cerr);
    }
    if (*generate) {
      gen_opt.randomize_basis = !standard_basis;
      return cmd_generate(gen_opt, std::cout, std::cerr);
    }
    if (*path) return cmd_path(path_opt, std::cout, std::cerr);
  } catch (const crreduce::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == crreduce::ErrorKind::InvalidInput ? kInputError : kPropertyFailure;
  }
  return kInputError;
}
