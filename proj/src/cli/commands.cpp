#include "crreduce/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "crreduce/classify.hpp"
#include "crreduce/random.hpp"
#include "crreduce/reduction.hpp"
#include "crreduce/spectral.hpp"

namespace crreduce::cli {

namespace {

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass() const { return std::isfinite(value) && value <= bound; }
};

Tolerances resolve(const ToleranceOverrides& file, const ToleranceOverrides& flags) {
  Tolerances tol = default_tolerances();
  file.apply_to(tol);
  flags.apply_to(tol);
  tol.validate();
  return tol;
}

json tolerances_json(const Tolerances& tol) {
  return json{{"tau_rank", tol.tau_rank}, {"tau_eig", tol.tau_eig}, {"tau_verify", tol.tau_verify}};
}

json eigen_table_json(const std::vector<EigenvalueCluster>& clusters, Mode mode) {
  json rows = json::array();
  for (const auto& c : clusters) {
    const double distance = mode == Mode::CR ? std::abs(c.value.imag()) : std::abs(c.value.real());
    rows.push_back(json{{"alpha", complex_to_json(c.value)}, {"dim", c.multiplicity}, {"distance", distance}});
  }
  return rows;
}

json eigen_table_json(const std::vector<EigenRow>& table) {
  json rows = json::array();
  for (const auto& r : table) {
    rows.push_back(json{{"alpha", complex_to_json(r.alpha)}, {"dim", r.dim}, {"distance", r.distance}});
  }
  return rows;
}

json genericity_json(const GenericityReport& rep, Mode mode) {
  json j;
  j["omega_ok"] = rep.omega_ok;
  j["omega_min_sv"] = rep.omega_min_sv;
  j["nu_ok"] = rep.nu_ok;
  j["nu_min_sv"] = rep.nu_min_sv;
  j["eigenvalues"] = eigen_table_json(rep.eigenvalues, mode);
  j["min_im"] = std::isfinite(rep.min_im) ? json(rep.min_im) : json(nullptr);
  j["min_re"] = std::isfinite(rep.min_re) ? json(rep.min_re) : json(nullptr);
  j["scale"] = rep.scale;
  j["generic"] = rep.generic;
  return j;
}

json checks_json(const std::vector<Check>& checks) {
  json j = json::object();
  for (const auto& c : checks) {
    j[c.name] = json{{"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                     {"bound", c.bound},
                     {"verdict", c.pass() ? "pass" : "fail"}};
  }
  return j;
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

void print_checks(std::ostream& out, const std::vector<Check>& checks) {
  out << std::left << std::setw(32) << "property" << std::setw(14) << "value" << std::setw(14)
      << "bound" << "verdict\n";
  for (const auto& c : checks) {
    out << std::left << std::setw(32) << c.name << std::setw(14) << std::setprecision(3)
        << std::scientific << c.value << std::setw(14) << c.bound << std::defaultfloat
        << (c.pass() ? "PASS" : "FAIL") << '\n';
  }
}

// |nu(omega, K) - omega|: zero exactly when (omega, K) is partially integrable.
double integrability_residual(Mode mode, const Mat& omega, const Mat& k) {
  const Mat pulled = k.transpose() * omega * k;
  const Mat nu = mode == Mode::CR ? Mat(0.5 * (omega + pulled)) : Mat(0.5 * (omega - pulled));
  return opnorm(Mat(nu - omega));
}

const char* identity_name(Mode mode) {
  return mode == Mode::CR ? "hermitian_residual" : "anti_invariance_residual";
}

std::vector<Check> structure_checks(const Instance& inst, const Mat& k, const Tolerances& tol) {
  const double onorm = opnorm(inst.omega);
  std::vector<Check> checks;
  checks.push_back({"structure_residual", structure_residual(inst.mode, k), tol.tau_verify});
  checks.push_back({identity_name(inst.mode), hermitian_residual(inst.mode, inst.omega, k),
                    tol.tau_verify * onorm});
  if (inst.mode == Mode::Lagrangian) {
    checks.push_back({"trace_residual", std::abs(k.trace()),
                      tol.tau_verify * static_cast<double>(inst.dim())});
  }
  checks.push_back({"partial_integrability", integrability_residual(inst.mode, inst.omega, k),
                    tol.tau_verify * onorm});
  return checks;
}

std::vector<Check> reduction_checks(const Instance& inst, const ReductionResult& r,
                                    const Tolerances& tol) {
  const DerivedTriple tri = derive(inst, tol);
  const double gnorm = opnorm(tri.g);
  const double enorm = std::max(1.0, opnorm(r.e.e));
  std::vector<Check> checks = structure_checks(inst, r.K, tol);
  checks.push_back({"induced_imaginary_part", r.imag_residual, tol.tau_verify * std::max(1.0, opnorm(r.K))});
  checks.push_back({"e_realness", r.e.realness_residual, tol.tau_verify});
  checks.push_back({"e_g_orthogonality", r.e.orthogonality_residual, tol.tau_verify * gnorm * enorm * enorm});
  checks.push_back({"eigenspace_orthogonality", r.orthogonality_residual, tol.tau_verify * gnorm});
  return checks;
}

json quads_json(const std::vector<QuadSpace>& quads) {
  json rows = json::array();
  for (const auto& q : quads) {
    rows.push_back(json{{"alpha", complex_to_json(q.alpha)},
                        {"dim", q.real_basis.cols()},
                        {"signature", json::array({q.signature.p, q.signature.q})},
                        {"pure_imaginary", q.pure_imaginary}});
  }
  return rows;
}

int report_error(std::ostream& err, const Error& e) {
  err << "error: " << e.what() << '\n';
  switch (e.kind()) {
    case ErrorKind::InvalidInput: return kInputError;
    case ErrorKind::NotGeneric:
    case ErrorKind::DegenerateForm: return kNotGeneric;
    case ErrorKind::GenerationFailure: return kGenerationFailure;
    default: return kPropertyFailure;
  }
}

void emit(const std::string& output, const json& report) {
  if (!output.empty()) write_json(output, report);
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string part;
  auto number = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorKind::InvalidInput, "bad seed '" + s + "' in '" + text + "'");
    }
    return std::stoull(s);
  };
  while (std::getline(in, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(number(part));
      continue;
    }
    const auto lo = number(part.substr(0, dots)), hi = number(part.substr(dots + 2));
    if (hi < lo || hi - lo > 100000) throw Error(ErrorKind::InvalidInput, "bad seed range '" + part + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw Error(ErrorKind::InvalidInput, "empty seed list");
  return seeds;
}

int cmd_reduce(const ReduceOptions& opt, std::ostream& out, std::ostream& err) {
  InstanceFile file;
  Tolerances tol;
  try {
    file = read_instance_file(opt.input);
    tol = resolve(file.tolerances, opt.tol);
    validate(file.instance, tol);
  } catch (const Error& e) {
    return report_error(err, e);
  }
  const Instance& inst = file.instance;
  json report;
  report["label"] = inst.label;
  report["mode"] = mode_key(inst.mode);
  report["n"] = inst.n;
  report["seed"] = opt.seed;
  report["tolerances"] = tolerances_json(tol);

  try {
    const ReductionResult r = reduce(inst, opt.seed, tol);
    const auto checks = reduction_checks(inst, r, tol);
    const bool pass = all_pass(checks);
    report["genericity"] = genericity_json(r.report, inst.mode);
    report["quads"] = quads_json(r.quads);
    report["K"] = matrix_to_json(r.K);
    report["e"] = complex_matrix_to_json(r.e.e);
    report["det_e"] = complex_to_json(r.e.det);
    report["checks"] = checks_json(checks);
    report["verdict"] = pass ? "pass" : "fail";
    emit(opt.output, report);
    out << "reduce " << (inst.label.empty() ? opt.input : inst.label) << ": "
        << (pass ? "pass" : "FAIL") << '\n';
    print_checks(out, checks);
    return pass ? kPass : kPropertyFailure;
  } catch (const NotGenericError& e) {
    report["genericity"] = genericity_json(e.report(), inst.mode);
    report["verdict"] = "not_generic";
    report["error"] = e.what();
    emit(opt.output, report);
    const double margin = inst.mode == Mode::CR ? e.report().min_im : e.report().min_re;
    err << "not generic: " << (inst.mode == Mode::CR ? "min_im = " : "min_re = ") << margin
        << " (threshold " << tol.tau_eig * e.report().scale << ")\n";
    return kNotGeneric;
  } catch (const Error& e) {
    report["verdict"] = e.kind() == ErrorKind::DegenerateForm ? "not_generic" : "fail";
    report["error"] = e.what();
    report["error_kind"] = to_string(e.kind());
    try {
      emit(opt.output, report);
    } catch (const Error&) {
    }
    return report_error(err, e);
  }
}

int cmd_classify(const ClassifyOptions& opt, std::ostream& out, std::ostream& err) {
  InstanceFile file;
  Tolerances tol;
  try {
    file = read_instance_file(opt.input);
    tol = resolve(file.tolerances, opt.tol);
    validate(file.instance, tol);
  } catch (const Error& e) {
    return report_error(err, e);
  }
  const Instance& inst = file.instance;
  try {
    const Classification c = classify(inst, tol);
    json report;
    report["label"] = inst.label;
    report["mode"] = mode_key(inst.mode);
    report["n"] = inst.n;
    report["tolerances"] = tolerances_json(tol);
    report["kind"] = to_string(c.kind);
    report["bad_rank"] = c.bad_rank;
    report["eigen_table"] = eigen_table_json(c.eigen_table);
    if (!c.reason.empty()) report["reason"] = c.reason;
    out << "kind " << to_string(c.kind) << ", bad_rank " << c.bad_rank << '\n';
    if (c.kind == Kind::Mixed) {
      try {
        const MixedResult m = mixed_reduce(inst, opt.seed, tol);
        const auto& r = m.residuals;
        report["mixed"] = json{
            {"H1_dim", m.H1_basis.cols()},
            {"H2_dim", m.H2_basis.cols()},
            {"H1_basis", matrix_to_json(m.H1_basis)},
            {"H2_basis", matrix_to_json(m.H2_basis)},
            {"J1", matrix_to_json(m.J1)},
            {"sigma2", matrix_to_json(m.sigma2)},
            {"residuals",
             {{"g_orthogonality", r.g_orthogonality},
              {"omega_orthogonality", r.omega_orthogonality},
              {"j1_structure", r.j1_structure},
              {"j1_hermitian", r.j1_hermitian},
              {"sigma2_structure", r.sigma2_structure},
              {"sigma2_trace", r.sigma2_trace},
              {"sigma2_anti_invariance", r.sigma2_anti_invariance}}}};
        out << "mixed: H1 dim " << m.H1_basis.cols() << ", H2 dim " << m.H2_basis.cols() << '\n';
      } catch (const Error& e) {
        report["mixed_error"] = json{{"kind", to_string(e.kind())}, {"message", e.what()}};
        out << "mixed decomposition unavailable: " << e.what() << '\n';
      }
    }
    emit(opt.output, report);
    return kPass;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  InstanceFile file;
  Tolerances tol;
  std::vector<std::uint64_t> seeds = opt.seeds;
  if (seeds.empty()) seeds = parse_seed_list("0..9");
  try {
    file = read_instance_file(opt.input);
    tol = resolve(file.tolerances, opt.tol);
    validate(file.instance, tol);
  } catch (const Error& e) {
    return report_error(err, e);
  }
  const Instance& inst = file.instance;
  std::vector<Check> checks;
  // Reported only; never part of the verdict.
  std::vector<Check> experimental;
  try {
    const ReductionResult first = reduce(inst, seeds.front(), tol);
    Mat k = first.K;
    if (opt.debug_corrupt_k) {
      // Conjugating by a near-identity map keeps K^2 = -1 (or +1) but breaks
      // the compatibility with omega.
      Rng rng(0xbadULL);
      const Mat t = Mat::Identity(inst.dim(), inst.dim()) + 1e-3 * random_gaussian(inst.dim(), inst.dim(), rng);
      k = t * k * t.inverse();
    }
    checks = structure_checks(inst, k, tol);

    double seed_distance = 0.0;
    std::vector<Mat> ks{k};
    for (std::size_t i = 1; i < seeds.size(); ++i) ks.push_back(reduce(inst, seeds[i], tol).K);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      for (std::size_t j = i + 1; j < ks.size(); ++j) {
        seed_distance = std::max(seed_distance, opnorm(Mat(ks[i] - ks[j])));
      }
    }
    checks.push_back({"seed_independence", seed_distance, 10.0 * tol.tau_verify});

    const DerivedTriple tri = derive(inst, tol);
    const Mat f = random_stabilizer(inst.mode, inst.structure, tri.g, seeds.front() ^ 0x5eedULL);
    const InducedStructure shifted = induce_structure(f.cast<Complex>() * first.e.e, inst, tol);
    checks.push_back({"stabilizer_conjugation", opnorm(Mat(shifted.K - k)), 10.0 * tol.tau_verify});

    double idempotence = 0.0;
    try {
      const Instance again = make_instance(inst.mode, inst.omega, k);
      idempotence = opnorm(Mat(reduce(again, seeds.front(), tol).K - k));
    } catch (const Error&) {
      idempotence = std::numeric_limits<double>::infinity();
    }
    checks.push_back({"idempotence", idempotence, tol.tau_verify});

    for (double lambda : {0.5, 2.0, 10.0}) {
      std::ostringstream name;
      name << "scale_invariance_" << lambda;
      const Instance scaled = make_instance(inst.mode, lambda * inst.omega, inst.structure);
      double d = std::numeric_limits<double>::infinity();
      try {
        d = opnorm(Mat(reduce(scaled, seeds.front(), tol).K - k));
      } catch (const Error&) {
      }
      checks.push_back({name.str(), d, tol.tau_verify});
    }

    double negated = std::numeric_limits<double>::infinity();
    try {
      const Instance flipped = make_instance(inst.mode, -inst.omega, inst.structure);
      negated = opnorm(Mat(reduce(flipped, seeds.front(), tol).K - k));
    } catch (const Error&) {
    }
    experimental.push_back({"scale_invariance_-1", negated, tol.tau_verify});
  } catch (const NotGenericError& e) {
    err << "not generic: " << e.what() << '\n';
    return kNotGeneric;
  } catch (const Error& e) {
    return report_error(err, e);
  }

  print_checks(out, checks);
  out << "experimental (not gating):\n";
  print_checks(out, experimental);
  json report;
  report["label"] = inst.label;
  report["seeds"] = seeds;
  report["tolerances"] = tolerances_json(tol);
  report["debug_corrupt_k"] = opt.debug_corrupt_k;
  report["checks"] = checks_json(checks);
  report["experimental"] = checks_json(experimental);
  const bool pass = all_pass(checks);
  report["verdict"] = pass ? "pass" : "fail";
  try {
    emit(opt.output, report);
  } catch (const Error& e) {
    return report_error(err, e);
  }
  if (!pass) {
    err << "failed:";
    for (const auto& c : checks) {
      if (!c.pass()) err << ' ' << c.name;
    }
    err << '\n';
    return kPropertyFailure;
  }
  return kPass;
}

int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.output.empty()) throw Error(ErrorKind::InvalidInput, "--output is required");
    const Tolerances tol = resolve({}, opt.tol);
    GeneratorSpec spec;
    spec.mode = parse_mode(opt.mode);
    spec.n = opt.n;
    spec.p = opt.n;
    spec.q = 0;
    if (!opt.signature.empty()) {
      const auto comma = opt.signature.find(',');
      if (comma == std::string::npos) throw Error(ErrorKind::InvalidInput, "--signature must be p,q");
      try {
        std::size_t used_p = 0, used_q = 0;
        const std::string ps = opt.signature.substr(0, comma), qs = opt.signature.substr(comma + 1);
        spec.p = std::stoi(ps, &used_p);
        spec.q = std::stoi(qs, &used_q);
        if (used_p != ps.size() || used_q != qs.size()) throw std::invalid_argument("trailing");
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidInput, "--signature must be p,q");
      }
    }
    spec.epsilon = opt.epsilon;
    spec.seed = opt.seed;
    spec.randomize_basis = opt.randomize_basis;

    Instance inst;
    FamilyFile fam;
    if (opt.kind == "integrable") {
      inst = gen_partially_integrable(spec);
      if (!opt.family_output.empty()) fam.family = gen_perturbation_family(spec, tol);
    } else if (opt.kind == "generic") {
      inst = gen_generic(spec, tol);
      if (!opt.family_output.empty()) fam.family = gen_perturbation_family(spec, tol);
    } else if (opt.kind == "degenerate") {
      if (spec.mode != Mode::CR) {
        throw Error(ErrorKind::InvalidInput, "degenerate instances are generated in CR mode only");
      }
      const DegenerateInstance d = gen_degenerate(spec.n, spec.seed, tol);
      inst = d.instance;
      fam.family = d.family;
      fam.t_star = d.t_star;
      out << "t_star " << std::setprecision(17) << d.t_star << std::defaultfloat << '\n';
    } else {
      throw Error(ErrorKind::InvalidInput, "--kind must be integrable, generic or degenerate");
    }
    write_json(opt.output, instance_to_json(inst));
    if (!opt.family_output.empty()) {
      fam.label = inst.label;
      write_json(opt.family_output, family_to_json(fam));
    }
    out << "wrote " << opt.output << " (" << inst.label << ")\n";
    return kPass;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

int cmd_path(const PathOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<Instance> samples;
  std::vector<double> ts;
  std::optional<double> t_star;
  Tolerances tol;
  try {
    ToleranceOverrides file_tol;
    if (!opt.family.empty()) {
      if (!opt.inputs.empty()) throw Error(ErrorKind::InvalidInput, "give either files or --family");
      if (opt.samples < 2) throw Error(ErrorKind::InvalidInput, "--samples must be at least 2");
      const FamilyFile fam = read_family_file(opt.family);
      t_star = fam.t_star;
      for (int i = 0; i < opt.samples; ++i) {
        const double t = opt.t_start + (opt.t_end - opt.t_start) * i / (opt.samples - 1);
        ts.push_back(t);
        samples.push_back(fam.family.at(t));
      }
    } else {
      if (opt.inputs.size() < 2) throw Error(ErrorKind::InvalidInput, "path needs at least two samples");
      for (std::size_t i = 0; i < opt.inputs.size(); ++i) {
        InstanceFile f = read_instance_file(opt.inputs[i]);
        if (i == 0) file_tol = f.tolerances;
        samples.push_back(std::move(f.instance));
        ts.push_back(static_cast<double>(i));
      }
    }
    tol = resolve(file_tol, opt.tol);
    for (const auto& s : samples) validate(s, tol);
  } catch (const Error& e) {
    return report_error(err, e);
  }

  try {
    const RankProfile profile = rank_profile(samples, tol);
    json rows = json::array();
    std::vector<std::optional<Mat>> ks(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& entry = profile.entries[i];
      json row{{"index", i}, {"t", ts[i]}, {"kind", to_string(entry.kind)}, {"bad_rank", entry.bad_rank}};
      if (entry.kind == Kind::CRGeneric || entry.kind == Kind::LagrangianGeneric) {
        try {
          ks[i] = reduce(samples[i], opt.seed, tol).K;
          row["K"] = matrix_to_json(*ks[i]);
        } catch (const Error& e) {
          row["error"] = e.what();
        }
      }
      rows.push_back(std::move(row));
    }

    json steps = json::array();
    double modulus = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      if (!ks[i] || !ks[i + 1]) continue;
      const double d = opnorm(Mat(*ks[i + 1] - *ks[i]));
      modulus = std::max(modulus, d);
      steps.push_back(json{{"from", i}, {"to", i + 1}, {"distance", d}});
    }

    auto generic_kind = [](Kind k) { return k == Kind::CRGeneric || k == Kind::LagrangianGeneric; };
    json crossings = json::array();
    bool bracketed = false;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      const Kind a = profile.entries[i].kind, b = profile.entries[i + 1].kind;
      if (generic_kind(a) == generic_kind(b)) continue;
      crossings.push_back(json{{"from", i}, {"to", i + 1}, {"t_from", ts[i]}, {"t_to", ts[i + 1]},
                               {"kind_from", to_string(a)}, {"kind_to", to_string(b)}});
      if (t_star && std::min(ts[i], ts[i + 1]) <= *t_star && *t_star <= std::max(ts[i], ts[i + 1])) {
        bracketed = true;
      }
    }

    json report;
    report["samples"] = rows;
    report["seed"] = opt.seed;
    report["tolerances"] = tolerances_json(tol);
    report["steps"] = steps;
    report["modulus_of_continuity"] = modulus;
    report["crossings"] = crossings;
    report["rank_profile"] = json{{"bad_rank", json::array()},
                                  {"candidate_violations", profile.candidate_violations},
                                  {"max_bad_rank", profile.max_bad_rank}};
    for (const auto& e : profile.entries) report["rank_profile"]["bad_rank"].push_back(e.bad_rank);
    if (t_star) {
      report["t_star"] = *t_star;
      report["t_star_bracketed"] = bracketed;
    }
    emit(opt.output, report);

    out << samples.size() << " samples, modulus of continuity " << std::setprecision(6) << modulus
        << ", " << crossings.size() << " crossing(s)";
    for (const auto& c : crossings) {
      out << " [t " << c["t_from"].get<double>() << " -> " << c["t_to"].get<double>() << "]";
    }
    out << std::defaultfloat << '\n';
    return kPass;
  } catch (const Error& e) {
    return report_error(err, e);
  }
}

}  // namespace crreduce::cli
