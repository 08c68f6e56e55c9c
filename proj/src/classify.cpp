#include "crreduce/classify.hpp"

#include <cmath>
#include <sstream>

#include "crreduce/reduction.hpp"
#include "crreduce/spectral.hpp"

namespace crreduce {

const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::CRGeneric: return "cr_generic";
    case Kind::LagrangianGeneric: return "lagrangian_generic";
    case Kind::Mixed: return "mixed";
    case Kind::DegenerateForm: return "degenerate_form";
  }
  return "unknown";
}

namespace {

bool is_bad(Complex alpha, Mode mode, double radius) {
  return mode == Mode::CR ? std::abs(alpha.imag()) <= radius : std::abs(alpha.real()) <= radius;
}

Mat stack_real(const SpectralData& spec, const std::vector<int>& members) {
  Index d = 0;
  for (int i : members) d += spec.clusters[i].dim;
  CMat stacked(spec.ambient_dim(), d);
  Index col = 0;
  for (int i : members) {
    stacked.middleCols(col, spec.clusters[i].dim) = spec.clusters[i].space.basis;
    col += spec.clusters[i].dim;
  }
  return real_form(stacked, d);
}

// Runs the reduction of one block, turning every way the restricted data can
// fail genericity into NotGeneric for that block.
Mat reduce_block(Mode mode, const Mat& omega, const Mat& structure, const char* name,
                 std::uint64_t seed, const Tolerances& tol) {
  const Instance block =
      make_instance(mode, omega, structure, std::string("block ") + name);
  try {
    return reduce(block, seed, tol).K;
  } catch (const NotGenericError& err) {
    throw NotGenericError(err.report(), std::string("block ") + name + ": " + err.what());
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::DegenerateForm) throw;
    throw NotGenericError(GenericityReport{}, std::string("block ") + name + ": " + err.what());
  }
}

[[noreturn]] void projection_failure(const char* what, double residual) {
  std::ostringstream msg;
  msg << what << " (residual " << residual << ")";
  throw Error(ErrorKind::StructureProjectionFailure, msg.str());
}

Mat projected_complex_structure(const Mat& j11) {
  const Index k = j11.rows();
  const double r = opnorm(Mat(j11 * j11 + Mat::Identity(k, k)));
  if (r > 0.5) projection_failure("projected J is not close to a complex structure on H1", r);
  return complex_structure_part(j11);
}

Mat projected_involution(const Mat& s22) {
  const Index k = s22.rows();
  const double r = opnorm(Mat(s22 * s22 - Mat::Identity(k, k)));
  if (r > 0.5) projection_failure("projected sigma is not close to an involution on H2", r);
  const Mat s = involution_part(s22);
  if (std::abs(s.trace()) > 0.5) projection_failure("projected sigma is not trace-free on H2", s.trace());
  return s;
}

}  // namespace

Classification classify(const Instance& inst, const Tolerances& tol) {
  validate(inst, tol);
  Classification out;
  DerivedTriple tri;
  try {
    tri = derive(inst, tol);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::DegenerateForm) throw;
    out.kind = Kind::DegenerateForm;
    out.reason = err.what();
    return out;
  }
  const GenericityReport rep = check_genericity(inst, tri, tol);
  const double radius = tol.tau_eig * rep.scale;
  for (const auto& c : rep.eigenvalues) {
    EigenRow row;
    row.alpha = c.value;
    row.dim = c.multiplicity;
    row.distance = inst.mode == Mode::CR ? std::abs(c.value.imag()) : std::abs(c.value.real());
    out.eigen_table.push_back(row);
    if (is_bad(c.value, inst.mode, radius)) out.bad_rank += c.multiplicity;
  }
  if (!rep.omega_ok || !rep.nu_ok) {
    out.kind = Kind::DegenerateForm;
    out.reason = !rep.omega_ok ? "omega is degenerate" : "nu is degenerate";
  } else if (rep.eigenvalues.empty()) {
    out.kind = Kind::DegenerateForm;
    out.reason = "eigenvalue computation failed";
  } else if (out.bad_rank > 0) {
    out.kind = Kind::Mixed;
  } else {
    out.kind = inst.mode == Mode::CR ? Kind::CRGeneric : Kind::LagrangianGeneric;
  }
  return out;
}

MixedResult mixed_reduce(const Instance& inst, std::uint64_t rng_seed, const Tolerances& tol) {
  const Classification cls = classify(inst, tol);
  if (cls.kind != Kind::Mixed) {
    throw Error(ErrorKind::InvalidInput,
                std::string("mixed_reduce needs a mixed instance, got ") + to_string(cls.kind));
  }
  const DerivedTriple tri = derive(inst, tol);
  const SpectralData spec = generalized_eigenspaces(tri.A, tol);
  const double radius = tol.tau_eig * spec.scale;

  // CR-type clusters go to H1, Lagrangian-type clusters to H2.
  std::vector<int> cr_side, lag_side;
  for (int i = 0; i < static_cast<int>(spec.clusters.size()); ++i) {
    const bool bad = is_bad(spec.clusters[i].alpha, inst.mode, radius);
    const bool cr_type = inst.mode == Mode::CR ? !bad : bad;
    (cr_type ? cr_side : lag_side).push_back(i);
  }

  MixedResult out;
  out.H1_basis = stack_real(spec, cr_side);
  out.H2_basis = stack_real(spec, lag_side);
  const Index k1 = out.H1_basis.cols(), k2 = out.H2_basis.cols();
  Mat basis(inst.dim(), k1 + k2);
  basis << out.H1_basis, out.H2_basis;
  const Eigen::FullPivLU<Mat> lu(basis);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::InternalInconsistency, "H1 and H2 do not span the whole space");
  }
  // S and A in the adapted basis; both H1 and H2 are A-invariant.
  const Mat s_adapted = lu.solve(Mat(inst.structure * basis));
  const Mat a_adapted = lu.solve(Mat(tri.A * basis));

  for (auto [b, name] : {std::pair{&out.H1_basis, "H1"}, std::pair{&out.H2_basis, "H2"}}) {
    if (b->cols() == 0) continue;
    try {
      signature(Mat(b->transpose() * tri.g * *b), tol);
    } catch (const Error& err) {
      throw NotGenericError(GenericityReport{},
                            std::string("block ") + name + " is degenerate under g: " + err.what());
    }
  }

  out.omega1 = out.H1_basis.transpose() * inst.omega * out.H1_basis;
  out.omega2 = out.H2_basis.transpose() * inst.omega * out.H2_basis;
  out.residuals.g_orthogonality = opnorm(Mat(out.H1_basis.transpose() * tri.g * out.H2_basis));
  out.residuals.omega_orthogonality =
      opnorm(Mat(out.H1_basis.transpose() * inst.omega * out.H2_basis));

  if (k1 > 0) {
    const Mat seed_structure = inst.mode == Mode::CR
                                   ? projected_complex_structure(s_adapted.topLeftCorner(k1, k1))
                                   : complex_structure_part(a_adapted.topLeftCorner(k1, k1));
    out.J1 = reduce_block(Mode::CR, out.omega1, seed_structure, "H1", rng_seed, tol);
    out.residuals.j1_structure = structure_residual(Mode::CR, out.J1);
    out.residuals.j1_hermitian = hermitian_residual(Mode::CR, out.omega1, out.J1);
  } else {
    out.J1 = Mat(0, 0);
  }
  if (k2 > 0) {
    const Mat seed_structure = inst.mode == Mode::CR
                                   ? Mat(-involution_part(a_adapted.bottomRightCorner(k2, k2)))
                                   : projected_involution(s_adapted.bottomRightCorner(k2, k2));
    out.sigma2 = reduce_block(Mode::Lagrangian, out.omega2, seed_structure, "H2", rng_seed, tol);
    out.residuals.sigma2_structure = structure_residual(Mode::Lagrangian, out.sigma2);
    out.residuals.sigma2_trace = std::abs(out.sigma2.trace());
    out.residuals.sigma2_anti_invariance =
        hermitian_residual(Mode::Lagrangian, out.omega2, out.sigma2);
  } else {
    out.sigma2 = Mat(0, 0);
  }

  const double gnorm = opnorm(tri.g), onorm = opnorm(inst.omega);
  const auto& r = out.residuals;
  auto check = [](const char* what, double value, double bound) {
    if (value > bound) {
      std::ostringstream msg;
      msg << what << " residual " << value << " exceeds " << bound;
      throw Error(ErrorKind::NumericalFailure, msg.str());
    }
  };
  check("H1/H2 g-orthogonality", r.g_orthogonality, tol.tau_verify * gnorm);
  check("H1/H2 omega-orthogonality", r.omega_orthogonality, tol.tau_verify * onorm);
  check("J1 structure", r.j1_structure, tol.tau_verify);
  check("J1 hermitian", r.j1_hermitian, tol.tau_verify * onorm);
  check("sigma2 structure", r.sigma2_structure, tol.tau_verify);
  check("sigma2 trace", r.sigma2_trace, tol.tau_verify * static_cast<double>(std::max<Index>(k2, 1)));
  check("sigma2 anti-invariance", r.sigma2_anti_invariance, tol.tau_verify * onorm);
  return out;
}

RankProfile rank_profile(const std::vector<Instance>& instances, const Tolerances& tol) {
  RankProfile out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].mode != instances.front().mode || instances[i].n != instances.front().n) {
      std::ostringstream msg;
      msg << "instance " << i << " differs in mode or dimension from instance 0";
      throw Error(ErrorKind::InvalidInput, msg.str());
    }
    const Classification c = classify(instances[i], tol);
    out.entries.push_back({static_cast<int>(i), c.kind, c.bad_rank});
    out.max_bad_rank = std::max(out.max_bad_rank, c.bad_rank);
  }
  for (std::size_t i = 1; i + 1 < out.entries.size(); ++i) {
    const int here = out.entries[i].bad_rank;
    if (out.entries[i - 1].bad_rank < here && out.entries[i + 1].bad_rank < here) {
      out.candidate_violations.push_back(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace crreduce
