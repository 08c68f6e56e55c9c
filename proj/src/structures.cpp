#include "crreduce/structures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace crreduce {

Instance make_instance(Mode mode, Mat omega, Mat structure, std::string label) {
  Instance inst;
  inst.mode = mode;
  inst.n = static_cast<int>(omega.rows() / 2);
  inst.omega = std::move(omega);
  inst.structure = std::move(structure);
  inst.label = std::move(label);
  return inst;
}

namespace {

[[noreturn]] void invalid(const std::string& what, double residual) {
  std::ostringstream msg;
  msg << what << " (residual " << residual << ")";
  throw Error(ErrorKind::InvalidInput, msg.str());
}

}  // namespace

void validate(const Instance& inst, const Tolerances& tol) {
  tol.validate();
  const Index dim = inst.dim();
  if (inst.n <= 0) throw Error(ErrorKind::InvalidInput, "n must be positive");
  if (inst.omega.rows() != dim || inst.omega.cols() != dim ||
      inst.structure.rows() != dim || inst.structure.cols() != dim) {
    throw Error(ErrorKind::InvalidInput, "omega and structure must be 2n x 2n");
  }
  if (!inst.omega.allFinite() || !inst.structure.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "non-finite entries");
  }

  const double skew = opnorm(Mat(inst.omega + inst.omega.transpose()));
  if (skew > tol.tau_verify * std::max(opnorm(inst.omega), 1.0)) {
    invalid("omega is not skew-symmetric", skew);
  }

  const Mat& s = inst.structure;
  const double s2 = std::max(1.0, opnorm(s) * opnorm(s));
  const Mat id = Mat::Identity(dim, dim);
  if (inst.mode == Mode::CR) {
    const double r = opnorm(Mat(s * s + id));
    if (r > tol.tau_verify * s2) invalid("structure is not a complex structure (J^2 != -1)", r);
  } else {
    const double r = opnorm(Mat(s * s - id));
    if (r > tol.tau_verify * s2) invalid("structure is not an involution (sigma^2 != 1)", r);
    const double tr = std::abs(s.trace());
    if (tr > tol.tau_verify * s2 * static_cast<double>(dim)) {
      invalid("involution is not trace-free", tr);
    }
  }
}

DerivedTriple derive(const Instance& inst, const Tolerances& tol) {
  validate(inst, tol);
  const Mat& omega = inst.omega;
  const Mat& s = inst.structure;
  const double sign = inst.mode == Mode::CR ? 1.0 : -1.0;

  DerivedTriple tri;
  tri.nu = 0.5 * (omega + sign * s.transpose() * omega * s);
  tri.nu = 0.5 * (tri.nu - tri.nu.transpose()).eval();
  tri.g = tri.nu * s;
  tri.g = 0.5 * (tri.g + tri.g.transpose()).eval();

  Eigen::JacobiSVD<Mat> svd(tri.g);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= tol.tau_rank * sv(0)) {
    std::ostringstream msg;
    msg << "nu is degenerate (smallest singular value of g " << sv(sv.size() - 1) << ")";
    throw Error(ErrorKind::DegenerateForm, msg.str());
  }
  tri.signature_g = signature(tri.g, tol);
  tri.A = tri.g.partialPivLu().solve(Mat(-omega));

  // Postconditions.
  const double s2 = std::max(1.0, opnorm(s) * opnorm(s));
  const double nu_scale = std::max(opnorm(tri.nu), std::numeric_limits<double>::min());
  const double om_scale = std::max(opnorm(omega), std::numeric_limits<double>::min());
  auto check = [&](double residual, double bound, const char* what) {
    if (residual > bound) {
      std::ostringstream msg;
      msg << what << " residual " << residual << " exceeds " << bound;
      throw Error(ErrorKind::InternalInconsistency, msg.str());
    }
  };
  check(opnorm(Mat(s.transpose() * tri.nu * s - sign * tri.nu)),
        tol.tau_verify * nu_scale * s2, "nu structure symmetry");
  const double bound = tol.tau_verify * om_scale;
  check(opnorm(Mat(tri.A.transpose() * tri.g - omega)), bound, "A^T g = omega");
  check(opnorm(Mat(tri.A.transpose() * tri.g + tri.g * tri.A)), bound, "g-skewness of A");
  return tri;
}

GenericityReport check_genericity(const Instance& inst, const DerivedTriple& tri,
                                  const Tolerances& tol) {
  GenericityReport rep;
  auto min_sv_ok = [&](const Mat& m, double& min_sv) {
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    min_sv = sv(sv.size() - 1);
    return sv(0) > 0.0 && min_sv > tol.tau_rank * sv(0);
  };
  rep.omega_ok = min_sv_ok(inst.omega, rep.omega_min_sv);
  rep.nu_ok = min_sv_ok(tri.nu, rep.nu_min_sv);
  rep.scale = spectral_scale(tri.A);
  try {
    rep.eigenvalues = eig_clusters(tri.A, tol);
  } catch (const Error&) {
    rep.generic = false;
    return rep;
  }
  rep.min_im = std::numeric_limits<double>::infinity();
  rep.min_re = std::numeric_limits<double>::infinity();
  for (const auto& c : rep.eigenvalues) {
    rep.min_im = std::min(rep.min_im, std::abs(c.value.imag()));
    rep.min_re = std::min(rep.min_re, std::abs(c.value.real()));
  }
  const double margin = inst.mode == Mode::CR ? rep.min_im : rep.min_re;
  rep.generic = rep.omega_ok && rep.nu_ok && margin > tol.tau_eig * rep.scale;
  return rep;
}

bool is_partially_integrable(const Instance& inst, const DerivedTriple& tri,
                             const Tolerances& tol) {
  return opnorm(Mat(tri.nu - inst.omega)) <= tol.tau_verify * opnorm(inst.omega);
}

Instance transform(const Instance& inst, const Mat& t) {
  const Eigen::PartialPivLU<Mat> lu(t);
  const Mat t_inv = lu.inverse();
  Instance out = inst;
  out.omega = t_inv.transpose() * inst.omega * t_inv;
  out.omega = 0.5 * (out.omega - out.omega.transpose()).eval();
  out.structure = t * inst.structure * t_inv;
  return out;
}

}  // namespace crreduce
