#include "crreduce/generator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "crreduce/random.hpp"

namespace crreduce {

namespace {

// Omega0 = blockdiag(s_k [[0,1],[-1,0]]) and J0 = blockdiag([[0,-1],[1,0]]),
// so g = blockdiag(s_k I_2).
Instance standard_cr(int n, int p) {
  Mat omega = Mat::Zero(2 * n, 2 * n);
  Mat j = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const double s = k < p ? 1.0 : -1.0;
    omega(2 * k, 2 * k + 1) = s;
    omega(2 * k + 1, 2 * k) = -s;
    j(2 * k, 2 * k + 1) = -1.0;
    j(2 * k + 1, 2 * k) = 1.0;
  }
  return make_instance(Mode::CR, omega, j);
}

// Omega0 = [[0, I], [-I, 0]] and sigma0 = diag(I, -I).
Instance standard_lagrangian(int n) {
  Mat omega = Mat::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Mat::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  Mat sigma = Mat::Identity(2 * n, 2 * n);
  sigma.bottomRightCorner(n, n) *= -1.0;
  return make_instance(Mode::Lagrangian, omega, sigma);
}

void check_spec(const GeneratorSpec& spec) {
  std::ostringstream msg;
  if (spec.n < 1) {
    msg << "n must be positive, got " << spec.n;
  } else if (spec.mode == Mode::CR && (spec.p < 0 || spec.q < 0 || spec.p + spec.q != spec.n)) {
    msg << "signature (" << spec.p << "," << spec.q << ") does not add up to n = " << spec.n;
  } else if (!std::isfinite(spec.epsilon) || spec.epsilon < 0.0) {
    msg << "epsilon must be finite and nonnegative, got " << spec.epsilon;
  } else {
    return;
  }
  throw Error(ErrorKind::InvalidInput, msg.str());
}

Instance standard_pair(const GeneratorSpec& spec) {
  return spec.mode == Mode::CR ? standard_cr(spec.n, spec.p) : standard_lagrangian(spec.n);
}

// Unit skew form W with J0^T W J0 = -W (CR) or s0 W s0 = W (Lagrangian).
// Zero when no such form exists (n = 1).
Mat anti_hermitian_direction(const Instance& standard, Rng& rng) {
  const Index dim = standard.dim();
  Mat x = random_gaussian(dim, dim, rng);
  x = (x - x.transpose()).eval();
  const Mat& s = standard.structure;
  Mat w = standard.mode == Mode::CR ? Mat(0.5 * (x - s.transpose() * x * s))
                                    : Mat(0.5 * (x + s * x * s));
  const double nrm = opnorm(w);
  if (nrm > 1e-12) w /= nrm;
  else w.setZero();
  return w;
}

Mat basis_change(const GeneratorSpec& spec, Rng& rng) {
  const Index dim = 2 * spec.n;
  return spec.randomize_basis ? random_well_conditioned(dim, rng) : Mat(Mat::Identity(dim, dim));
}

std::string describe(const char* kind, const GeneratorSpec& spec) {
  std::ostringstream label;
  label << kind << " " << to_string(spec.mode) << " n=" << spec.n;
  if (spec.mode == Mode::CR) label << " sig=(" << spec.p << "," << spec.q << ")";
  if (spec.epsilon > 0.0) label << " eps=" << spec.epsilon;
  label << " seed=" << spec.seed;
  return label.str();
}

// Genericity margin relative to what gen_generic demands; >= 1 is accepted.
double margin_ratio(const Instance& inst, const Tolerances& tol) {
  try {
    const DerivedTriple tri = derive(inst, tol);
    const GenericityReport rep = check_genericity(inst, tri, tol);
    if (!rep.omega_ok || !rep.nu_ok || rep.eigenvalues.empty()) return 0.0;
    const double margin = inst.mode == Mode::CR ? rep.min_im : rep.min_re;
    return margin / (2.0 * tol.tau_eig * rep.scale);
  } catch (const Error&) {
    return 0.0;
  }
}

bool generic(const Instance& inst, const Tolerances& tol) {
  try {
    const DerivedTriple tri = derive(inst, tol);
    return check_genericity(inst, tri, tol).generic;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Instance Family::at(double t) const {
  Instance inst = make_instance(mode, base + t * direction, structure);
  std::ostringstream label;
  label << "family t=" << t;
  inst.label = label.str();
  return inst;
}

Instance gen_partially_integrable(const GeneratorSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  Instance inst = transform(standard_pair(spec), basis_change(spec, rng));
  inst.label = describe("integrable", spec);
  return inst;
}

namespace {

// Rejection loop shared by gen_generic and gen_perturbation_family. With
// epsilon = 0 the first draw is returned unchecked.
Instance draw_generic(const GeneratorSpec& spec, const Tolerances& tol, Family* family) {
  check_spec(spec);
  Rng rng(spec.seed);
  const Instance standard = standard_pair(spec);
  double best = 0.0;
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Mat w = anti_hermitian_direction(standard, rng);
    const Mat t = basis_change(spec, rng);
    const Mat t_inv = t.inverse();
    Instance inst = standard;
    inst.omega += spec.epsilon * w;
    inst = transform(inst, t);
    const double ratio = spec.epsilon > 0.0 ? margin_ratio(inst, tol) : 1.0;
    best = std::max(best, ratio);
    if (ratio >= 1.0) {
      if (family != nullptr) {
        family->mode = spec.mode;
        family->n = spec.n;
        family->base = t_inv.transpose() * standard.omega * t_inv;
        family->direction = t_inv.transpose() * w * t_inv;
        family->structure = inst.structure;
      }
      inst.label = describe("generic", spec);
      return inst;
    }
  }
  std::ostringstream msg;
  msg << "no generic instance after 100 attempts; best margin was " << best
      << " of the required 2 tau_eig scale(A)";
  throw Error(ErrorKind::GenerationFailure, msg.str());
}

}  // namespace

Family gen_perturbation_family(const GeneratorSpec& spec, const Tolerances& tol) {
  Family fam;
  draw_generic(spec, tol, &fam);
  return fam;
}

Instance gen_generic(const GeneratorSpec& spec, const Tolerances& tol) {
  check_spec(spec);
  if (!(spec.epsilon > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "generic instances need epsilon > 0");
  }
  return draw_generic(spec, tol, nullptr);
}

DegenerateInstance gen_degenerate(int n, std::uint64_t seed, const Tolerances& tol) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "the degenerate family needs n >= 2");
  // Coordinates (x1, y1, x2, y2, ...). Omega0 has g = diag(1,1,-1,-1, 1, ...)
  // so that W = Re(dz1 ^ dz2) can cancel it.
  Instance standard = standard_cr(n, n);
  standard.omega(2, 3) = -1.0;
  standard.omega(3, 2) = 1.0;
  Mat w = Mat::Zero(2 * n, 2 * n);
  w(0, 2) = 1.0;
  w(2, 0) = -1.0;
  w(1, 3) = -1.0;
  w(3, 1) = 1.0;

  Rng rng(seed);
  const Mat t = random_well_conditioned(2 * n, rng);
  const Mat t_inv = t.inverse();
  DegenerateInstance out;
  out.family.mode = Mode::CR;
  out.family.n = n;
  out.family.base = t_inv.transpose() * standard.omega * t_inv;
  out.family.direction = t_inv.transpose() * w * t_inv;
  out.family.structure = t * standard.structure * t_inv;

  constexpr double step = 0.05;
  double lo = 0.0, hi = std::numeric_limits<double>::quiet_NaN();
  for (int k = 1; k <= 2000; ++k) {
    const double s = k * step;
    if (!generic(out.family.at(s), tol)) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (std::isnan(hi)) {
    throw Error(ErrorKind::GenerationFailure, "no genericity crossing found for t in (0, 100]");
  }
  for (int it = 0; it < 60 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (generic(out.family.at(mid), tol) ? lo : hi) = mid;
  }
  out.t_star = hi;
  out.instance = out.family.at(1.25 * out.t_star);
  std::ostringstream label;
  label << "degenerate CR n=" << n << " seed=" << seed << " t=" << 1.25 * out.t_star;
  out.instance.label = label.str();
  return out;
}

Instance std2_cr() {
  Instance inst = standard_cr(1, 1);
  inst.label = "STD2_CR";
  return inst;
}

Instance std2_lag() {
  Instance inst = standard_lagrangian(1);
  inst.label = "STD2_LAG";
  return inst;
}

Instance std4_cr() {
  Instance inst = standard_cr(2, 2);
  inst.label = "STD4_CR";
  return inst;
}

Instance pert4_cr(double epsilon, const Tolerances& tol) {
  GeneratorSpec spec;
  spec.mode = Mode::CR;
  spec.n = 2;
  spec.p = 2;
  spec.q = 0;
  spec.epsilon = epsilon;
  spec.seed = 0;
  spec.randomize_basis = false;
  Instance inst = gen_generic(spec, tol);
  std::ostringstream label;
  label << "PERT4_CR eps=" << epsilon;
  inst.label = label.str();
  return inst;
}

DegenerateInstance deg4(const Tolerances& tol) {
  DegenerateInstance d = gen_degenerate(2, 0, tol);
  d.instance.label = "DEG4";
  return d;
}

}  // namespace crreduce
