#pragma once

// Pointwise almost CR (omega, J) and almost Lagrangian (omega, sigma) data,
// and the auxiliary forms nu, g and the endomorphism A built from them.

#include <string>
#include <vector>

#include "crreduce/linalg.hpp"

namespace crreduce {

/// A skew form omega on R^{2n} together with the structure map: an almost
/// complex structure J (CR mode) or a trace-free involution sigma
/// (Lagrangian mode).
struct Instance {
  Mode mode = Mode::CR;
  int n = 0;
  Mat omega;
  Mat structure;
  std::string label;

  Index dim() const { return 2 * n; }
};

Instance make_instance(Mode mode, Mat omega, Mat structure, std::string label = {});

/// Throws InvalidInput if the shapes are wrong, entries are not finite,
/// omega is not skew, or the structure map is not J^2 = -1 (CR) or a
/// trace-free sigma^2 = 1 (Lagrangian).
void validate(const Instance& inst, const Tolerances& tol);

/// nu, g and A in matrix form: g(X, Y) = X^T g Y and g(A X, Y) = omega(X, Y).
struct DerivedTriple {
  Mat nu;
  Mat g;
  Mat A;
  Signature signature_g;
};

/// CR:          nu = (omega + J^T omega J) / 2
/// Lagrangian:  nu = (omega - s^T omega s) / 2
/// g = nu * S and A = (omega g^-1)^T, so that A^T g = omega.
DerivedTriple derive(const Instance& inst, const Tolerances& tol);

struct GenericityReport {
  bool omega_ok = false;
  double omega_min_sv = 0.0;
  bool nu_ok = false;
  double nu_min_sv = 0.0;
  std::vector<EigenvalueCluster> eigenvalues;
  double min_im = 0.0;
  double min_re = 0.0;
  double scale = 1.0;
  bool generic = false;
};

/// Diagnostic only; never throws. Generic means both forms nondegenerate
/// and no eigenvalue of A is real (CR) or purely imaginary (Lagrangian).
GenericityReport check_genericity(const Instance& inst, const DerivedTriple& tri,
                                  const Tolerances& tol);

/// nu == omega within tau_verify * |omega|.
bool is_partially_integrable(const Instance& inst, const DerivedTriple& tri,
                             const Tolerances& tol);

/// Same instance in new coordinates: (T^-T omega T^-1, T S T^-1).
Instance transform(const Instance& inst, const Mat& t);

}  // namespace crreduce
