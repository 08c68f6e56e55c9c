#pragma once

// Tolerance-aware dense linear algebra used by every other module.
// Everything here is a pure function of its arguments.

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "crreduce/errors.hpp"

namespace crreduce {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;

enum class Mode { CR, Lagrangian };

const char* to_string(Mode mode);

/// Thresholds for rank decisions, eigenvalue clustering and postcondition
/// checks. All are relative to the largest singular value of the operand
/// they are applied to.
struct Tolerances {
  double tau_rank = 1e-10;
  double tau_eig = 1e-7;
  double tau_verify = 1e-8;

  /// Throws InvalidInput unless all fields are positive and
  /// tau_verify >= tau_rank.
  void validate() const;
};

struct Signature {
  int p = 0;
  int q = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Column span of an ambient_dim x d matrix of full column rank. Bases
/// produced by kernel_basis are orthonormal.
struct Subspace {
  CMat basis;

  Index ambient_dim() const { return basis.rows(); }
  Index dim() const { return basis.cols(); }
};

/// Basis that is orthonormal up to sign for a hermitian pairing:
/// pairing(u_j, u_k) = signs[j] * delta_jk. Positive vectors come first.
struct SignedBasis {
  CMat vectors;
  std::vector<int> signs;

  int positives() const;
  int negatives() const;
};

/// Largest singular value (spectral norm); zero for empty matrices.
template <typename Derived>
double opnorm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  return svd.singularValues()(0);
}

/// Smallest singular value; zero for empty matrices.
template <typename Derived>
double min_singular_value(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  return svd.singularValues()(svd.singularValues().size() - 1);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Natural scale of an operator: its spectral norm, or 1 for the zero map.
double spectral_scale(const Mat& a);

/// Orthonormal basis of the numerical kernel of m, i.e. the right singular
/// vectors whose singular values are at most tau_rank * |m|. The real
/// overload returns a real basis.
Subspace kernel_basis(const CMat& m, const Tolerances& tol);
Subspace kernel_basis(const Mat& m, const Tolerances& tol);

struct EigenvalueCluster {
  Complex value;
  int multiplicity = 0;
  /// Raw eigenvalues merged into this cluster (as returned by the solver).
  std::vector<Complex> raw;
};

/// Eigenvalues of a real square matrix merged by single linkage within
/// tau_eig * scale(a). Conjugate clusters are symmetrized so that the output
/// is exactly closed under conjugation. Sorted by (Re, Im).
std::vector<EigenvalueCluster> eig_clusters(const Mat& a, const Tolerances& tol);

/// Inertia of a real symmetric matrix. Throws DegenerateForm if an
/// eigenvalue falls inside the dead zone |lambda| <= tau_rank * |g|.
Signature signature(const Mat& g, const Tolerances& tol);

/// Signed Gram-Schmidt of the columns of cols under h(u, w) = u^* h w.
/// Columns are processed in order; an isotropic leading column is replaced
/// by a combination with a partner before normalization.
SignedBasis hermitian_orthonormalize(const CMat& cols, const CMat& h,
                                     const Tolerances& tol);

/// Orthonormal real basis of dimension dim spanning Re(b) + Im(b).
Mat real_form(const CMat& b, Index dim);

/// Orthonormal basis for the column span of b truncated to dim columns.
CMat orthonormalize(const CMat& b, Index dim);

/// Largest sine of the principal angles between the column spans.
double subspace_distance(const CMat& a, const CMat& b);

/// Complex structure sharing the +-i splitting of x by sign of imaginary
/// part: the limit of X <- (X - X^-1)/2. Requires no real eigenvalues.
Mat complex_structure_part(const Mat& x);

/// Involution sharing the splitting of x by sign of real part: the limit of
/// X <- (X + X^-1)/2, i.e. the matrix sign function.
Mat involution_part(const Mat& x);

}  // namespace crreduce
