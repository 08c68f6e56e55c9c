#pragma once

// Generalized eigenspaces of the g-skew endomorphism A and their grouping
// into the conjugation/negation quadruples C_alpha.

#include <utility>
#include <vector>

#include "crreduce/linalg.hpp"

namespace crreduce {

struct EigCluster {
  Complex alpha;
  /// Smallest k with D^{k+1} = D^k.
  int chain_depth = 1;
  /// Basis of the generalized eigenspace D_alpha. Conjugate clusters carry
  /// exactly conjugate bases; self-conjugate clusters carry real bases.
  Subspace space;
  int dim = 0;
  std::vector<Complex> raw;
};

struct SpectralData {
  std::vector<EigCluster> clusters;
  std::vector<std::pair<int, int>> conjugation_pairs;
  std::vector<std::pair<int, int>> negation_pairs;
  /// conj_of[i] is the cluster of conj(alpha_i); neg_of[i] that of -alpha_i.
  std::vector<int> conj_of;
  std::vector<int> neg_of;
  double scale = 1.0;

  Index ambient_dim() const {
    return clusters.empty() ? 0 : clusters.front().space.ambient_dim();
  }
};

/// D_alpha for every eigenvalue cluster of A, with Jordan chain depths and
/// the conjugation and negation pairings. Throws SpectralInconsistency when
/// dimensions do not add up, a negation partner is missing, or 0 is an
/// eigenvalue.
SpectralData generalized_eigenspaces(const Mat& A, const Tolerances& tol);

/// max |D_a^T g D_b| over pairs with b != -a. Throws SpectralInconsistency
/// if some D_a, D_{-a} pairing is degenerate.
double verify_orthogonality(const SpectralData& spec, const Mat& g, const Tolerances& tol);

struct QuadSpace {
  Complex alpha;
  /// Cluster indices for alpha, conj(alpha), -alpha, -conj(alpha). Entries
  /// repeat when the values coincide.
  int alpha_idx = -1;
  int conj_idx = -1;
  int neg_idx = -1;
  int negconj_idx = -1;
  std::vector<int> members;
  Subspace complex_space;
  Mat real_basis;
  Signature signature;
  bool pure_imaginary = false;
};

/// Groups clusters by representative: arg(alpha) in (0, pi/2] for CR,
/// Re(alpha) < 0 <= Im(alpha) for Lagrangian. Checks that every cluster is
/// assigned once and that the signature laws hold.
std::vector<QuadSpace> group_quads(const SpectralData& spec, Mode mode, const Mat& g,
                                   const Tolerances& tol);

/// True when alpha is a representative for the given mode.
bool is_representative(Complex alpha, Mode mode, double radius);

}  // namespace crreduce
