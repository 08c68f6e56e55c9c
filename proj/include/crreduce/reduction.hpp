#pragma once

// Construction of the isometry e and the induced partially integrable
// structure K = e^-1 S e.
//
// e is a real g-orthogonal map that sends every generalized eigenspace of A
// on the "positive" side (Im alpha > 0 for CR, Re alpha < 0 for Lagrangian)
// into L+, the +i (resp. +1) eigenspace of the input structure S. The choice
// inside each block is free ("any fashion") and is drawn from a seeded
// generator; K does not depend on it.

#include <cstdint>
#include <utility>
#include <vector>

#include "crreduce/spectral.hpp"
#include "crreduce/structures.hpp"

namespace crreduce {

/// Target of one quad space inside L+ (and, for Lagrangian mode, its
/// g-dual inside L-).
struct TargetSplit {
  Complex alpha;
  /// P_alpha inside L+. For pure imaginary CR blocks the columns are
  /// h-orthonormal with the signs below.
  Subspace P;
  std::vector<int> signs;
  /// Receives D_alpha.
  Subspace P1;
  /// CR: the other isotropic half of P (receives D_{-conj alpha}). Lagrangian:
  /// conj(P1) for non-real alpha. Empty otherwise.
  Subspace P2;
  /// Lagrangian only: the part of L- dual to P1 under g.
  Subspace dual;
  /// Signature of g on the real form of the full target of C_alpha.
  Signature q_real_signature;
};

struct IsometryE {
  CMat e;
  double realness_residual = 0.0;
  double orthogonality_residual = 0.0;
  Complex det;
};

struct ReductionResult {
  Mat K;
  IsometryE e;
  double residual_structure = 0.0;
  double residual_hermitian = 0.0;
  double residual_trace = 0.0;
  double imag_residual = 0.0;
  double orthogonality_residual = 0.0;
  std::uint64_t seed_used = 0;
  GenericityReport report;
  std::vector<QuadSpace> quads;
};

/// Raised by reduce when the genericity condition fails; carries the report.
class NotGenericError : public Error {
 public:
  NotGenericError(GenericityReport report, const std::string& what)
      : Error(ErrorKind::NotGeneric, what), report_(std::move(report)) {}
  const GenericityReport& report() const noexcept { return report_; }

 private:
  GenericityReport report_;
};

/// L+ and L-: the +-i eigenspaces of J (CR) or the complexified +-1
/// eigenspaces of sigma (Lagrangian, real bases).
std::pair<Subspace, Subspace> structure_eigenspaces(const Instance& inst, const Tolerances& tol);

std::vector<TargetSplit> build_target_split(Mode mode, const Subspace& l_plus,
                                            const Subspace& l_minus,
                                            const std::vector<QuadSpace>& quads,
                                            const DerivedTriple& tri, const Tolerances& tol);

IsometryE build_isometry(const SpectralData& spec, const std::vector<QuadSpace>& quads,
                         const std::vector<TargetSplit>& splits, const DerivedTriple& tri,
                         Mode mode, std::uint64_t rng_seed, const Tolerances& tol);

struct InducedStructure {
  Mat K;
  double imag_residual = 0.0;
};

/// Real part of e^-1 S e. Throws NumericalFailure if the discarded
/// imaginary part exceeds tau_verify.
InducedStructure induce_structure(const CMat& e, const Instance& inst, const Tolerances& tol);

/// Full pipeline with postcondition checks.
ReductionResult reduce(const Instance& inst, std::uint64_t rng_seed, const Tolerances& tol);

/// |K^2 + 1| (CR) or |K^2 - 1| (Lagrangian).
double structure_residual(Mode mode, const Mat& k);
/// |K^T omega K - omega| (CR) or |K^T omega K + omega| (Lagrangian).
double hermitian_residual(Mode mode, const Mat& omega, const Mat& k);

/// Random element f of the stabilizer of (g, S): f S = S f, f^T g f = g.
Mat random_stabilizer(Mode mode, const Mat& structure, const Mat& g, std::uint64_t seed);

struct UniquenessReport {
  double max_pairwise_distance = 0.0;
  double stabilizer_distance = 0.0;
  std::vector<Mat> structures;
};

/// Reduces with every seed and compares the resulting K; also conjugates
/// one e by a random stabilizer element. Throws UniquenessViolation when a
/// distance exceeds 10 tau_verify.
UniquenessReport verify_uniqueness(const Instance& inst, const std::vector<std::uint64_t>& seeds,
                                   const Tolerances& tol);

}  // namespace crreduce
