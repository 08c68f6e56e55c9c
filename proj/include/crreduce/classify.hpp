#pragma once

// Pointwise classification of instances that fail genericity, and the
// mixed decomposition H = H1 + H2 into a CR-type and a Lagrangian-type block.

#include <cstdint>
#include <string>
#include <vector>

#include "crreduce/structures.hpp"

namespace crreduce {

enum class Kind { CRGeneric, LagrangianGeneric, Mixed, DegenerateForm };

/// "cr_generic", "lagrangian_generic", "mixed", "degenerate_form".
const char* to_string(Kind kind);

struct EigenRow {
  Complex alpha;
  int dim = 0;
  /// |Im alpha| (CR) or |Re alpha| (Lagrangian).
  double distance = 0.0;
};

struct Classification {
  Kind kind = Kind::DegenerateForm;
  /// Total multiplicity of real eigenvalues (CR) or imaginary eigenvalues
  /// (Lagrangian).
  int bad_rank = 0;
  std::vector<EigenRow> eigen_table;
  /// Set for degenerate_form.
  std::string reason;
};

/// Total: degenerate omega or nu is reported as degenerate_form. Throws only
/// InvalidInput for malformed instances.
Classification classify(const Instance& inst, const Tolerances& tol);

struct MixedResiduals {
  double g_orthogonality = 0.0;
  double omega_orthogonality = 0.0;
  double j1_structure = 0.0;
  double j1_hermitian = 0.0;
  double sigma2_structure = 0.0;
  double sigma2_trace = 0.0;
  double sigma2_anti_invariance = 0.0;
};

/// H1 carries the CR-type structure J1 and H2 the Lagrangian-type sigma2,
/// in both modes. In CR mode H1 is the non-real part of the spectrum of A;
/// in Lagrangian mode H1 is the purely imaginary part. J1 and sigma2 are
/// expressed in the columns of H1_basis and H2_basis (real, orthonormal).
struct MixedResult {
  Mat H1_basis;
  Mat H2_basis;
  Mat J1;
  Mat sigma2;
  /// Restrictions of omega to the two blocks.
  Mat omega1;
  Mat omega2;
  MixedResiduals residuals;
};

/// Throws InvalidInput unless classify reports mixed; NotGeneric naming the
/// block when a restricted reduction is not generic; StructureProjectionFailure
/// when the projected input structure is far from a complex structure or
/// involution.
MixedResult mixed_reduce(const Instance& inst, std::uint64_t rng_seed, const Tolerances& tol);

struct RankEntry {
  int index = 0;
  Kind kind = Kind::DegenerateForm;
  int bad_rank = 0;
};

struct RankProfile {
  std::vector<RankEntry> entries;
  /// Indices i where bad_rank rises from i-1 and falls again at i+1.
  std::vector<int> candidate_violations;
  int max_bad_rank = 0;
};

/// Throws InvalidInput when the instances differ in mode or n.
RankProfile rank_profile(const std::vector<Instance>& instances, const Tolerances& tol);

}  // namespace crreduce
