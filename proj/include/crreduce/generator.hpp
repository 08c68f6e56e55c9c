#pragma once

// Fixture instances, seeded random generic instances and the degenerate
// family used to exercise the classifier.

#include <cstdint>

#include "crreduce/structures.hpp"

namespace crreduce {

struct GeneratorSpec {
  Mode mode = Mode::CR;
  int n = 1;
  /// Complex signature of g in CR mode; ignored in Lagrangian mode, where g
  /// is always split.
  int p = 1;
  int q = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  /// When false the standard coordinates are kept (T = Id).
  bool randomize_basis = true;
};

/// Omega(t) = base + t * direction with a fixed structure map.
struct Family {
  Mode mode = Mode::CR;
  int n = 0;
  Mat base;
  Mat direction;
  Mat structure;

  Instance at(double t) const;
};

/// The standard pair conjugated by a seeded random T. Throws InvalidInput
/// on a bad spec.
Instance gen_partially_integrable(const GeneratorSpec& spec);

/// Standard pair plus epsilon times a unit anti-hermitian skew form,
/// resampled until the genericity margin is at least 2 tau_eig scale(A).
/// Throws GenerationFailure after 100 rejections.
Instance gen_generic(const GeneratorSpec& spec, const Tolerances& tol = {});

/// The accepted draw of gen_generic as a family in epsilon: base is the
/// partially integrable omega and direction the unit perturbation, so that
/// at(spec.epsilon) reproduces gen_generic(spec). With epsilon = 0 the first
/// draw is used.
Family gen_perturbation_family(const GeneratorSpec& spec, const Tolerances& tol = {});

struct DegenerateInstance {
  Instance instance;
  double t_star = 0.0;
  Family family;
};

/// CR family Omega0 + t W where W is the real part of dz1 ^ dz2. Locates the
/// first t in (0, 100] where genericity fails by scan and bisection and
/// returns the instance at 1.25 t*. The seed only randomizes the basis.
DegenerateInstance gen_degenerate(int n, std::uint64_t seed, const Tolerances& tol = {});

Instance std2_cr();
Instance std2_lag();
Instance std4_cr();
/// n = 2, signature (2, 0), seed 0, T = Id.
Instance pert4_cr(double epsilon, const Tolerances& tol = {});
/// gen_degenerate(2, 0).
DegenerateInstance deg4(const Tolerances& tol = {});

}  // namespace crreduce
