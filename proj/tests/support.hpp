#pragma once

// Independent oracles and hand-rolled random generators for the tests. None
// of this goes through the library's spectral or reduction code.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "crreduce/structures.hpp"

namespace testsupport {

using crreduce::Complex;
using crreduce::Mat;
using crreduce::CMat;
using crreduce::Index;
using crreduce::Instance;
using crreduce::Mode;

using Rng = std::mt19937_64;

inline double norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

inline Mat gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline Mat random_skew(Index dim, Rng& rng) {
  const Mat x = gaussian(dim, dim, rng);
  return x - x.transpose();
}

/// I + 0.3 X / |X|: condition number at most 1.3 / 0.7.
inline Mat near_identity(Index dim, Rng& rng, double size = 0.3) {
  const Mat x = gaussian(dim, dim, rng);
  return Mat::Identity(dim, dim) + size * x / norm2(x);
}

inline Mat standard_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j(2 * k, 2 * k + 1) = -1.0;
    j(2 * k + 1, 2 * k) = 1.0;
  }
  return j;
}

inline Mat standard_sigma(int n) {
  Mat s = Mat::Identity(2 * n, 2 * n);
  for (int k = n; k < 2 * n; ++k) s(k, k) = -1.0;
  return s;
}

/// A fully random almost CR (or Lagrangian) instance: random skew omega and
/// a conjugated standard structure map. Not necessarily generic.
inline Instance random_instance(Mode mode, int n, Rng& rng) {
  const Mat t = near_identity(2 * n, rng, 0.6);
  const Mat s0 = mode == Mode::CR ? standard_j(n) : standard_sigma(n);
  return crreduce::make_instance(mode, random_skew(2 * n, rng), t * s0 * t.inverse());
}

/// nu, g, A from the defining formulas, written out independently.
struct Triple {
  Mat nu, g, a;
};

inline Triple direct_triple(const Instance& inst) {
  Triple t;
  const Mat& s = inst.structure;
  const Mat& om = inst.omega;
  t.nu = inst.mode == Mode::CR ? Mat(0.5 * (om + s.transpose() * om * s))
                               : Mat(0.5 * (om - s.transpose() * om * s));
  t.g = t.nu * s;
  // g(AX, Y) = omega(X, Y)  <=>  A^T g = omega.
  t.a = (om * t.g.inverse()).transpose();
  return t;
}

/// Closed form of the induced structure from an eigendecomposition of A:
/// CR: +i on eigenvectors with Im > 0, -i otherwise.
/// Lagrangian: +1 on eigenvectors with Re < 0, -1 otherwise.
/// Valid for diagonalizable A.
inline Mat oracle_structure(const Instance& inst) {
  const Triple t = direct_triple(inst);
  Eigen::EigenSolver<Mat> es(t.a);
  const CMat v = es.eigenvectors();
  const auto& d = es.eigenvalues();
  CMat lam = CMat::Zero(d.size(), d.size());
  for (Index i = 0; i < d.size(); ++i) {
    if (inst.mode == Mode::CR) {
      lam(i, i) = d(i).imag() > 0 ? Complex(0, 1) : Complex(0, -1);
    } else {
      lam(i, i) = d(i).real() < 0 ? 1.0 : -1.0;
    }
  }
  const CMat k = v * lam * v.inverse();
  return k.real();
}

/// Durand-Kerner iteration for the roots of a monic polynomial with
/// coefficients c[0] x^d + c[1] x^{d-1} + ... (c[0] = 1).
inline std::vector<Complex> polynomial_roots(const std::vector<double>& c) {
  const std::size_t d = c.size() - 1;
  std::vector<Complex> z(d);
  const Complex seed(0.4, 0.9);
  for (std::size_t i = 0; i < d; ++i) z[i] = std::pow(seed, static_cast<double>(i));
  auto p = [&](Complex x) {
    Complex acc = 0.0;
    for (double ci : c) acc = acc * x + ci;
    return acc;
  };
  for (int it = 0; it < 500; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      z[i] -= p(z[i]) / denom;
    }
  }
  return z;
}

/// Companion matrix of the monic polynomial above.
inline Mat companion(const std::vector<double>& c) {
  const Index d = static_cast<Index>(c.size()) - 1;
  Mat m = Mat::Zero(d, d);
  for (Index i = 1; i < d; ++i) m(i, i - 1) = 1.0;
  for (Index i = 0; i < d; ++i) m(i, d - 1) = -c[static_cast<std::size_t>(d - i)];
  return m;
}

/// Classical Gram-Schmidt under a positive definite hermitian H, columns in
/// order.
inline CMat gram_schmidt(const CMat& cols, const CMat& h) {
  CMat out = cols;
  for (Index j = 0; j < cols.cols(); ++j) {
    for (Index k = 0; k < j; ++k) {
      const Complex c = (out.col(k).adjoint() * h * out.col(j))(0, 0);
      out.col(j) -= c * out.col(k);
    }
    const double nrm = std::sqrt((out.col(j).adjoint() * h * out.col(j))(0, 0).real());
    out.col(j) /= nrm;
  }
  return out;
}

/// Largest principal-angle sine between two column spans.
inline double span_distance(const CMat& a, const CMat& b) {
  const CMat qa = Eigen::HouseholderQR<CMat>(a).householderQ() * CMat::Identity(a.rows(), a.cols());
  const CMat qb = Eigen::HouseholderQR<CMat>(b).householderQ() * CMat::Identity(b.rows(), b.cols());
  const CMat r = qa - qb * (qb.adjoint() * qa);
  if (r.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMat>(r).singularValues()(0);
}

}  // namespace testsupport
