#include "crreduce/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace crreduce {

const char* to_string(Mode mode) {
  return mode == Mode::CR ? "cr" : "lagrangian";
}

void Tolerances::validate() const {
  if (!(tau_rank > 0.0) || !(tau_eig > 0.0) || !(tau_verify > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "tolerances must be strictly positive");
  }
  if (tau_verify < tau_rank) {
    throw Error(ErrorKind::InvalidInput, "tau_verify must be >= tau_rank");
  }
}

int SignedBasis::positives() const {
  return static_cast<int>(std::count(signs.begin(), signs.end(), 1));
}

int SignedBasis::negatives() const {
  return static_cast<int>(std::count(signs.begin(), signs.end(), -1));
}

double spectral_scale(const Mat& a) {
  const double s = opnorm(a);
  return s > 0.0 ? s : 1.0;
}

Subspace kernel_basis(const CMat& m, const Tolerances& tol) {
  if (!m.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite matrix entries");
  const Index cols = m.cols();
  if (m.rows() == 0 || cols == 0) return Subspace{CMat::Identity(cols, cols)};

  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv(0);
  if (top == 0.0) return Subspace{CMat::Identity(cols, cols)};

  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol.tau_rank * top) ++rank;
  }
  return Subspace{svd.matrixV().rightCols(cols - rank)};
}

Subspace kernel_basis(const Mat& m, const Tolerances& tol) {
  if (!m.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite matrix entries");
  const Index cols = m.cols();
  if (m.rows() == 0 || cols == 0) return Subspace{CMat::Identity(cols, cols)};

  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return Subspace{CMat::Identity(cols, cols)};
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol.tau_rank * sv(0)) ++rank;
  }
  return Subspace{svd.matrixV().rightCols(cols - rank).cast<Complex>()};
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool by_re_im(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::vector<EigenvalueCluster> eig_clusters(const Mat& a, const Tolerances& tol) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidInput, "eig_clusters: matrix not square");
  if (!a.allFinite()) throw Error(ErrorKind::InvalidInput, "eig_clusters: non-finite entries");
  const int dim = static_cast<int>(a.rows());
  if (dim == 0) return {};

  Eigen::EigenSolver<Mat> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalFailure, "eigenvalue solver did not converge");
  }
  const Eigen::VectorXcd raw = solver.eigenvalues();
  const double radius = tol.tau_eig * spectral_scale(a);

  DisjointSets sets(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      if (std::abs(raw(i) - raw(j)) <= radius) sets.unite(i, j);
    }
  }

  std::vector<EigenvalueCluster> clusters;
  std::vector<int> slot(dim, -1);
  for (int i = 0; i < dim; ++i) {
    const int root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    auto& c = clusters[slot[root]];
    c.raw.push_back(raw(i));
    c.value += raw(i);
    ++c.multiplicity;
  }
  for (auto& c : clusters) c.value /= static_cast<double>(c.multiplicity);

  // Pair every cluster with its conjugate partner and symmetrize.
  std::vector<bool> done(clusters.size(), false);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (done[i]) continue;
    int best = -1;
    double best_gap = radius;
    for (std::size_t j = i; j < clusters.size(); ++j) {
      if (done[j] || clusters[j].multiplicity != clusters[i].multiplicity) continue;
      const double gap = std::abs(clusters[i].value - std::conj(clusters[j].value));
      if (gap <= best_gap) {
        best_gap = gap;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) {
      std::ostringstream msg;
      msg << "no conjugate partner for eigenvalue cluster " << clusters[i].value;
      throw Error(ErrorKind::NumericalFailure, msg.str());
    }
    if (static_cast<std::size_t>(best) == i) {
      clusters[i].value = Complex(clusters[i].value.real(), 0.0);
    } else {
      const Complex mid = 0.5 * (clusters[i].value + std::conj(clusters[best].value));
      clusters[i].value = mid;
      clusters[best].value = std::conj(mid);
    }
    done[i] = done[best] = true;
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const EigenvalueCluster& x, const EigenvalueCluster& y) {
              return by_re_im(x.value, y.value);
            });
  return clusters;
}

Signature signature(const Mat& g, const Tolerances& tol) {
  if (g.rows() != g.cols()) throw Error(ErrorKind::InvalidInput, "signature: matrix not square");
  if (g.size() == 0) return {};
  const double scale = opnorm(g);
  if (opnorm(Mat(g - g.transpose())) > tol.tau_verify * scale) {
    throw Error(ErrorKind::InvalidInput, "signature: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  Signature s;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda > tol.tau_rank * scale) {
      ++s.p;
    } else if (lambda < -tol.tau_rank * scale) {
      ++s.q;
    } else {
      std::ostringstream msg;
      msg << "symmetric form has eigenvalue " << lambda << " inside the dead zone";
      throw Error(ErrorKind::DegenerateForm, msg.str());
    }
  }
  return s;
}

SignedBasis hermitian_orthonormalize(const CMat& cols, const CMat& h, const Tolerances& tol) {
  // Relative level below which a leading column counts as isotropic and is
  // swapped or combined with a partner.
  constexpr double kPivot = 1e-2;

  const Index d = cols.cols();
  const double hnorm = opnorm(h);
  CMat work = cols;
  CMat out(cols.rows(), d);
  std::vector<int> signs(d);

  auto pair = [&](const auto& u, const auto& w) { return (u.adjoint() * h * w)(0, 0); };

  for (Index k = 0; k < d; ++k) {
    for (Index j = k; j < d; ++j) {
      for (Index i = 0; i < k; ++i) {
        work.col(j) -= double(signs[i]) * pair(out.col(i), work.col(j)) * out.col(i);
      }
    }

    auto is_isotropic = [&](Index j) {
      const double nrm2 = work.col(j).squaredNorm();
      return std::abs(pair(work.col(j), work.col(j)).real()) <= kPivot * nrm2 * hnorm;
    };
    if (is_isotropic(k)) {
      Index swap_with = -1;
      for (Index j = k + 1; j < d && swap_with < 0; ++j) {
        if (!is_isotropic(j)) swap_with = j;
      }
      if (swap_with >= 0) {
        work.col(k).swap(work.col(swap_with));
      } else {
        Index partner = -1;
        double best = 0.0;
        for (Index j = k + 1; j < d; ++j) {
          const double c = std::abs(pair(work.col(k), work.col(j)));
          if (c > best) {
            best = c;
            partner = j;
          }
        }
        if (partner >= 0 &&
            best > tol.tau_rank * work.col(k).norm() * work.col(partner).norm() * hnorm) {
          const Complex c = std::conj(pair(work.col(k), work.col(partner))) / best;
          work.col(k) += c * work.col(partner);
        }
      }
    }

    const double self = pair(work.col(k), work.col(k)).real();
    if (std::abs(self) <= tol.tau_rank * work.col(k).squaredNorm() * hnorm || self == 0.0) {
      throw Error(ErrorKind::DegenerateForm, "hermitian pairing is degenerate on the span");
    }
    signs[k] = self > 0.0 ? 1 : -1;
    out.col(k) = work.col(k) / std::sqrt(std::abs(self));
  }

  // Positive vectors first, otherwise keep the processing order.
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_partition(order.begin(), order.end(), [&](Index i) { return signs[i] > 0; });
  SignedBasis result;
  result.vectors.resize(cols.rows(), d);
  result.signs.resize(d);
  for (Index i = 0; i < d; ++i) {
    result.vectors.col(i) = out.col(order[i]);
    result.signs[i] = signs[order[i]];
  }

  // Two first-order corrections U <- U (I - S E / 2) with E = U^* H U - S.
  Eigen::VectorXd s(d);
  for (Index i = 0; i < d; ++i) s(i) = result.signs[i];
  for (int pass = 0; pass < 2; ++pass) {
    CMat e = result.vectors.adjoint() * h * result.vectors;
    e.diagonal() -= s.cast<Complex>();
    result.vectors = result.vectors * (CMat::Identity(d, d) - 0.5 * s.cast<Complex>().asDiagonal() * e);
  }
  return result;
}

Mat real_form(const CMat& b, Index dim) {
  Mat stacked(b.rows(), 2 * b.cols());
  stacked << b.real(), b.imag();
  if (dim == 0 || stacked.cols() == 0) return Mat(b.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(dim);
}

CMat orthonormalize(const CMat& b, Index dim) {
  if (dim == 0 || b.cols() == 0) return CMat(b.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(b, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(dim);
}

double subspace_distance(const CMat& a, const CMat& b) {
  if (a.cols() == 0) return 0.0;
  const CMat qa = orthonormalize(a, a.cols());
  const CMat qb = orthonormalize(b, b.cols());
  return opnorm(CMat(qa - qb * (qb.adjoint() * qa)));
}

namespace {

template <int Sign>
Mat newton_sign(const Mat& x, const char* what) {
  const Index m = x.rows();
  if (m == 0) return x;
  Mat cur = x;
  bool scaling = true;
  bool finishing = false;
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::PartialPivLU<Mat> lu(cur);
    const double det = lu.determinant();
    if (!std::isfinite(det) || det == 0.0) break;
    double mu = 1.0;
    if (scaling) mu = std::pow(std::abs(det), -1.0 / static_cast<double>(m));
    const Mat next = 0.5 * (mu * cur + Sign * lu.inverse() / mu);
    const double change = opnorm(Mat(next - cur));
    cur = next;
    if (change <= 1e-3 * opnorm(cur)) scaling = false;
    // Quadratic convergence: one more step after 1e-9 lands at rounding level.
    if (finishing) return cur;
    if (change <= 1e-9 * opnorm(cur)) finishing = true;
  }
  throw Error(ErrorKind::NumericalFailure, what);
}

}  // namespace

Mat complex_structure_part(const Mat& x) {
  return newton_sign<-1>(x, "complex-structure iteration did not converge (real eigenvalue?)");
}

Mat involution_part(const Mat& x) {
  return newton_sign<1>(x, "sign iteration did not converge (imaginary eigenvalue?)");
}

}  // namespace crreduce
