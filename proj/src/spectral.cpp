#include "crreduce/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace crreduce {

namespace {

[[noreturn]] void inconsistent(const std::string& what) {
  throw Error(ErrorKind::SpectralInconsistency, what);
}

int nearest(const std::vector<EigenvalueCluster>& clusters, Complex target, double radius) {
  int best = -1;
  double best_gap = radius;
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    const double gap = std::abs(clusters[j].value - target);
    if (gap <= best_gap) {
      best_gap = gap;
      best = static_cast<int>(j);
    }
  }
  return best;
}

// Invariant subspace for one cluster: the m smallest right singular vectors
// of ((A - alpha) / scale)^k for the lowest k that makes the m-th smallest
// singular value negligible. Higher powers shrink the gap to neighbouring
// clusters, so k stays as small as possible. Falls back to the product over
// the raw eigenvalues.
CMat cluster_kernel(const Mat& a, const EigenvalueCluster& c, double scale,
                    const Tolerances& tol) {
  const Index dim = a.rows();
  const Index m = c.multiplicity;
  const CMat ac = a.cast<Complex>() / scale;
  const CMat id = CMat::Identity(dim, dim);
  for (Index k = 1; k <= m; ++k) {
    // A few Rayleigh-quotient refinements of the shift; the solver's
    // eigenvalues are not accurate enough when clusters are close.
    Complex shift = c.value / scale;
    CMat basis;
    bool ok = true;
    for (int pass = 0; pass < 3 && ok; ++pass) {
      const CMat shifted = ac - shift * id;
      CMat power = id;
      for (Index j = 0; j < k; ++j) power = power * shifted;
      Eigen::JacobiSVD<CMat> svd(power, Eigen::ComputeFullV);
      ok = svd.singularValues()(dim - m) <= tol.tau_eig * static_cast<double>(m);
      basis = svd.matrixV().rightCols(m);
      shift = (basis.adjoint() * ac * basis).trace() / static_cast<double>(m);
    }
    if (ok) return basis;
  }
  CMat prod = id;
  for (const Complex& lambda : c.raw) prod = prod * (ac - (lambda / scale) * id);
  Eigen::JacobiSVD<CMat> svd(prod, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(m);
}

}  // namespace

SpectralData generalized_eigenspaces(const Mat& A, const Tolerances& tol) {
  const auto clusters = eig_clusters(A, tol);
  const Index dim = A.rows();
  SpectralData spec;
  spec.scale = spectral_scale(A);
  const double radius = tol.tau_eig * spec.scale;

  for (const auto& c : clusters) {
    if (std::abs(c.value) <= radius) inconsistent("0 is an eigenvalue of A");
  }

  const int count = static_cast<int>(clusters.size());
  spec.conj_of.assign(count, -1);
  spec.neg_of.assign(count, -1);
  for (int i = 0; i < count; ++i) {
    spec.conj_of[i] = nearest(clusters, std::conj(clusters[i].value), radius);
    spec.neg_of[i] = nearest(clusters, -clusters[i].value, radius);
    if (spec.conj_of[i] < 0) inconsistent("eigenvalue set not closed under conjugation");
    if (spec.neg_of[i] < 0) {
      std::ostringstream msg;
      msg << "no negation partner for eigenvalue " << clusters[i].value
          << " (A is not g-skew)";
      inconsistent(msg.str());
    }
    if (i <= spec.conj_of[i]) spec.conjugation_pairs.emplace_back(i, spec.conj_of[i]);
    if (i <= spec.neg_of[i]) spec.negation_pairs.emplace_back(i, spec.neg_of[i]);
  }

  spec.clusters.resize(count);
  for (int i = 0; i < count; ++i) {
    const auto& c = clusters[i];
    auto& out = spec.clusters[i];
    out.alpha = c.value;
    out.dim = c.multiplicity;
    out.raw = c.raw;
    if (spec.conj_of[i] == i) {
      out.space.basis = real_form(cluster_kernel(A, c, spec.scale, tol), c.multiplicity).cast<Complex>();
    } else if (c.value.imag() > 0.0) {
      out.space.basis = cluster_kernel(A, c, spec.scale, tol);
    }
  }
  for (int i = 0; i < count; ++i) {
    if (spec.conj_of[i] != i && clusters[i].value.imag() < 0.0) {
      spec.clusters[i].space.basis = spec.clusters[spec.conj_of[i]].space.basis.conjugate();
    }
  }

  Index total = 0;
  const CMat ac = A.cast<Complex>();
  for (auto& c : spec.clusters) {
    total += c.dim;
    const CMat& b = c.space.basis;
    const CMat restricted = b.adjoint() * ac * b;
    if (opnorm(CMat(ac * b - b * restricted)) > tol.tau_eig * spec.scale) {
      inconsistent("generalized eigenspace is not A-invariant within tolerance");
    }
    // Nilpotency index of (A - alpha) on D_alpha.
    const CMat nil = (restricted - c.alpha * CMat::Identity(c.dim, c.dim)) / spec.scale;
    CMat power = nil;
    c.chain_depth = 0;
    for (int k = 1; k <= 2 * static_cast<int>(dim); ++k) {
      if (opnorm(power) <= tol.tau_eig) {
        c.chain_depth = k;
        break;
      }
      power = power * nil;
    }
    if (c.chain_depth == 0) inconsistent("Jordan chain depth exceeds 2n");
  }
  if (total != dim) inconsistent("generalized eigenspace dimensions do not sum to 2n");
  for (int i = 0; i < count; ++i) {
    if (spec.clusters[spec.neg_of[i]].dim != spec.clusters[i].dim ||
        spec.clusters[spec.conj_of[i]].dim != spec.clusters[i].dim) {
      inconsistent("paired eigenspaces have different dimensions");
    }
  }
  return spec;
}

double verify_orthogonality(const SpectralData& spec, const Mat& g, const Tolerances& tol) {
  const CMat gc = g.cast<Complex>();
  const double gnorm = opnorm(g);
  double worst = 0.0;
  const int count = static_cast<int>(spec.clusters.size());
  for (int i = 0; i < count; ++i) {
    const CMat& bi = spec.clusters[i].space.basis;
    for (int j = 0; j < count; ++j) {
      const CMat& bj = spec.clusters[j].space.basis;
      const CMat pairing = bi.transpose() * gc * bj;
      if (j == spec.neg_of[i]) {
        if (min_singular_value(pairing) <= tol.tau_rank * gnorm) {
          inconsistent("g pairs D_alpha and D_-alpha degenerately");
        }
      } else {
        worst = std::max(worst, opnorm(pairing));
      }
    }
  }
  return worst;
}

bool is_representative(Complex alpha, Mode mode, double radius) {
  if (mode == Mode::CR) return alpha.imag() > radius && alpha.real() >= -radius;
  return alpha.real() < -radius && alpha.imag() >= -radius;
}

std::vector<QuadSpace> group_quads(const SpectralData& spec, Mode mode, const Mat& g,
                                   const Tolerances& tol) {
  const double radius = tol.tau_eig * spec.scale;
  const int count = static_cast<int>(spec.clusters.size());
  std::vector<int> owner(count, -1);
  std::vector<QuadSpace> quads;

  for (int i = 0; i < count; ++i) {
    const Complex alpha = spec.clusters[i].alpha;
    if (!is_representative(alpha, mode, radius)) continue;
    QuadSpace q;
    q.alpha = alpha;
    q.alpha_idx = i;
    q.conj_idx = spec.conj_of[i];
    q.neg_idx = spec.neg_of[i];
    q.negconj_idx = spec.neg_of[q.conj_idx];
    q.pure_imaginary = std::abs(alpha.real()) <= radius;

    std::set<int> seen;
    for (int idx : {q.alpha_idx, q.conj_idx, q.neg_idx, q.negconj_idx}) {
      if (!seen.insert(idx).second) continue;
      if (owner[idx] >= 0) inconsistent("eigenvalue cluster assigned to two quad spaces");
      owner[idx] = static_cast<int>(quads.size());
      q.members.push_back(idx);
    }

    Index d = 0;
    for (int idx : q.members) d += spec.clusters[idx].dim;
    CMat stacked(spec.ambient_dim(), d);
    Index col = 0;
    for (int idx : q.members) {
      const CMat& b = spec.clusters[idx].space.basis;
      stacked.middleCols(col, b.cols()) = b;
      col += b.cols();
    }
    q.complex_space.basis = orthonormalize(stacked, d);
    q.real_basis = real_form(stacked, d);
    q.signature = signature(Mat(q.real_basis.transpose() * g * q.real_basis), tol);

    std::ostringstream where;
    where << " for quad space alpha = " << alpha;
    if (q.signature.p + q.signature.q != d) inconsistent("real form has wrong dimension" + where.str());
    if (!q.pure_imaginary && q.signature.p != q.signature.q) {
      inconsistent("signature is not split" + where.str());
    }
    if (q.members.size() == 4 && (q.signature.p % 2 != 0)) {
      inconsistent("split signature is not of the form (2p, 2p)" + where.str());
    }
    if (q.pure_imaginary && (q.signature.p % 2 != 0 || q.signature.q % 2 != 0)) {
      inconsistent("signature is not of the form (2p, 2q)" + where.str());
    }
    quads.push_back(std::move(q));
  }

  for (int i = 0; i < count; ++i) {
    if (owner[i] < 0) {
      std::ostringstream msg;
      msg << "eigenvalue " << spec.clusters[i].alpha << " belongs to no quad space";
      inconsistent(msg.str());
    }
  }
  return quads;
}

}  // namespace crreduce
