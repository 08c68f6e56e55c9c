#include "crreduce/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crreduce/random.hpp"

namespace crreduce {

namespace {

[[noreturn]] void mismatch(const std::string& what) {
  throw Error(ErrorKind::SignatureMismatch, what);
}

CMat conj(const CMat& m) { return m.conjugate(); }

CMat columns(const CMat& m, const std::vector<Index>& idx) {
  CMat out(m.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = m.col(idx[j]);
  return out;
}

// Solves Y from Y^T m = b, refusing badly conditioned systems.
CMat solve_duality(const CMat& m, const CMat& b, const Tolerances& tol) {
  Eigen::JacobiSVD<CMat> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() > 0 && sv(sv.size() - 1) <= tol.tau_rank * sv(0)) {
    throw Error(ErrorKind::NumericalFailure, "duality block is singular");
  }
  return m.transpose().fullPivLu().solve(b.transpose());
}

}  // namespace

std::pair<Subspace, Subspace> structure_eigenspaces(const Instance& inst, const Tolerances& tol) {
  validate(inst, tol);
  const Index dim = inst.dim();
  Subspace plus, minus;
  if (inst.mode == Mode::CR) {
    const CMat shifted =
        inst.structure.cast<Complex>() - Complex(0.0, 1.0) * CMat::Identity(dim, dim);
    plus = kernel_basis(shifted, tol);
    minus.basis = conj(plus.basis);
  } else {
    const Mat id = Mat::Identity(dim, dim);
    plus = kernel_basis(Mat(inst.structure - id), tol);
    minus = kernel_basis(Mat(inst.structure + id), tol);
  }
  if (plus.dim() != inst.n || minus.dim() != inst.n) {
    std::ostringstream msg;
    msg << "structure eigenspaces have dimensions " << plus.dim() << " and " << minus.dim()
        << ", expected " << inst.n;
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
  return {plus, minus};
}

std::vector<TargetSplit> build_target_split(Mode mode, const Subspace& l_plus,
                                            const Subspace& l_minus,
                                            const std::vector<QuadSpace>& quads,
                                            const DerivedTriple& tri, const Tolerances& tol) {
  const CMat gc = tri.g.cast<Complex>();
  const double gnorm = opnorm(tri.g);
  const double iso_plus = opnorm(CMat(l_plus.basis.transpose() * gc * l_plus.basis));
  const double iso_minus = opnorm(CMat(l_minus.basis.transpose() * gc * l_minus.basis));
  if (std::max(iso_plus, iso_minus) > tol.tau_verify * gnorm) {
    std::ostringstream msg;
    msg << "structure eigenspaces are not g-isotropic (residual "
        << std::max(iso_plus, iso_minus) << ")";
    throw Error(ErrorKind::InternalInconsistency, msg.str());
  }

  std::vector<TargetSplit> splits;
  const double root_half = std::sqrt(0.5);

  if (mode == Mode::CR) {
    const SignedBasis h = hermitian_orthonormalize(l_plus.basis, gc, tol);
    std::vector<Index> pos, neg;
    for (Index j = 0; j < static_cast<Index>(h.signs.size()); ++j) {
      (h.signs[j] > 0 ? pos : neg).push_back(j);
    }
    std::size_t next_pos = 0, next_neg = 0;
    auto take = [&](std::vector<Index>& pool, std::size_t& next, int count) {
      if (next + count > pool.size()) mismatch("h-signature of L+ exhausted before all quads were placed");
      std::vector<Index> idx(pool.begin() + next, pool.begin() + next + count);
      next += count;
      return idx;
    };

    for (const auto& q : quads) {
      TargetSplit t;
      t.alpha = q.alpha;
      if (q.pure_imaginary) {
        const int p = q.signature.p / 2, r = q.signature.q / 2;
        auto idx = take(pos, next_pos, p);
        const auto idx_neg = take(neg, next_neg, r);
        idx.insert(idx.end(), idx_neg.begin(), idx_neg.end());
        t.P.basis = columns(h.vectors, idx);
        t.signs.assign(p, 1);
        t.signs.insert(t.signs.end(), r, -1);
        t.P1 = t.P;
        t.P2.basis = CMat(l_plus.ambient_dim(), 0);
      } else {
        const int d = q.signature.p / 2;
        const CMat up = columns(h.vectors, take(pos, next_pos, d));
        const CMat um = columns(h.vectors, take(neg, next_neg, d));
        t.P.basis.resize(up.rows(), 2 * d);
        t.P.basis << up, um;
        t.signs.assign(d, 1);
        t.signs.insert(t.signs.end(), d, -1);
        t.P1.basis = root_half * (up + um);
        t.P2.basis = root_half * (up - um);
      }
      CMat full(t.P.basis.rows(), 2 * t.P.dim());
      full << t.P.basis, conj(t.P.basis);
      const Mat real = real_form(full, full.cols());
      t.q_real_signature = signature(Mat(real.transpose() * tri.g * real), tol);
      splits.push_back(std::move(t));
    }
    if (next_pos != pos.size() || next_neg != neg.size()) {
      mismatch("quad spaces do not exhaust the h-signature of L+");
    }
  } else {
    // E and F are real; the g-dual basis of F against the E basis fixes
    // where each D_{-alpha} lands.
    const Mat e_basis = l_plus.basis.real();
    const Mat f_basis = l_minus.basis.real();
    const Mat pairing = f_basis.transpose() * tri.g * e_basis;
    if (min_singular_value(pairing) <= tol.tau_rank * gnorm) {
      throw Error(ErrorKind::DegenerateForm, "g pairs E and F degenerately");
    }
    const Mat dual_all = f_basis * pairing.transpose().inverse();

    Index next = 0;
    for (const auto& q : quads) {
      TargetSplit t;
      t.alpha = q.alpha;
      const Index width = (q.signature.p + q.signature.q) / 2;
      if (next + width > e_basis.cols()) mismatch("E exhausted before all quads were placed");
      const Mat r = e_basis.middleCols(next, width);
      const Mat b = dual_all.middleCols(next, width);
      next += width;
      t.P.basis = r.cast<Complex>();
      if (q.members.size() == 2) {
        t.P1 = t.P;
        t.P2.basis = CMat(r.rows(), 0);
        t.dual.basis = b.cast<Complex>();
      } else {
        const Index d = width / 2;
        const Complex i(0.0, 1.0);
        t.P1.basis = root_half * (r.leftCols(d).cast<Complex>() + i * r.rightCols(d).cast<Complex>());
        t.P2.basis = conj(t.P1.basis);
        t.dual.basis = root_half * (b.leftCols(d).cast<Complex>() - i * b.rightCols(d).cast<Complex>());
      }
      Mat full(r.rows(), 2 * width);
      full << r, b;
      t.q_real_signature = signature(Mat(full.transpose() * tri.g * full), tol);
      splits.push_back(std::move(t));
    }
    if (next != e_basis.cols()) mismatch("quad spaces do not exhaust E");
  }

  for (std::size_t k = 0; k < quads.size(); ++k) {
    if (!(splits[k].q_real_signature == quads[k].signature)) {
      std::ostringstream msg;
      msg << "target signature (" << splits[k].q_real_signature.p << ","
          << splits[k].q_real_signature.q << ") differs from C_alpha signature ("
          << quads[k].signature.p << "," << quads[k].signature.q << ") at alpha = "
          << quads[k].alpha;
      mismatch(msg.str());
    }
  }
  return splits;
}

IsometryE build_isometry(const SpectralData& spec, const std::vector<QuadSpace>& quads,
                         const std::vector<TargetSplit>& splits, const DerivedTriple& tri,
                         Mode mode, std::uint64_t rng_seed, const Tolerances& tol) {
  Rng rng(rng_seed);
  const Index dim = spec.ambient_dim();
  const CMat gc = tri.g.cast<Complex>();
  const int count = static_cast<int>(spec.clusters.size());

  std::vector<CMat> source(count), image(count);
  auto basis = [&](int idx) -> const CMat& { return spec.clusters[idx].space.basis; };

  for (std::size_t k = 0; k < quads.size(); ++k) {
    const QuadSpace& q = quads[k];
    const TargetSplit& t = splits[k];
    const int a = q.alpha_idx, c = q.conj_idx, ng = q.neg_idx, nc = q.negconj_idx;

    if (mode == Mode::CR && q.pure_imaginary) {
      // Signed h-orthonormal basis of D_alpha onto that of P_alpha, sign for
      // sign, mixed by a random element of U(p) x U(q).
      const SignedBasis v = hermitian_orthonormalize(basis(a), gc, tol);
      const int p = v.positives(), r = v.negatives();
      const int tp = static_cast<int>(std::count(t.signs.begin(), t.signs.end(), 1));
      if (p != tp || r != static_cast<int>(t.signs.size()) - tp) {
        mismatch("h-signature of D_alpha differs from that of P_alpha");
      }
      CMat u = CMat::Zero(p + r, p + r);
      u.topLeftCorner(p, p) = random_unitary(p, rng);
      u.bottomRightCorner(r, r) = random_unitary(r, rng);
      source[a] = v.vectors;
      image[a] = t.P.basis * u;
      source[c] = conj(source[a]);
      image[c] = conj(image[a]);
      continue;
    }

    const Index d = spec.clusters[a].dim;
    const bool real_block = mode == Mode::Lagrangian && q.members.size() == 2;
    const CMat rmap = real_block ? CMat(random_well_conditioned(d, rng).cast<Complex>())
                                 : random_well_conditioned_complex(d, rng);
    // D_alpha -> P1 in any fashion.
    source[a] = basis(a);
    image[a] = t.P1.basis * rmap;
    // D_{-alpha} -> g-dual of P1, fixed by g(e v, e u) = g(v, u).
    const CMat& dual = mode == Mode::CR ? CMat(conj(t.P2.basis)) : t.dual.basis;
    const CMat m = dual.transpose() * gc * image[a];
    const CMat b = basis(ng).transpose() * gc * basis(a);
    source[ng] = basis(ng);
    image[ng] = dual * solve_duality(m, b, tol);
    if (!real_block) {
      // Conjugate halves.
      source[c] = conj(source[a]);
      image[c] = conj(image[a]);
      source[nc] = conj(source[ng]);
      image[nc] = conj(image[ng]);
    }
  }

  CMat src(dim, dim), img(dim, dim);
  Index col = 0;
  for (int i = 0; i < count; ++i) {
    if (source[i].cols() != spec.clusters[i].dim || image[i].cols() != spec.clusters[i].dim) {
      throw Error(ErrorKind::InternalInconsistency, "eigenspace left unmapped by the isometry");
    }
    src.middleCols(col, source[i].cols()) = source[i];
    img.middleCols(col, image[i].cols()) = image[i];
    col += source[i].cols();
  }

  IsometryE iso;
  iso.e = src.transpose().fullPivLu().solve(img.transpose()).transpose();
  const double enorm = std::max(1.0, opnorm(iso.e));
  iso.realness_residual = opnorm(Mat(iso.e.imag())) / enorm;
  iso.orthogonality_residual = opnorm(CMat(iso.e.transpose() * gc * iso.e - gc));
  iso.det = iso.e.determinant();

  const double gnorm = opnorm(tri.g);
  if (iso.realness_residual > tol.tau_verify) {
    std::ostringstream msg;
    msg << "isometry is not real (residual " << iso.realness_residual << ")";
    throw Error(ErrorKind::NumericalFailure, msg.str());
  }
  // Normwise: e^T g e loses accuracy in proportion to |e|^2.
  if (iso.orthogonality_residual > tol.tau_verify * gnorm * enorm * enorm) {
    std::ostringstream msg;
    msg << "isometry is not g-orthogonal (residual " << iso.orthogonality_residual << ")";
    throw Error(ErrorKind::NumericalFailure, msg.str());
  }
  return iso;
}

InducedStructure induce_structure(const CMat& e, const Instance& inst, const Tolerances& tol) {
  const CMat k = e.fullPivLu().solve(CMat(inst.structure.cast<Complex>() * e));
  InducedStructure out;
  out.K = k.real();
  out.imag_residual = opnorm(Mat(k.imag()));
  if (out.imag_residual > tol.tau_verify * std::max(1.0, opnorm(out.K))) {
    std::ostringstream msg;
    msg << "induced structure has imaginary part " << out.imag_residual;
    throw Error(ErrorKind::NumericalFailure, msg.str());
  }
  return out;
}

double structure_residual(Mode mode, const Mat& k) {
  const Mat id = Mat::Identity(k.rows(), k.cols());
  return mode == Mode::CR ? opnorm(Mat(k * k + id)) : opnorm(Mat(k * k - id));
}

double hermitian_residual(Mode mode, const Mat& omega, const Mat& k) {
  const Mat pulled = k.transpose() * omega * k;
  return mode == Mode::CR ? opnorm(Mat(pulled - omega)) : opnorm(Mat(pulled + omega));
}

ReductionResult reduce(const Instance& inst, std::uint64_t rng_seed, const Tolerances& tol) {
  const DerivedTriple tri = derive(inst, tol);
  ReductionResult res;
  res.seed_used = rng_seed;
  res.report = check_genericity(inst, tri, tol);
  if (!res.report.generic) {
    std::ostringstream msg;
    msg << "instance is not generic (omega_ok=" << res.report.omega_ok
        << ", nu_ok=" << res.report.nu_ok << ", min_im=" << res.report.min_im
        << ", min_re=" << res.report.min_re << ")";
    throw NotGenericError(res.report, msg.str());
  }

  const SpectralData spec = generalized_eigenspaces(tri.A, tol);
  const double gnorm = opnorm(tri.g);
  res.orthogonality_residual = verify_orthogonality(spec, tri.g, tol);
  if (res.orthogonality_residual > tol.tau_verify * gnorm) {
    std::ostringstream msg;
    msg << "generalized eigenspaces violate g-orthogonality (residual "
        << res.orthogonality_residual << ")";
    throw Error(ErrorKind::SpectralInconsistency, msg.str());
  }
  res.quads = group_quads(spec, inst.mode, tri.g, tol);
  const auto [l_plus, l_minus] = structure_eigenspaces(inst, tol);
  const auto splits = build_target_split(inst.mode, l_plus, l_minus, res.quads, tri, tol);
  res.e = build_isometry(spec, res.quads, splits, tri, inst.mode, rng_seed, tol);
  const InducedStructure k = induce_structure(res.e.e, inst, tol);
  res.K = k.K;
  res.imag_residual = k.imag_residual;

  res.residual_structure = structure_residual(inst.mode, res.K);
  res.residual_hermitian = hermitian_residual(inst.mode, inst.omega, res.K);
  res.residual_trace = inst.mode == Mode::Lagrangian ? std::abs(res.K.trace()) : 0.0;
  const double onorm = opnorm(inst.omega);
  auto fail = [](const char* what, double value) {
    std::ostringstream msg;
    msg << what << " residual " << value << " exceeds tolerance";
    throw Error(ErrorKind::NumericalFailure, msg.str());
  };
  if (res.residual_structure > tol.tau_verify) fail("structure", res.residual_structure);
  if (res.residual_hermitian > tol.tau_verify * onorm) fail("hermitian", res.residual_hermitian);
  if (res.residual_trace > tol.tau_verify * static_cast<double>(inst.dim())) {
    fail("trace", res.residual_trace);
  }
  return res;
}

Mat random_stabilizer(Mode mode, const Mat& structure, const Mat& g, std::uint64_t seed) {
  Rng rng(seed);
  const Index dim = g.rows();
  const Eigen::PartialPivLU<Mat> g_lu(g);
  const double sign = mode == Mode::CR ? -1.0 : 1.0;
  auto commuting = [&](const Mat& x) -> Mat { return 0.5 * (x + sign * structure * x * structure); };
  auto g_skew = [&](const Mat& x) -> Mat { return 0.5 * (x - g_lu.solve(Mat(x.transpose() * g))); };

  Mat x = random_gaussian(dim, dim, rng);
  for (int pass = 0; pass < 3; ++pass) x = g_skew(commuting(x));
  const double nrm = opnorm(x);
  if (nrm > 0.0) x *= 0.5 / nrm;
  const Mat id = Mat::Identity(dim, dim);
  // Cayley transform of an element of the stabilizer algebra.
  return (id - x).partialPivLu().solve(Mat(id + x));
}

UniquenessReport verify_uniqueness(const Instance& inst, const std::vector<std::uint64_t>& seeds,
                                   const Tolerances& tol) {
  if (seeds.empty()) throw Error(ErrorKind::InvalidInput, "no seeds given");
  UniquenessReport rep;
  std::vector<ReductionResult> runs;
  for (auto seed : seeds) {
    runs.push_back(reduce(inst, seed, tol));
    rep.structures.push_back(runs.back().K);
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      rep.max_pairwise_distance =
          std::max(rep.max_pairwise_distance, opnorm(Mat(runs[i].K - runs[j].K)));
    }
  }

  const DerivedTriple tri = derive(inst, tol);
  const Mat f = random_stabilizer(inst.mode, inst.structure, tri.g, seeds.front() ^ 0x5eedULL);
  const CMat shifted = f.cast<Complex>() * runs.front().e.e;
  const InducedStructure k = induce_structure(shifted, inst, tol);
  rep.stabilizer_distance = opnorm(Mat(k.K - runs.front().K));

  const double limit = 10.0 * tol.tau_verify;
  if (rep.max_pairwise_distance > limit || rep.stabilizer_distance > limit) {
    std::ostringstream msg;
    msg << "induced structure depends on choices (seed distance " << rep.max_pairwise_distance
        << ", stabilizer distance " << rep.stabilizer_distance << ")";
    throw Error(ErrorKind::UniquenessViolation, msg.str());
  }
  return rep;
}

}  // namespace crreduce
