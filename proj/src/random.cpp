#include "crreduce/random.hpp"

namespace crreduce {

Mat random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

CMat random_complex_gaussian(Index rows, Index cols, Rng& rng) {
  const Mat re = random_gaussian(rows, cols, rng);
  const Mat im = random_gaussian(rows, cols, rng);
  CMat m(rows, cols);
  m.real() = re;
  m.imag() = im;
  return m;
}

namespace {

// Fix the column phases of Q so the distribution is Haar.
template <typename MatrixT>
MatrixT haar_q(const MatrixT& gauss) {
  Eigen::HouseholderQR<MatrixT> qr(gauss);
  MatrixT q = qr.householderQ();
  const MatrixT r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index j = 0; j < q.cols(); ++j) {
    const auto d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

Mat random_orthogonal(Index m, Rng& rng) { return haar_q<Mat>(random_gaussian(m, m, rng)); }

CMat random_unitary(Index m, Rng& rng) { return haar_q<CMat>(random_complex_gaussian(m, m, rng)); }

Mat random_well_conditioned(Index m, Rng& rng, double spread) {
  std::uniform_real_distribution<double> uniform(-spread, spread);
  Eigen::VectorXd s(m);
  for (Index i = 0; i < m; ++i) s(i) = std::exp(uniform(rng));
  const Mat q1 = random_orthogonal(m, rng);
  const Mat q2 = random_orthogonal(m, rng);
  return q1 * s.asDiagonal() * q2;
}

CMat random_well_conditioned_complex(Index m, Rng& rng, double spread) {
  std::uniform_real_distribution<double> uniform(-spread, spread);
  Eigen::VectorXd s(m);
  for (Index i = 0; i < m; ++i) s(i) = std::exp(uniform(rng));
  const CMat q1 = random_unitary(m, rng);
  const CMat q2 = random_unitary(m, rng);
  return q1 * s.cast<Complex>().asDiagonal() * q2;
}

}  // namespace crreduce
