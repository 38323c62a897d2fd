#include "topictrend/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "topictrend/error.hpp"
#include "topictrend/kernels.hpp"

namespace topictrend::reduce {

Projection pca_fit(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n < 2) throw Error(Errc::invalid_argument, "PCA needs at least 2 rows");
  if (k == 0 || k > std::min(n, d))
    throw Error(Errc::invalid_argument, "PCA components k=" + std::to_string(k) +
                                            " must be in [1, min(n, d)=" +
                                            std::to_string(std::min(n, d)) + "]");

  Projection p;
  p.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) p.mean[c] += x(i, c);
  for (auto& m : p.mean) m /= static_cast<double>(n);

  Matrix centred(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) centred(i, c) = x(i, c) - p.mean[c];
  const Matrix cov = kernels::parallel::covariance(centred);

  double total = 0.0;
  for (std::size_t c = 0; c < d; ++c) total += cov(c, c);

  p.basis = Matrix(d, k);
  p.explained_variance_ratio.assign(k, 0.0);
  if (total <= 0.0) {
    p.degenerate = true;
    for (std::size_t j = 0; j < k; ++j) p.basis(j, j) = 1.0;
    return p;
  }

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> cov_map(
      cov.data().data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov_map);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::invalid_argument, "covariance eigendecomposition did not converge");

  // Eigen returns ascending eigenvalues; walk from the top.
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  for (std::size_t j = 0; j < k; ++j) {
    const auto src = static_cast<Eigen::Index>(d - 1 - j);
    std::size_t argmax = 0;
    for (std::size_t c = 1; c < d; ++c) {
      if (std::abs(vectors(static_cast<Eigen::Index>(c), src)) >
          std::abs(vectors(static_cast<Eigen::Index>(argmax), src)))
        argmax = c;
    }
    const double sign = vectors(static_cast<Eigen::Index>(argmax), src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < d; ++c)
      p.basis(c, j) = sign * vectors(static_cast<Eigen::Index>(c), src);
    p.explained_variance_ratio[j] = std::clamp(values(src) / total, 0.0, 1.0);
  }
  return p;
}

Matrix pca_transform(const Projection& p, const Matrix& x) {
  if (x.cols() != p.input_dim())
    throw Error(Errc::dimension_mismatch, "PCA transform expects " + std::to_string(p.input_dim()) +
                                              " columns, got " + std::to_string(x.cols()));
  return kernels::parallel::project(x, p.mean, p.basis);
}

Matrix PcaReducer::fit_transform(const Matrix& x) {
  projection_ = pca_fit(x, components_);
  return pca_transform(projection_, x);
}

Matrix PcaReducer::transform(const Matrix& x) const { return pca_transform(projection_, x); }

}  // namespace topictrend::reduce
