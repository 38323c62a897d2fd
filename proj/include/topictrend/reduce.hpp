#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "topictrend/matrix.hpp"

namespace topictrend::reduce {

// Linear projection learnt by principal component analysis.
struct Projection {
  std::vector<double> mean;                      // d
  Matrix basis;                                  // d x k, orthonormal columns
  std::vector<double> explained_variance_ratio;  // k, non-increasing
  bool degenerate = false;                       // input had zero variance

  std::size_t input_dim() const { return basis.rows(); }
  std::size_t components() const { return basis.cols(); }
};

// Top-k eigenvectors of the sample covariance. Each basis column is signed so
// its largest-magnitude entry (lowest index on ties) is non-negative.
// Throws Error(invalid_argument) for n < 2 or k outside [1, min(n, d)].
Projection pca_fit(const Matrix& x, std::size_t k);

// (x - mean) * basis. Throws Error(dimension_mismatch) on a column mismatch.
Matrix pca_transform(const Projection& p, const Matrix& x);

// Reducer contract used by the pipeline, so other reducers can be dropped in.
class Reducer {
 public:
  virtual ~Reducer() = default;
  virtual Matrix fit_transform(const Matrix& x) = 0;
  virtual Matrix transform(const Matrix& x) const = 0;
};

class PcaReducer final : public Reducer {
 public:
  explicit PcaReducer(std::size_t components) : components_(components) {}
  Matrix fit_transform(const Matrix& x) override;
  Matrix transform(const Matrix& x) const override;
  const Projection& projection() const { return projection_; }

 private:
  std::size_t components_;
  Projection projection_;
};

}  // namespace topictrend::reduce
