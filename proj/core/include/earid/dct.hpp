#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace earid {

// Orthonormal DCT-II and its inverse (DCT-III) for a fixed length, via a
// cached cosine table. forward(inverse(x)) == x and the basis rows are
// orthonormal, which makes truncation an orthogonal projection.
class DctPlan {
 public:
  explicit DctPlan(std::size_t n);

  std::size_t size() const { return n_; }

  // y[j] = s_j * sum_i x[i] * cos(pi * (2i+1) * j / (2n)),
  // s_0 = sqrt(1/n), s_j = sqrt(2/n) for j > 0.
  std::vector<double> forward(std::span<const double> x) const;

  // Inverse transform: x[i] = sum_j s_j * y[j] * cos(pi * (2i+1) * j / (2n)).
  std::vector<double> inverse(std::span<const double> y) const;

  // Row j of the orthonormal forward matrix (used by tests to build inputs
  // with a known single-coefficient transform).
  std::vector<double> basis_row(std::size_t j) const;

 private:
  std::size_t n_;
  std::vector<double> cos_table_;  // cos_table_[j * n_ + i]
  std::vector<double> scale_;      // s_j
};

}  // namespace earid
