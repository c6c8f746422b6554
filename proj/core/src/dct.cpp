#include "earid/dct.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace earid {

DctPlan::DctPlan(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("DctPlan: size must be positive");
  cos_table_.resize(n * n);
  scale_.resize(n);
  const double nd = static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    scale_[j] = std::sqrt((j == 0 ? 1.0 : 2.0) / nd);
    for (std::size_t i = 0; i < n; ++i) {
      cos_table_[j * n + i] =
          std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                   static_cast<double>(j) / (2.0 * nd));
    }
  }
}

std::vector<double> DctPlan::forward(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("DctPlan::forward: size mismatch");
  std::vector<double> y(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const double* row = &cos_table_[j * n_];
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) acc += x[i] * row[i];
    y[j] = scale_[j] * acc;
  }
  return y;
}

std::vector<double> DctPlan::inverse(std::span<const double> y) const {
  if (y.size() != n_) throw std::invalid_argument("DctPlan::inverse: size mismatch");
  std::vector<double> x(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const double w = scale_[j] * y[j];
    if (w == 0.0) continue;
    const double* row = &cos_table_[j * n_];
    for (std::size_t i = 0; i < n_; ++i) x[i] += w * row[i];
  }
  return x;
}

std::vector<double> DctPlan::basis_row(std::size_t j) const {
  if (j >= n_) throw std::invalid_argument("DctPlan::basis_row: index out of range");
  std::vector<double> row(n_);
  for (std::size_t i = 0; i < n_; ++i) row[i] = scale_[j] * cos_table_[j * n_ + i];
  return row;
}

}  // namespace earid
