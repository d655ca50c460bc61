#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "toepcov/error.hpp"
#include "toepcov/masks.hpp"
#include "toepcov/toeplitz.hpp"

namespace toepcov {

/// n observations of a p-variate vector, row-major.
class SampleMatrix {
 public:
  SampleMatrix(std::size_t n, std::size_t p, std::vector<double> rows) : n_(n), p_(p), x_(std::move(rows)) {
    if (n == 0 || p == 0) throw Error(ErrorCode::BadParams, "sample matrix needs n >= 1 and p >= 1");
    if (x_.size() != n * p) throw Error(ErrorCode::DimensionMismatch, "sample data must have n*p values");
    for (double v : x_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::BadParams, "sample entries must be finite");
    }
  }

  std::size_t samples() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return p_; }
  std::span<const double> row(std::size_t i) const { return std::span<const double>(x_).subspan(i * p_, p_); }
  std::span<const double> data() const noexcept { return x_; }
  double operator()(std::size_t i, std::size_t j) const { return x_[i * p_ + j]; }

  friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> x_;
};

/// (1/n) sum_i X_i X_i^T, optionally after subtracting the sample mean
/// (normalization stays 1/n).
inline DenseSymmetric sample_covariance(const SampleMatrix& x, bool center = false) {
  const std::size_t n = x.samples();
  const std::size_t p = x.dimension();
  if (center && n < 2) throw Error(ErrorCode::TooFewSamples, "centering needs n >= 2");

  std::vector<double> mean(p, 0.0);
  if (center) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) mean[j] += x(i, j);
    }
    for (double& m : mean) m /= static_cast<double>(n);
  }

  // Accumulate the lower triangle, then mirror.
  std::vector<double> acc(p * p, 0.0);
  std::vector<double> xi(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) xi[j] = x(i, j) - mean[j];
    for (std::size_t s = 0; s < p; ++s) {
      const double xs = xi[s];
      double* out = acc.data() + s * p;
      for (std::size_t t = 0; t <= s; ++t) out[t] += xs * xi[t];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  DenseSymmetric cov(p);
  for (std::size_t s = 0; s < p; ++s) {
    for (std::size_t t = 0; t <= s; ++t) cov.set(s, t, acc[s * p + t] * inv_n);
  }
  return cov;
}

/// s~_r = (1/(p-r)) sum_{s-t=r} A[s][t]
inline ToeplitzMatrix diagonal_average(const DenseSymmetric& a) {
  const std::size_t p = a.size();
  std::vector<double> row(p, 0.0);
  for (std::size_t r = 0; r < p; ++r) {
    double acc = 0.0;
    for (std::size_t t = 0; t + r < p; ++t) acc += a(t + r, t);
    row[r] = acc / static_cast<double>(p - r);
  }
  return ToeplitzMatrix(std::move(row));
}

/// M · diagonal_average(sample_covariance(X)).
inline ToeplitzMatrix masked_toeplitz_estimate(const SampleMatrix& x, const ToeplitzMask& m, bool center = false) {
  if (m.size() != x.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "mask p=" + std::to_string(m.size()) + " vs sample p=" + std::to_string(x.dimension()));
  }
  return apply_mask(m, diagonal_average(sample_covariance(x, center)));
}

/// Spectral norm of A - B.
inline double estimation_error(const ToeplitzMatrix& a, const ToeplitzMatrix& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "estimation_error: sizes differ");
  return spectral_norm_exact(a - b);
}

inline double estimation_error(const DenseSymmetric& a, const DenseSymmetric& b) {
  return spectral_norm_exact(a - b);
}

}  // namespace toepcov
