#pragma once

/** @file
 * Symmetric Toeplitz and circulant matrices, their spectral densities, and
 * the circulant-extension projection onto positive semidefinite Toeplitz
 * matrices.
 *
 * A symmetric Toeplitz matrix T with first row (s_0, ..., s_{p-1}) has the
 * spectral density
 *
 *     f(x) = s_0 + 2 * sum_{r=1}^{p-1} s_r cos(r x),    x in [-pi, pi],
 *
 * and ||T|| <= ||f||_inf <= 2 max_k |f(x_k)| on the 4p-point grid
 * x_k = (k - 2p) pi / (2p), k = 1..4p, which samples one full period.
 * (Spacing pi / (4p) would only reach [-pi/2, pi/2], where f need not
 * attain its supremum.)
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "toepcov/detail/lapack_eigen.hpp"
#include "toepcov/error.hpp"

namespace toepcov {

class DenseSymmetric;

/// Symmetric Toeplitz matrix stored by its first row.
class ToeplitzMatrix {
 public:
  explicit ToeplitzMatrix(std::vector<double> first_row) : row_(std::move(first_row)) {
    if (row_.empty()) throw Error(ErrorCode::BadParams, "Toeplitz matrix needs p >= 1");
    for (double v : row_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::BadParams, "Toeplitz entries must be finite");
    }
  }

  static ToeplitzMatrix identity(std::size_t p, double scale = 1.0) {
    std::vector<double> row(p, 0.0);
    if (p > 0) row[0] = scale;
    return ToeplitzMatrix(std::move(row));
  }

  std::size_t size() const noexcept { return row_.size(); }
  std::span<const double> first_row() const noexcept { return row_; }
  double lag(std::size_t r) const { return row_[r]; }
  double operator()(std::size_t s, std::size_t t) const { return row_[s > t ? s - t : t - s]; }

  /// Largest lag with a nonzero entry (0 for diagonal matrices).
  std::size_t bandwidth() const noexcept {
    std::size_t b = row_.size() - 1;
    while (b > 0 && row_[b] == 0.0) --b;
    return b;
  }

  DenseSymmetric dense() const;

  friend bool operator==(const ToeplitzMatrix&, const ToeplitzMatrix&) = default;

 private:
  std::vector<double> row_;
};

inline ToeplitzMatrix operator-(const ToeplitzMatrix& a, const ToeplitzMatrix& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "Toeplitz difference of unequal sizes");
  std::vector<double> row(a.size());
  for (std::size_t r = 0; r < row.size(); ++r) row[r] = a.lag(r) - b.lag(r);
  return ToeplitzMatrix(std::move(row));
}

/// Full symmetric p×p matrix, row-major. Symmetry is exact by construction.
class DenseSymmetric {
 public:
  explicit DenseSymmetric(std::size_t p) : p_(p), a_(p * p, 0.0) {
    if (p == 0) throw Error(ErrorCode::BadParams, "dense matrix needs p >= 1");
  }

  DenseSymmetric(std::size_t p, std::vector<double> entries) : p_(p), a_(std::move(entries)) {
    if (p == 0) throw Error(ErrorCode::BadParams, "dense matrix needs p >= 1");
    if (a_.size() != p * p) throw Error(ErrorCode::DimensionMismatch, "entries must have p*p values");
    for (std::size_t s = 0; s < p; ++s) {
      for (std::size_t t = 0; t < s; ++t) {
        if (a_[s * p + t] != a_[t * p + s]) {
          throw Error(ErrorCode::NotSymmetric, "entry (" + std::to_string(s) + "," + std::to_string(t) + ")");
        }
      }
    }
  }

  std::size_t size() const noexcept { return p_; }
  double operator()(std::size_t s, std::size_t t) const { return a_[s * p_ + t]; }

  /// Writes both (s,t) and (t,s).
  void set(std::size_t s, std::size_t t, double v) {
    a_[s * p_ + t] = v;
    a_[t * p_ + s] = v;
  }

  std::span<const double> data() const noexcept { return a_; }

  DenseSymmetric& operator-=(const DenseSymmetric& o) {
    if (o.p_ != p_) throw Error(ErrorCode::DimensionMismatch, "dense difference of unequal sizes");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }

 private:
  friend class ToeplitzMatrix;
  std::size_t p_;
  std::vector<double> a_;
};

inline DenseSymmetric operator-(DenseSymmetric a, const DenseSymmetric& b) {
  a -= b;
  return a;
}

inline DenseSymmetric ToeplitzMatrix::dense() const {
  const std::size_t p = size();
  DenseSymmetric out(p);
  for (std::size_t s = 0; s < p; ++s) {
    for (std::size_t t = 0; t < p; ++t) out.a_[s * p + t] = (*this)(s, t);
  }
  return out;
}

/// Real symmetric circulant of size 2p-1: first_row[r] == first_row[N-r].
class CirculantMatrix {
 public:
  explicit CirculantMatrix(std::vector<double> first_row) : row_(std::move(first_row)) {
    const std::size_t n = row_.size();
    if (n == 0 || n % 2 == 0) throw Error(ErrorCode::BadParams, "circulant extension has odd size 2p-1");
    for (std::size_t r = 1; r < n; ++r) {
      if (row_[r] != row_[n - r]) throw Error(ErrorCode::NotSymmetric, "circulant first row is not symmetric");
    }
  }

  std::size_t size() const noexcept { return row_.size(); }
  std::span<const double> first_row() const noexcept { return row_; }
  double operator()(std::size_t s, std::size_t t) const {
    const std::size_t n = row_.size();
    return row_[(t + n - s) % n];
  }

  DenseSymmetric dense() const {
    const std::size_t n = size();
    std::vector<double> a(n * n);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = 0; t < n; ++t) a[s * n + t] = (*this)(s, t);
    }
    return DenseSymmetric(n, std::move(a));
  }

 private:
  std::vector<double> row_;
};

enum class GridKind {
  FourP,      ///< x_k = (k - 2p) pi / (2p), k = 1..4p
  Circulant,  ///< 2 pi j / (2p - 1), j = -(p-1)..(p-1)
};

struct DensityGrid {
  GridKind kind;
  std::vector<double> points;
  std::vector<double> values;
};

inline double spectral_density(const ToeplitzMatrix& t, double x) {
  const auto row = t.first_row();
  double acc = 0.0;
  for (std::size_t r = row.size() - 1; r >= 1; --r) acc += row[r] * std::cos(static_cast<double>(r) * x);
  return row[0] + 2.0 * acc;
}

namespace detail {

/// cos(2 pi i / period) for i in [0, period).
inline std::vector<double> cos_table(std::size_t period) {
  std::vector<double> c(period);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(period);
  for (std::size_t i = 0; i < period; ++i) c[i] = std::cos(step * static_cast<double>(i));
  return c;
}

/// f evaluated at 2 pi j / period for every j in `phases`, using exact
/// index arithmetic (r * j mod period) on a shared cosine table.
inline std::vector<double> density_on_lattice(std::span<const double> row, std::size_t period,
                                              std::span<const long long> phases) {
  const auto table = cos_table(period);
  const auto per = static_cast<long long>(period);
  std::vector<double> values(phases.size());
  for (std::size_t k = 0; k < phases.size(); ++k) {
    long long j = phases[k] % per;
    if (j < 0) j += per;
    double acc = 0.0;
    long long idx = 0;
    for (std::size_t r = 1; r < row.size(); ++r) {
      idx += j;
      if (idx >= per) idx -= per;
      acc += row[r] * table[static_cast<std::size_t>(idx)];
    }
    values[k] = row[0] + 2.0 * acc;
  }
  return values;
}

}  // namespace detail

inline DensityGrid density_grid(const ToeplitzMatrix& t, GridKind kind) {
  const std::size_t p = t.size();
  const auto pl = static_cast<long long>(p);
  DensityGrid grid{kind, {}, {}};
  std::vector<long long> phases;
  std::size_t period = 0;
  if (kind == GridKind::FourP) {
    // r x_k = 2 pi r (k - 2p) / (4p)
    period = 4 * p;
    for (long long k = 1; k <= 4 * pl; ++k) {
      phases.push_back(k - 2 * pl);
      grid.points.push_back(static_cast<double>(k - 2 * pl) * std::numbers::pi / static_cast<double>(2 * p));
    }
  } else {
    period = 2 * p - 1;
    for (long long j = -(pl - 1); j <= pl - 1; ++j) {
      phases.push_back(j);
      grid.points.push_back(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(period));
    }
  }
  grid.values = detail::density_on_lattice(t.first_row(), period, phases);
  return grid;
}

/// 2 max_k |f(x_k)| on the 4p grid; an upper bound on the spectral norm.
inline double spectral_norm_bound(const ToeplitzMatrix& t) {
  const auto grid = density_grid(t, GridKind::FourP);
  double m = 0.0;
  for (double v : grid.values) m = std::max(m, std::abs(v));
  return 2.0 * m;
}

inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Largest |eigenvalue| of a dense symmetric matrix, exact to rounding.
inline double spectral_norm_exact(const DenseSymmetric& a, std::size_t dimension_cap = kDefaultDimensionCap) {
  if (a.size() > dimension_cap) {
    throw Error(ErrorCode::DimensionCap, "p=" + std::to_string(a.size()) + " exceeds cap " + std::to_string(dimension_cap));
  }
  std::vector<double> work(a.data().begin(), a.data().end());
  return detail::max_abs_eigenvalue_dense(work, a.size());
}

/// Same quantity for a Toeplitz matrix; narrow bands use the banded solver.
inline double spectral_norm_exact(const ToeplitzMatrix& t, std::size_t dimension_cap = kDefaultDimensionCap) {
  const std::size_t p = t.size();
  if (p > dimension_cap) {
    throw Error(ErrorCode::DimensionCap, "p=" + std::to_string(p) + " exceeds cap " + std::to_string(dimension_cap));
  }
  const std::size_t b = t.bandwidth();
  if (b == 0) return std::abs(t.lag(0));
  if (4 * (b + 1) <= p) return detail::max_abs_eigenvalue_banded_toeplitz(t.first_row(), b);
  auto d = t.dense();
  std::vector<double> work(d.data().begin(), d.data().end());
  return detail::max_abs_eigenvalue_dense(work, p);
}

/// (2p-1)-circulant whose eigenvalues are f(2 pi j / (2p-1)), |j| <= p-1.
inline CirculantMatrix circulant_extend(const ToeplitzMatrix& t) {
  const std::size_t p = t.size();
  const std::size_t n = 2 * p - 1;
  std::vector<double> row(n);
  for (std::size_t r = 0; r < p; ++r) row[r] = t.lag(r);
  for (std::size_t r = p; r < n; ++r) row[r] = t.lag(n - r);
  return CirculantMatrix(std::move(row));
}

/**
 * Positive semidefinite Toeplitz projection.
 *
 * Evaluates f on the circulant grid, clips negative values to zero, rebuilds
 * the circulant from the clipped eigenvalues and returns its leading p×p
 * block. Inputs whose grid values are all nonnegative are returned unchanged.
 */
inline ToeplitzMatrix psd_project(const ToeplitzMatrix& t) {
  const std::size_t p = t.size();
  auto grid = density_grid(t, GridKind::Circulant);
  // values[p-1+j] holds lambda_j; lambda_{-j} == lambda_j since f is even.
  const auto& lambda = grid.values;
  if (*std::min_element(lambda.begin(), lambda.end()) >= 0.0) return t;

  const std::size_t n = 2 * p - 1;
  std::vector<double> clipped(p);
  for (std::size_t j = 0; j < p; ++j) clipped[j] = std::max(0.0, lambda[p - 1 + j]);

  const auto table = detail::cos_table(n);
  std::vector<double> row(p);
  for (std::size_t r = 0; r < p; ++r) {
    double acc = 0.0;
    std::size_t idx = 0;
    for (std::size_t j = 1; j < p; ++j) {
      idx += r;
      if (idx >= n) idx -= n;
      acc += clipped[j] * table[idx];
    }
    row[r] = (clipped[0] + 2.0 * acc) / static_cast<double>(n);
  }
  return ToeplitzMatrix(std::move(row));
}

}  // namespace toepcov
