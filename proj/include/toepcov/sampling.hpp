#pragma once

/** @file
 * Seeded samplers for distributions with the convex concentration property
 * and a prescribed Toeplitz covariance:
 *
 *  - Gaussian:          X = B g, g standard normal,       K^2 = 2 ||Sigma||
 *  - Rademacher-linear: X = B e, e uniform on {-1, 1}^p,  K^2 = c^2 ||Sigma||
 *  - Sphere:            uniform on sqrt(p) S^{p-1},       K^2 = 4, Sigma = I
 *
 * B is the lower Cholesky factor of Sigma. Draw i of trial t reads the
 * random stream keyed by (seed, t, i).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toepcov/error.hpp"
#include "toepcov/estimators.hpp"
#include "toepcov/rng.hpp"
#include "toepcov/toeplitz.hpp"

namespace toepcov {

enum class Family { Gaussian, RademacherLinear, Sphere };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::RademacherLinear: return "rademacher";
    case Family::Sphere: return "sphere";
  }
  return "unknown";
}

inline Family parse_family(std::string_view s) {
  if (s == "gaussian" || s == "GAUSSIAN") return Family::Gaussian;
  if (s == "rademacher" || s == "rademacher_linear" || s == "RADEMACHER_LINEAR") return Family::RademacherLinear;
  if (s == "sphere" || s == "SPHERE") return Family::Sphere;
  throw Error(ErrorCode::Parse, "unknown sampler family '" + std::string(s) + "'");
}

/// The absolute constant c only enters the Rademacher-linear family.
inline double default_k_squared(Family family, const ToeplitzMatrix& sigma, double c = 1.0) {
  switch (family) {
    case Family::Gaussian: return 2.0 * spectral_norm_exact(sigma);
    case Family::Sphere: return 4.0;
    case Family::RademacherLinear: return c * c * spectral_norm_exact(sigma);
  }
  return 0.0;
}

struct SamplerSpec {
  Family family;
  ToeplitzMatrix covariance;
  std::uint64_t seed;
  double k_squared;
  double c = 1.0;
};

/// Validates the covariance and fills in the recorded c.c.p. constant.
inline SamplerSpec make_sampler_spec(Family family, ToeplitzMatrix covariance, std::uint64_t seed, double c = 1.0,
                                     std::optional<double> k_squared = std::nullopt) {
  if (family == Family::Sphere) covariance = ToeplitzMatrix::identity(covariance.size());
  const auto circ = density_grid(covariance, GridKind::Circulant);
  const auto fine = density_grid(covariance, GridKind::FourP);
  double sup = 0.0;
  for (double v : fine.values) sup = std::max(sup, std::abs(v));
  for (double v : circ.values) sup = std::max(sup, std::abs(v));
  const double lowest = *std::min_element(circ.values.begin(), circ.values.end());
  if (lowest < -1e-10 * sup) {
    throw Error(ErrorCode::NotPsd, "covariance spectral density is negative on the circulant grid (min " +
                                       std::to_string(lowest) + ")");
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::BadParams, "c must be positive");
  const double k2 = k_squared ? *k_squared : default_k_squared(family, covariance, c);
  if (!(k2 > 0.0) || !std::isfinite(k2)) throw Error(ErrorCode::BadParams, "K^2 must be positive");
  return SamplerSpec{family, std::move(covariance), seed, k2, c};
}

namespace detail {

/// Lower Cholesky factor of a banded symmetric Toeplitz matrix, stored row by
/// row over columns [i - bandwidth, i]. Returns false on a nonpositive pivot.
class BandedCholesky {
 public:
  BandedCholesky(const ToeplitzMatrix& t, double jitter) : p_(t.size()), b_(t.bandwidth()), l_(p_ * (b_ + 1), 0.0) {
    ok_ = factor(t, jitter);
  }

  bool ok() const noexcept { return ok_; }

  /// y = L z
  void multiply(const double* z, double* y) const {
    for (std::size_t i = 0; i < p_; ++i) {
      const std::size_t j0 = i > b_ ? i - b_ : 0;
      double acc = 0.0;
      for (std::size_t j = j0; j <= i; ++j) acc += at(i, j) * z[j];
      y[i] = acc;
    }
  }

  double at(std::size_t i, std::size_t j) const { return l_[i * (b_ + 1) + (j + b_ - i)]; }

 private:
  double& ref(std::size_t i, std::size_t j) { return l_[i * (b_ + 1) + (j + b_ - i)]; }

  bool factor(const ToeplitzMatrix& t, double jitter) {
    for (std::size_t i = 0; i < p_; ++i) {
      const std::size_t j0 = i > b_ ? i - b_ : 0;
      for (std::size_t j = j0; j <= i; ++j) {
        double sum = t(i, j) + (i == j ? jitter : 0.0);
        const std::size_t k0 = std::max(j0, j > b_ ? j - b_ : 0);
        for (std::size_t k = k0; k < j; ++k) sum -= at(i, k) * at(j, k);
        if (i == j) {
          if (!(sum > 0.0) || !std::isfinite(sum)) return false;
          ref(i, i) = std::sqrt(sum);
        } else {
          ref(i, j) = sum / at(j, j);
        }
      }
    }
    return true;
  }

  std::size_t p_;
  std::size_t b_;
  std::vector<double> l_;
  bool ok_ = false;
};

}  // namespace detail

/// Holds the Cholesky factor so repeated trials share one factorization.
class Sampler {
 public:
  explicit Sampler(SamplerSpec spec) : spec_(std::move(spec)) {
    if (spec_.family == Family::Sphere) return;
    const auto& sigma = spec_.covariance;
    factor_.emplace(sigma, 0.0);
    if (!factor_->ok()) {
      const double jitter = 1e-12 * sigma.lag(0);  // trace / p
      factor_.emplace(sigma, jitter);
      if (!factor_->ok()) throw Error(ErrorCode::NotPsd, "Cholesky factorization failed after jitter");
    }
  }

  const SamplerSpec& spec() const noexcept { return spec_; }

  SampleMatrix draw(std::size_t n, std::uint64_t trial = 0) const {
    if (n == 0) throw Error(ErrorCode::BadParams, "need n >= 1 samples");
    const std::size_t p = spec_.covariance.size();
    std::vector<double> out(n * p);
    std::vector<double> z(p);
    const double radius = std::sqrt(static_cast<double>(p));
    for (std::size_t i = 0; i < n; ++i) {
      StreamRng rng(spec_.seed, trial, i);
      double* row = out.data() + i * p;
      switch (spec_.family) {
        case Family::Gaussian:
          for (double& v : z) v = rng.normal();
          factor_->multiply(z.data(), row);
          break;
        case Family::RademacherLinear:
          for (double& v : z) v = rng.rademacher();
          factor_->multiply(z.data(), row);
          break;
        case Family::Sphere: {
          double norm2 = 0.0;
          for (double& v : z) {
            v = rng.normal();
            norm2 += v * v;
          }
          const double scale = radius / std::sqrt(norm2);
          for (std::size_t j = 0; j < p; ++j) row[j] = z[j] * scale;
          break;
        }
      }
    }
    return SampleMatrix(n, p, std::move(out));
  }

 private:
  SamplerSpec spec_;
  std::optional<detail::BandedCholesky> factor_;
};

inline SampleMatrix sample(const SamplerSpec& spec, std::size_t n, std::uint64_t trial = 0) {
  return Sampler(spec).draw(n, trial);
}

}  // namespace toepcov
