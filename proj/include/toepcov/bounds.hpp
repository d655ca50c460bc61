#pragma once

/** @file
 * Closed-form error-bound evaluators for masked Toeplitz estimation.
 *
 * All absolute constants are set to 1 and log is natural, so every value
 * here is a shape value: meaningful for scaling and monotonicity
 * comparisons, not as an absolute error level.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "toepcov/error.hpp"
#include "toepcov/masks.hpp"
#include "toepcov/toeplitz.hpp"

namespace toepcov {

/// Smoothness class F_beta(L0, L) parameters, beta = gamma + alpha.
struct SmoothnessParams {
  double beta;
  double L0;
  double L;

  void validate() const {
    const bool ok = std::isfinite(beta) && std::isfinite(L0) && std::isfinite(L) && beta > 0 && L0 > 0 && L > 0;
    if (!ok) throw Error(ErrorCode::BadParams, "beta, L0 and L must be finite and positive");
  }
};

namespace detail {
inline double bracket(double l2, double l1, double ratio) { return l2 * std::sqrt(ratio) + l1 * ratio; }

inline void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::BadParams, std::string(what) + " must be positive");
}
}  // namespace detail

/// K^2 (||w||_{2,*} sqrt(log p / n) + ||w||_{1,*} log p / n)
inline double variance_bound_mean(const ToeplitzMask& m, std::size_t n, double k2) {
  if (n < 1) throw Error(ErrorCode::BadParams, "n must be >= 1");
  detail::check_positive(k2, "K^2");
  const double ratio = std::log(static_cast<double>(m.size())) / static_cast<double>(n);
  return k2 * detail::bracket(weighted_l2(m), weighted_l1(m), ratio);
}

/// K^2 (||w||_{2,*} sqrt(t / n) + ||w||_{1,*} t / n)
inline double variance_bound_prob(const ToeplitzMask& m, std::size_t n, double t, double k2) {
  if (n < 1) throw Error(ErrorCode::BadParams, "n must be >= 1");
  detail::check_positive(t, "t");
  detail::check_positive(k2, "K^2");
  return k2 * detail::bracket(weighted_l2(m), weighted_l1(m), t / static_cast<double>(n));
}

/// K^2 (sqrt(m log p / (p n)) + m log p / (p n)) for banding / tapering masks.
inline double corollary_bound(std::size_t m, std::size_t p, std::size_t n, double k2) {
  detail::check_bandwidth(p, m);
  if (n < 1) throw Error(ErrorCode::BadParams, "n must be >= 1");
  detail::check_positive(k2, "K^2");
  const double ratio = static_cast<double>(m) * std::log(static_cast<double>(p)) /
                       (static_cast<double>(p) * static_cast<double>(n));
  return k2 * (std::sqrt(ratio) + ratio);
}

/// Norm estimates used for banding / tapering masks with m <= p/2:
/// ||w||_{1,*} <= 4(m+1)/p, ||w||_{2,*} <= sqrt(4(m+1)/p).
struct NormEstimates {
  double l1;
  double l2;
};

inline NormEstimates corollary_norm_estimates(std::size_t m, std::size_t p) {
  detail::check_bandwidth(p, m);
  const double l1 = 4.0 * static_cast<double>(m + 1) / static_cast<double>(p);
  return {l1, std::sqrt(l1)};
}

/// K^2 (sqrt(nu(S) t / (p n)) + nu(S) t / (p n))
inline double sparse_bound(const SupportSet& s, std::size_t n, double t, double k2) {
  if (n < 1) throw Error(ErrorCode::BadParams, "n must be >= 1");
  detail::check_positive(t, "t");
  detail::check_positive(k2, "K^2");
  const double ratio = weighted_cardinality(s) * t / (static_cast<double>(s.dimension()) * static_cast<double>(n));
  return k2 * (std::sqrt(ratio) + ratio);
}

struct Bandwidth {
  std::size_t m;
  bool clamped;
  double unrounded;  ///< value before flooring and clamping
};

namespace detail {
inline double rate_base(const SmoothnessParams& sp, std::size_t n, std::size_t p) {
  sp.validate();
  if (p < 2) throw Error(ErrorCode::BadParams, "bandwidth selection needs p >= 2");
  const double np_over_log = static_cast<double>(n) * static_cast<double>(p) / std::log(static_cast<double>(p));
  if (np_over_log < 1.0) throw Error(ErrorCode::BadParams, "need n p / log p >= 1");
  const double scale = sp.L / std::pow(sp.L0, 2.0 * sp.beta + 2.0);
  return std::pow(scale * np_over_log, 1.0 / (2.0 * sp.beta + 1.0));
}

inline Bandwidth clamp_bandwidth(double raw, std::size_t p) {
  const double floored = std::floor(raw);
  const auto hi = static_cast<double>(p / 2);
  if (floored < 1.0) return {1, true, raw};
  if (floored > hi) return {p / 2, true, raw};
  return {static_cast<std::size_t>(floored), false, raw};
}
}  // namespace detail

/// floor((L / L0^{2 beta + 2} · n p / log p)^{1/(2 beta + 1)}), clamped to [1, p/2].
inline Bandwidth tapering_bandwidth(const SmoothnessParams& sp, std::size_t n, std::size_t p) {
  return detail::clamp_bandwidth(detail::rate_base(sp, n, p), p);
}

/// Tapering choice times log(p)^{1/beta}, clamped to [1, p/2].
inline Bandwidth banding_bandwidth(const SmoothnessParams& sp, std::size_t n, std::size_t p) {
  const double raw = detail::rate_base(sp, n, p) * std::pow(std::log(static_cast<double>(p)), 1.0 / sp.beta);
  return detail::clamp_bandwidth(raw, p);
}

/// 12 L m^{-beta}
inline double bias_bound_tapering(const SmoothnessParams& sp, std::size_t m) {
  sp.validate();
  if (m < 1) throw Error(ErrorCode::BadBandwidth, "m must be >= 1");
  return 12.0 * sp.L * std::pow(static_cast<double>(m), -sp.beta);
}

/// 12 L log(m) m^{-beta}; zero at m = 1.
inline double bias_bound_banding(const SmoothnessParams& sp, std::size_t m) {
  sp.validate();
  if (m < 1) throw Error(ErrorCode::BadBandwidth, "m must be >= 1");
  return 12.0 * sp.L * std::log(static_cast<double>(m)) * std::pow(static_cast<double>(m), -sp.beta);
}

/// Coefficient decay for smooth_class_cov.
struct DecayModel {
  enum class Kind { Polynomial, Geometric };
  Kind kind = Kind::Polynomial;
  double rho = 0.5;        ///< geometric ratio, in [0, 1)
  double amplitude = 1.0;  ///< requested A before the L0 cap
};

/**
 * Test-instance factory for the smoothness class: s_r = A (r+1)^{-(beta+1)}
 * or s_r = A rho^r. A is the requested amplitude, reduced if needed so that
 * |s_0| + 2 sum |s_r| (an upper bound on ||f||_inf) stays within L0. Class
 * membership is only approximate; the Hölder condition is not checked.
 */
inline ToeplitzMatrix smooth_class_cov(std::size_t p, const SmoothnessParams& sp, const DecayModel& model) {
  sp.validate();
  if (p < 1) throw Error(ErrorCode::BadParams, "p must be >= 1");
  if (!(model.amplitude > 0.0) || !std::isfinite(model.amplitude)) {
    throw Error(ErrorCode::BadParams, "amplitude must be positive");
  }
  std::vector<double> row(p);
  for (std::size_t r = 0; r < p; ++r) {
    if (model.kind == DecayModel::Kind::Polynomial) {
      row[r] = std::pow(static_cast<double>(r + 1), -(sp.beta + 1.0));
    } else {
      if (!(model.rho >= 0.0 && model.rho < 1.0)) throw Error(ErrorCode::BadParams, "rho must lie in [0, 1)");
      row[r] = r == 0 ? 1.0 : std::pow(model.rho, static_cast<double>(r));
    }
  }
  const ToeplitzMatrix unit(row);
  for (GridKind kind : {GridKind::Circulant, GridKind::FourP}) {
    const auto grid = density_grid(unit, kind);
    if (*std::min_element(grid.values.begin(), grid.values.end()) < 0.0) {
      throw Error(ErrorCode::BadParams, "no positive amplitude makes this density nonnegative");
    }
  }
  double sup = std::abs(row[0]);
  for (std::size_t r = 1; r < p; ++r) sup += 2.0 * std::abs(row[r]);
  const double a = std::min(model.amplitude, sp.L0 / sup);
  for (double& v : row) v *= a;
  return ToeplitzMatrix(std::move(row));
}

}  // namespace toepcov
