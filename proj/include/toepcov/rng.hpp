#pragma once

// Counter-based random streams. A stream is identified by (seed, trial, draw);
// the k-th output is a stateless function of the key and k, so parallel
// trials reproduce bit-for-bit regardless of scheduling.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace toepcov {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t draw) noexcept
      : key_(splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ draw)) {}

  std::uint64_t next_u64() noexcept { return splitmix64(key_ + 0x632be59bd9b4e019ULL * counter_++); }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double rademacher() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley step against erfc, giving close to full double precision.
inline double normal_quantile(double u) noexcept {
  constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                          1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                          6.680131188771972e+01,  -1.328068155288572e+01};
  constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                          -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                          3.754408661907416e+00};
  constexpr double low = 0.02425;

  double x;
  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - low) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  const double step = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - step / (1.0 + 0.5 * x * step);
}

inline double StreamRng::normal() noexcept { return normal_quantile(uniform()); }

}  // namespace toepcov
