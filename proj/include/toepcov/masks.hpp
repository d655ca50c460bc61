#pragma once

// Toeplitz masks M with M_st = w_|s-t| >= 0 and their weighted norms
//   ||w||_{1,*} = sum_l w_l / (p - l),   ||w||_{2,*} = (sum_l w_l^2 / (p - l))^{1/2}.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "toepcov/error.hpp"
#include "toepcov/toeplitz.hpp"

namespace toepcov {

class ToeplitzMask {
 public:
  explicit ToeplitzMask(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw Error(ErrorCode::BadParams, "mask needs p >= 1");
    for (double v : w_) {
      if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::BadParams, "mask weights must be finite and nonnegative");
    }
  }

  std::size_t size() const noexcept { return w_.size(); }
  std::span<const double> weights() const noexcept { return w_; }
  double weight(std::size_t l) const { return w_[l]; }

  friend bool operator==(const ToeplitzMask&, const ToeplitzMask&) = default;

 private:
  std::vector<double> w_;
};

/// Subset of lags {0, ..., p-1}, kept sorted.
class SupportSet {
 public:
  SupportSet(std::size_t p, std::vector<std::size_t> indices) : p_(p), idx_(std::move(indices)) {
    if (p == 0) throw Error(ErrorCode::BadParams, "support set needs p >= 1");
    std::sort(idx_.begin(), idx_.end());
    if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
      throw Error(ErrorCode::BadParams, "duplicate support index");
    }
    if (!idx_.empty() && idx_.back() >= p) throw Error(ErrorCode::BadParams, "support index out of range");
  }

  std::size_t dimension() const noexcept { return p_; }
  std::span<const std::size_t> indices() const noexcept { return idx_; }
  std::size_t count() const noexcept { return idx_.size(); }

 private:
  std::size_t p_;
  std::vector<std::size_t> idx_;
};

namespace detail {
inline void check_bandwidth(std::size_t p, std::size_t m) {
  // m <= p/2 as a real comparison
  if (m < 1 || 2 * m > p) {
    throw Error(ErrorCode::BadBandwidth, "need 1 <= m <= p/2, got m=" + std::to_string(m) + ", p=" + std::to_string(p));
  }
}
}  // namespace detail

inline ToeplitzMask banding_mask(std::size_t p, std::size_t m) {
  detail::check_bandwidth(p, m);
  std::vector<double> w(p, 0.0);
  for (std::size_t r = 0; r <= m; ++r) w[r] = 1.0;
  return ToeplitzMask(std::move(w));
}

/// 1 for r <= m/2, linear ramp 2 - 2r/m for m/2 < r <= m, 0 beyond.
inline ToeplitzMask tapering_mask(std::size_t p, std::size_t m) {
  detail::check_bandwidth(p, m);
  std::vector<double> w(p, 0.0);
  for (std::size_t r = 0; r <= m; ++r) {
    w[r] = (2 * r <= m) ? 1.0 : 2.0 - 2.0 * static_cast<double>(r) / static_cast<double>(m);
  }
  return ToeplitzMask(std::move(w));
}

inline ToeplitzMask support_mask(const SupportSet& s) {
  std::vector<double> w(s.dimension(), 0.0);
  for (std::size_t l : s.indices()) w[l] = 1.0;
  return ToeplitzMask(std::move(w));
}

inline ToeplitzMask ones_mask(std::size_t p) { return ToeplitzMask(std::vector<double>(p, 1.0)); }
inline ToeplitzMask zero_mask(std::size_t p) { return ToeplitzMask(std::vector<double>(p, 0.0)); }

inline double weighted_l1(const ToeplitzMask& m) {
  const std::size_t p = m.size();
  double acc = 0.0;
  for (std::size_t l = 0; l < p; ++l) acc += m.weight(l) / static_cast<double>(p - l);
  return acc;
}

inline double weighted_l2(const ToeplitzMask& m) {
  const std::size_t p = m.size();
  double acc = 0.0;
  for (std::size_t l = 0; l < p; ++l) acc += m.weight(l) * m.weight(l) / static_cast<double>(p - l);
  return std::sqrt(acc);
}

/// nu(S) = sum_{l in S} p / (p - l)
inline double weighted_cardinality(const SupportSet& s) {
  const auto p = static_cast<double>(s.dimension());
  double acc = 0.0;
  for (std::size_t l : s.indices()) acc += p / (p - static_cast<double>(l));
  return acc;
}

/// Entrywise product M · T.
inline ToeplitzMatrix apply_mask(const ToeplitzMask& m, const ToeplitzMatrix& t) {
  if (m.size() != t.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "mask p=" + std::to_string(m.size()) + " vs matrix p=" + std::to_string(t.size()));
  }
  std::vector<double> row(t.size());
  for (std::size_t r = 0; r < row.size(); ++r) row[r] = m.weight(r) * t.lag(r);
  return ToeplitzMatrix(std::move(row));
}

/**
 * Dimension-free mask description, as used on the command line and in sweep
 * configs: "band:M", "taper:M", "support:I,J,...", "ones", "zero".
 */
struct MaskDescriptor {
  enum class Kind { Band, Taper, Support, Ones, Zero };

  Kind kind = Kind::Ones;
  std::size_t bandwidth = 0;
  std::vector<std::size_t> support;

  static MaskDescriptor band(std::size_t m) { return {Kind::Band, m, {}}; }
  static MaskDescriptor taper(std::size_t m) { return {Kind::Taper, m, {}}; }
  static MaskDescriptor ones() { return {Kind::Ones, 0, {}}; }
  static MaskDescriptor zero() { return {Kind::Zero, 0, {}}; }
  static MaskDescriptor with_support(std::vector<std::size_t> s) { return {Kind::Support, 0, std::move(s)}; }

  ToeplitzMask build(std::size_t p) const {
    switch (kind) {
      case Kind::Band: return banding_mask(p, bandwidth);
      case Kind::Taper: return tapering_mask(p, bandwidth);
      case Kind::Support: return support_mask(SupportSet(p, support));
      case Kind::Ones: return ones_mask(p);
      case Kind::Zero: return zero_mask(p);
    }
    throw Error(ErrorCode::BadParams, "unknown mask kind");
  }

  /// CSV "mask" column.
  std::string name() const {
    switch (kind) {
      case Kind::Band: return "band";
      case Kind::Taper: return "taper";
      case Kind::Support: return "support";
      case Kind::Ones: return "ones";
      case Kind::Zero: return "zero";
    }
    return "unknown";
  }

  /// CSV "m_or_support" column; support indices are ';'-separated.
  std::string parameter() const {
    switch (kind) {
      case Kind::Band:
      case Kind::Taper: return std::to_string(bandwidth);
      case Kind::Support: {
        std::string out;
        for (std::size_t i = 0; i < support.size(); ++i) {
          if (i) out += ';';
          out += std::to_string(support[i]);
        }
        return out;
      }
      default: return "";
    }
  }

  std::string to_string() const {
    const auto param = parameter();
    if (kind == Kind::Support) {
      std::string s = param;
      std::replace(s.begin(), s.end(), ';', ',');
      return "support:" + s;
    }
    return param.empty() ? name() : name() + ":" + param;
  }
};

namespace detail {
inline std::size_t parse_index(std::string_view s) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw Error(ErrorCode::Parse, "expected a nonnegative integer, got '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::size_t> parse_index_list(std::string_view s) {
  std::vector<std::size_t> out;
  while (!s.empty()) {
    const auto cut = s.find_first_of(",;");
    out.push_back(parse_index(s.substr(0, cut)));
    if (cut == std::string_view::npos) break;
    s.remove_prefix(cut + 1);
  }
  return out;
}
}  // namespace detail

/// Parses the inline descriptor grammar. "support:" here takes an index list;
/// the CLI resolves "support:FILE" before calling this.
inline MaskDescriptor parse_mask_descriptor(std::string_view text) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto tail = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "ones" && colon == std::string_view::npos) return MaskDescriptor::ones();
  if (head == "zero" && colon == std::string_view::npos) return MaskDescriptor::zero();
  if (head == "band") return MaskDescriptor::band(detail::parse_index(tail));
  if (head == "taper") return MaskDescriptor::taper(detail::parse_index(tail));
  if (head == "support" && !tail.empty()) return MaskDescriptor::with_support(detail::parse_index_list(tail));
  throw Error(ErrorCode::Parse, "bad mask descriptor '" + std::string(text) + "'");
}

}  // namespace toepcov
