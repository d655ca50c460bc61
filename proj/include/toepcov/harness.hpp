#pragma once

/** @file
 * Monte Carlo harness.
 *
 * A cell fixes (sampler, p, n, mask). Each trial draws n samples from the
 * stream of its trial index and measures
 *
 *   mean_error             ||M·S~_n - M·Sigma||
 *   mean_error_psd         ||Sigma* - Sigma||       (Sigma* = psd_project(M·S~_n))
 *   mean_error_sample_cov  ||S^_n - Sigma||
 *
 * in spectral norm. Trials run concurrently; their results are written into
 * per-trial slots and reduced in trial order, so records depend only on the
 * configuration and seed.
 */

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "toepcov/bounds.hpp"
#include "toepcov/error.hpp"
#include "toepcov/estimators.hpp"
#include "toepcov/io.hpp"
#include "toepcov/masks.hpp"
#include "toepcov/models.hpp"
#include "toepcov/sampling.hpp"
#include "toepcov/toeplitz.hpp"

namespace toepcov {

/// TOEPCOV_THREADS if set to a positive integer, else hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("TOEPCOV_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any body is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

struct MeanAndError {
  double mean;
  double std_error;
};

inline MeanAndError mean_and_error(const std::vector<double>& v) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (v.empty()) return {nan, nan};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, nan};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
}

}  // namespace detail

struct SweepRecord {
  std::size_t p = 0;
  std::size_t n = 0;
  std::string mask;
  std::string m_or_support;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  double mean_error_psd = 0.0;
  double mean_error_sample_cov = 0.0;
  double bound_mean = 0.0;
  double bias_sup = 0.0;
  double k_squared = 0.0;
  std::uint64_t seed = 0;

  // Not part of the CSV schema.
  double std_error_psd = 0.0;
  double std_error_sample_cov = 0.0;
  bool failed = false;
  std::string failure_reason;
};

struct CellSpec {
  SamplerSpec sampler;
  std::size_t n;
  MaskDescriptor mask;
  std::size_t trials;
  unsigned threads = 0;  ///< 0: default_thread_count()
};

/// Fraction of failed trials above which the whole cell is marked failed.
inline constexpr double kMaxTrialFailureFraction = 0.10;

/// max_k |f_Sigma(x_k) - f_{M·Sigma}(x_k)| over the 4p grid.
inline double bias_sup(const ToeplitzMatrix& sigma, const ToeplitzMask& mask) {
  const auto grid = density_grid(sigma - apply_mask(mask, sigma), GridKind::FourP);
  double m = 0.0;
  for (double v : grid.values) m = std::max(m, std::abs(v));
  return m;
}

inline SweepRecord run_cell(const CellSpec& cell) {
  if (cell.trials < 2) throw Error(ErrorCode::BadParams, "a cell needs at least 2 trials");
  const ToeplitzMatrix& sigma = cell.sampler.covariance;
  const std::size_t p = sigma.size();
  const ToeplitzMask mask = cell.mask.build(p);
  const ToeplitzMatrix masked_sigma = apply_mask(mask, sigma);
  const DenseSymmetric sigma_dense = sigma.dense();
  const Sampler sampler(cell.sampler);

  struct TrialResult {
    bool ok = false;
    double error = 0.0;
    double error_psd = 0.0;
    double error_sample_cov = 0.0;
    std::string reason;
  };
  std::vector<TrialResult> results(cell.trials);

  const unsigned threads = cell.threads ? cell.threads : default_thread_count();
  detail::parallel_for(cell.trials, threads, [&](std::size_t t) {
    TrialResult& out = results[t];
    try {
      const SampleMatrix x = sampler.draw(cell.n, t);
      const DenseSymmetric cov = sample_covariance(x);
      const ToeplitzMatrix estimate = apply_mask(mask, diagonal_average(cov));
      out.error = spectral_norm_exact(estimate - masked_sigma);
      out.error_psd = spectral_norm_exact(psd_project(estimate) - sigma);
      out.error_sample_cov = spectral_norm_exact(cov - sigma_dense);
      out.ok = true;
    } catch (const Error& e) {
      out.reason = e.what();
    }
  });

  SweepRecord rec;
  rec.p = p;
  rec.n = cell.n;
  rec.mask = cell.mask.name();
  rec.m_or_support = cell.mask.parameter();
  rec.trials = cell.trials;
  rec.k_squared = cell.sampler.k_squared;
  rec.seed = cell.sampler.seed;
  std::vector<double> err, err_psd, err_sc;
  for (const auto& r : results) {
    if (!r.ok) {
      ++rec.failures;
      if (rec.failure_reason.empty()) rec.failure_reason = r.reason;
      continue;
    }
    err.push_back(r.error);
    err_psd.push_back(r.error_psd);
    err_sc.push_back(r.error_sample_cov);
  }
  const auto e = detail::mean_and_error(err);
  const auto ep = detail::mean_and_error(err_psd);
  const auto es = detail::mean_and_error(err_sc);
  rec.mean_error = e.mean;
  rec.std_error = e.std_error;
  rec.mean_error_psd = ep.mean;
  rec.std_error_psd = ep.std_error;
  rec.mean_error_sample_cov = es.mean;
  rec.std_error_sample_cov = es.std_error;
  rec.bound_mean = variance_bound_mean(mask, cell.n, cell.sampler.k_squared);
  rec.bias_sup = bias_sup(sigma, mask);
  rec.failed = static_cast<double>(rec.failures) > kMaxTrialFailureFraction * static_cast<double>(rec.trials);
  return rec;
}

struct SamplerTemplate {
  Family family = Family::Gaussian;
  CovarianceModel covariance;
  double c = 1.0;
  std::optional<double> k_squared;
};

struct SweepConfig {
  SamplerTemplate sampler;
  std::vector<std::size_t> p_values;
  std::vector<std::size_t> n_values;
  std::vector<MaskDescriptor> masks;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string output;    ///< empty: caller decides (the CLI writes to stdout)
  unsigned threads = 0;  ///< 0: default_thread_count()
};

struct SweepResult {
  std::vector<SweepRecord> records;
  bool any_failed = false;
};

/// Records come out ordered by p, then n, then mask in config order.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  if (cfg.trials < 2) throw Error(ErrorCode::BadParams, "trials must be >= 2");
  if (cfg.p_values.empty() || cfg.n_values.empty() || cfg.masks.empty()) {
    throw Error(ErrorCode::BadParams, "sweep grids over p, n and masks must be nonempty");
  }
  auto ps = cfg.p_values;
  auto ns = cfg.n_values;
  std::sort(ps.begin(), ps.end());
  std::sort(ns.begin(), ns.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  SweepResult out;
  for (std::size_t p : ps) {
    std::optional<SamplerSpec> spec;
    std::string spec_error;
    try {
      spec = make_sampler_spec(cfg.sampler.family, cfg.sampler.covariance.build(p), cfg.seed, cfg.sampler.c,
                               cfg.sampler.k_squared);
    } catch (const Error& e) {
      spec_error = e.what();
    }
    for (std::size_t n : ns) {
      for (const auto& mask : cfg.masks) {
        SweepRecord rec;
        try {
          if (!spec) throw Error(ErrorCode::BadParams, spec_error);
          rec = run_cell(CellSpec{*spec, n, mask, cfg.trials, cfg.threads});
        } catch (const Error& e) {
          const double nan = std::numeric_limits<double>::quiet_NaN();
          rec = SweepRecord{};
          rec.p = p;
          rec.n = n;
          rec.mask = mask.name();
          rec.m_or_support = mask.parameter();
          rec.trials = cfg.trials;
          rec.failures = cfg.trials;
          rec.mean_error = rec.std_error = rec.mean_error_psd = rec.mean_error_sample_cov = nan;
          rec.bound_mean = rec.bias_sup = rec.k_squared = nan;
          rec.std_error_psd = rec.std_error_sample_cov = nan;
          if (spec) rec.k_squared = spec->k_squared;
          rec.seed = cfg.seed;
          rec.failed = true;
          rec.failure_reason = e.what();
        }
        out.any_failed = out.any_failed || rec.failed;
        out.records.push_back(std::move(rec));
      }
    }
  }
  return out;
}

// ---- config and CSV -----------------------------------------------------

namespace detail {
inline std::vector<std::size_t> size_list(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::Parse, std::string("missing key '") + key + "'");
  const auto& v = j.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<std::size_t>>();
    return {v.get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("key '") + key + "': " + e.what());
  }
}
}  // namespace detail

/**
 * Sweep config document:
 *
 *   {
 *     "sampler": {"family": "gaussian", "covariance": <descriptor>, "c": 1, "K_squared": 2},
 *     "p": [512], "n": [32, 64, 128, 256],
 *     "masks": ["band:8", "taper:8", "support:0,1,5", "ones"],
 *     "trials": 200, "seed": 1, "output": "out.csv", "threads": 4
 *   }
 *
 * "p" and "n" accept a single integer; "mask" may replace "masks"; "c",
 * "K_squared", "output", "threads" are optional. See
 * covariance_model_from_json for the covariance descriptor.
 */
inline SweepConfig sweep_config_from_json(const Json& j) {
  SweepConfig cfg;
  if (!j.is_object() || !j.contains("sampler")) throw Error(ErrorCode::Parse, "missing key 'sampler'");
  const auto& s = j.at("sampler");
  cfg.sampler.family = parse_family(detail::json_get<std::string>(s, "family"));
  if (!s.contains("covariance")) throw Error(ErrorCode::Parse, "missing key 'sampler.covariance'");
  cfg.sampler.covariance = covariance_model_from_json(s.at("covariance"));
  if (s.contains("c")) cfg.sampler.c = detail::json_get<double>(s, "c");
  if (s.contains("K_squared")) cfg.sampler.k_squared = detail::json_get<double>(s, "K_squared");
  cfg.p_values = detail::size_list(j, "p");
  cfg.n_values = detail::size_list(j, "n");
  if (j.contains("masks")) {
    for (const auto& m : j.at("masks")) {
      if (!m.is_string()) throw Error(ErrorCode::Parse, "masks must be descriptor strings");
      cfg.masks.push_back(parse_mask_descriptor(m.get<std::string>()));
    }
  } else {
    cfg.masks.push_back(parse_mask_descriptor(detail::json_get<std::string>(j, "mask")));
  }
  cfg.trials = detail::json_get<std::size_t>(j, "trials");
  cfg.seed = detail::json_get<std::uint64_t>(j, "seed");
  if (j.contains("output")) cfg.output = detail::json_get<std::string>(j, "output");
  if (j.contains("threads")) cfg.threads = detail::json_get<unsigned>(j, "threads");
  if (cfg.trials < 2) throw Error(ErrorCode::Parse, "trials must be >= 2");
  return cfg;
}

inline constexpr std::string_view kSweepCsvHeader =
    "p,n,mask,m_or_support,trials,failures,mean_error,std_error,mean_error_psd,mean_error_sample_cov,"
    "bound_mean,bias_sup,K_squared,seed";

inline std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.p) + ',' + std::to_string(r.n) + ',' + r.mask + ',' + r.m_or_support + ',' +
           std::to_string(r.trials) + ',' + std::to_string(r.failures) + ',' + format_double(r.mean_error) + ',' +
           format_double(r.std_error) + ',' + format_double(r.mean_error_psd) + ',' +
           format_double(r.mean_error_sample_cov) + ',' + format_double(r.bound_mean) + ',' +
           format_double(r.bias_sup) + ',' + format_double(r.k_squared) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

namespace detail {
inline double csv_double(std::string_view s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorCode::Parse, "bad CSV number '" + std::string(s) + "'");
  return v;
}

template <class Int>
Int csv_int(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorCode::Parse, "bad CSV integer '" + std::string(s) + "'");
  return v;
}
}  // namespace detail

inline std::vector<SweepRecord> parse_sweep_csv(std::string_view text) {
  std::vector<SweepRecord> out;
  bool header = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kSweepCsvHeader) throw Error(ErrorCode::Parse, "unexpected sweep CSV header");
      header = false;
      continue;
    }
    std::vector<std::string_view> f;
    while (true) {
      const auto cut = line.find(',');
      f.push_back(line.substr(0, cut));
      if (cut == std::string_view::npos) break;
      line.remove_prefix(cut + 1);
    }
    if (f.size() != 14) throw Error(ErrorCode::Parse, "sweep CSV line " + std::to_string(line_no) + " needs 14 fields");
    SweepRecord r;
    r.p = detail::csv_int<std::size_t>(f[0]);
    r.n = detail::csv_int<std::size_t>(f[1]);
    r.mask = std::string(f[2]);
    r.m_or_support = std::string(f[3]);
    r.trials = detail::csv_int<std::size_t>(f[4]);
    r.failures = detail::csv_int<std::size_t>(f[5]);
    r.mean_error = detail::csv_double(f[6]);
    r.std_error = detail::csv_double(f[7]);
    r.mean_error_psd = detail::csv_double(f[8]);
    r.mean_error_sample_cov = detail::csv_double(f[9]);
    r.bound_mean = detail::csv_double(f[10]);
    r.bias_sup = detail::csv_double(f[11]);
    r.k_squared = detail::csv_double(f[12]);
    r.seed = detail::csv_int<std::uint64_t>(f[13]);
    out.push_back(std::move(r));
  }
  if (header) throw Error(ErrorCode::Parse, "sweep CSV is empty");
  return out;
}

// ---- scaling fits -------------------------------------------------------

enum class Axis { N, P, M };

inline Axis parse_axis(std::string_view s) {
  if (s == "n") return Axis::N;
  if (s == "p") return Axis::P;
  if (s == "m") return Axis::M;
  throw Error(ErrorCode::Parse, "axis must be one of n, p, m");
}

/// Bandwidth for band/taper records, max(S) for support records.
inline double mask_parameter(const SweepRecord& r) {
  if (r.mask == "band" || r.mask == "taper") return detail::csv_double(r.m_or_support);
  if (r.mask == "support" && !r.m_or_support.empty()) {
    const auto idx = detail::parse_index_list(r.m_or_support);
    return static_cast<double>(*std::max_element(idx.begin(), idx.end()));
  }
  throw Error(ErrorCode::Degenerate, "mask '" + r.mask + "' has no bandwidth parameter");
}

inline double axis_value(const SweepRecord& r, Axis axis) {
  switch (axis) {
    case Axis::N: return static_cast<double>(r.n);
    case Axis::P: return static_cast<double>(r.p);
    case Axis::M: return mask_parameter(r);
  }
  return 0.0;
}

enum class Metric { MeanError, MeanErrorPsd, MeanErrorSampleCov, BoundMean };

inline Metric parse_metric(std::string_view s) {
  if (s == "mean_error") return Metric::MeanError;
  if (s == "mean_error_psd") return Metric::MeanErrorPsd;
  if (s == "mean_error_sample_cov") return Metric::MeanErrorSampleCov;
  if (s == "bound_mean") return Metric::BoundMean;
  throw Error(ErrorCode::Parse, "unknown metric '" + std::string(s) + "'");
}

inline double metric_value(const SweepRecord& r, Metric m) {
  switch (m) {
    case Metric::MeanError: return r.mean_error;
    case Metric::MeanErrorPsd: return r.mean_error_psd;
    case Metric::MeanErrorSampleCov: return r.mean_error_sample_cov;
    case Metric::BoundMean: return r.bound_mean;
  }
  return 0.0;
}

struct ScalingFit {
  double exponent;
  double intercept;  ///< log-scale intercept
  double r2;
};

/// Least-squares slope of log(metric) against log(axis value). Records must
/// vary only along `axis`.
inline ScalingFit scaling_fit(const std::vector<SweepRecord>& records, Axis axis, Metric metric = Metric::MeanError) {
  if (records.size() < 3) throw Error(ErrorCode::Degenerate, "scaling fit needs at least 3 records");
  const auto& first = records.front();
  for (const auto& r : records) {
    const bool same_n = axis == Axis::N || r.n == first.n;
    const bool same_p = axis == Axis::P || r.p == first.p;
    const bool same_m = axis == Axis::M || (r.mask == first.mask && r.m_or_support == first.m_or_support);
    if (!same_n || !same_p || !same_m) throw Error(ErrorCode::Degenerate, "records vary along more than one axis");
  }
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    const double x = axis_value(r, axis);
    const double y = metric_value(r, metric);
    if (!(x > 0.0) || !(y > 0.0)) throw Error(ErrorCode::Degenerate, "log-log fit needs positive values");
    xs.push_back(std::log(x));
    ys.push_back(std::log(y));
  }
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::Degenerate, "axis values are not distinct");
  }
  const auto k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, my - slope * mx, r2};
}

}  // namespace toepcov
