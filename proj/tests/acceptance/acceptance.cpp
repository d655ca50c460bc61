// Acceptance runner. `toepcov_acceptance [--criterion N]` prints one
// [PASS]/[FAIL] line per criterion and exits nonzero if any failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "toepcov/toepcov.hpp"

using namespace toepcov;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

bool g_all_pass = true;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void report(const char* id, const char* title, const Outcome& o, double seconds, double limit) {
  const bool in_time = seconds < limit;
  const bool pass = o.pass && in_time;
  g_all_pass = g_all_pass && pass;
  std::printf("[%s] %s %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds,
              limit, in_time ? "" : " TIME LIMIT EXCEEDED");
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run(const char* id, const char* title, double limit, const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  const Outcome o = fn();
  report(id, title, o, seconds_since(t0), limit);
}

// ---- 1: circulant eigenvalues equal the density on the circulant grid ----
Outcome circulant_identity() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t p = 1 + static_cast<std::size_t>(rng() % 64);
    const auto t = oracle::random_toeplitz(rng, p);
    const auto eig = oracle::eigenvalues(circulant_extend(t).dense());
    worst = std::max(worst, oracle::multiset_max_relative_gap(eig, density_grid(t, GridKind::Circulant).values));
  }
  return {worst <= 1e-9, fmt("200 instances, max relative gap %.3g (tol 1e-9)", worst)};
}

// ---- 2: grid bound dominates the spectral norm ----
Outcome grid_bound() {
  std::mt19937_64 rng(202);
  int violations = 0;
  double tightest = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const std::size_t p = 1 + static_cast<std::size_t>(rng() % 64);
    const auto t = oracle::random_psd_toeplitz(rng, p);
    const double exact = spectral_norm_exact(t);
    const double bound = spectral_norm_bound(t);
    if (!(exact <= bound)) ++violations;
    tightest = std::min(tightest, bound / exact);
  }
  return {violations == 0, fmt("100 instances, %d violations, min bound/norm %.4f", violations, tightest)};
}

// ---- 3: PSD projection ----
Outcome psd_projection() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g;
  double worst_neg = INFINITY, worst_identity = 0.0;
  int unchanged_cases = 0, clipped_cases = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t p = 2 + static_cast<std::size_t>(rng() % 63);
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 8);
    std::vector<double> data(n * p);
    for (double& v : data) v = g(rng);
    const SampleMatrix x(n, p, data);
    ToeplitzMask mask = ones_mask(p);
    const std::size_t m = 1 + static_cast<std::size_t>(rng() % (p / 2));
    switch (rng() % 3) {
      case 0: mask = banding_mask(p, m); break;
      case 1: mask = tapering_mask(p, m); break;
      default: {
        std::vector<std::size_t> s{0};
        for (std::size_t r = 1; r < p; ++r)
          if (rng() % 4 == 0) s.push_back(r);
        mask = support_mask(SupportSet(p, s));
      }
    }
    const auto est = masked_toeplitz_estimate(x, mask);
    const auto out = psd_project(est);
    const auto eig = oracle::eigenvalues(out.dense());
    const double norm = std::max({std::abs(eig.front()), std::abs(eig.back()), 1e-300});
    worst_neg = std::min(worst_neg, eig.front() / norm);
    const auto grid = density_grid(est, GridKind::Circulant);
    if (*std::min_element(grid.values.begin(), grid.values.end()) >= 0.0) {
      ++unchanged_cases;
      for (std::size_t r = 0; r < p; ++r) worst_identity = std::max(worst_identity, std::abs(out.lag(r) - est.lag(r)));
    } else {
      ++clipped_cases;
    }
  }
  const auto ex = psd_project(ToeplitzMatrix({0, 1}));
  const double ex_err = std::max(std::abs(ex.lag(0) - 2.0 / 3.0), std::abs(ex.lag(1) - 2.0 / 3.0));
  const bool pass = worst_neg >= -1e-8 && worst_identity <= 1e-12 && ex_err <= 1e-12;
  return {pass, fmt("%d clipped inputs, min eig/norm %.3g (tol -1e-8); %d nonnegative-density inputs, max change %.3g "
                    "(tol 1e-12); (0,1) example error %.3g",
                    clipped_cases, worst_neg, unchanged_cases, worst_identity, ex_err)};
}

// ---- 4 / 8a: unbiasedness of the diagonal-averaged estimate ----
Outcome unbiasedness(Family family) {
  constexpr std::size_t p = 16, n = 200, trials = 2000;
  std::vector<double> row(p);
  for (std::size_t r = 0; r < p; ++r) row[r] = std::pow(0.5, static_cast<double>(r));
  const ToeplitzMatrix sigma(row);
  const Sampler sampler(make_sampler_spec(family, sigma, 404));
  std::vector<std::vector<double>> lags(p, std::vector<double>(trials));
  detail::parallel_for(trials, default_thread_count(), [&](std::size_t t) {
    const auto est = diagonal_average(sample_covariance(sampler.draw(n, t)));
    for (std::size_t r = 0; r < p; ++r) lags[r][t] = est.lag(r);
  });
  double worst = 0.0;
  std::size_t worst_lag = 0;
  for (std::size_t r = 0; r < p; ++r) {
    const auto me = detail::mean_and_error(lags[r]);
    const double z = std::abs(me.mean - row[r]) / me.std_error;
    if (z > worst) {
      worst = z;
      worst_lag = r;
    }
  }
  return {worst < 3.0, fmt("%s, max |mean - sigma_r| / SE = %.3f at lag %zu (limit 3)",
                           std::string(to_string(family)).c_str(), worst, worst_lag)};
}

SweepConfig banded_sweep(Family family, std::vector<std::size_t> ps, std::vector<std::size_t> ns, std::size_t trials) {
  SweepConfig cfg;
  cfg.sampler.family = family;
  cfg.sampler.covariance.kind = CovarianceModel::Kind::Sparse;
  cfg.sampler.covariance.support = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  cfg.p_values = std::move(ps);
  cfg.n_values = std::move(ns);
  cfg.masks = {MaskDescriptor::band(8)};
  cfg.trials = trials;
  cfg.seed = 505;
  return cfg;
}

std::string cells(const std::vector<SweepRecord>& recs, Axis axis) {
  std::string s;
  for (const auto& r : recs) {
    s += fmt("%s%g:%.4g", s.empty() ? "" : " ", axis_value(r, axis), r.mean_error);
  }
  return s;
}

// ---- 5 / 8b (and 9): n-scaling at p = 512 ----
Outcome n_scaling(Family family, Outcome* projection_shape) {
  const auto res = run_sweep(banded_sweep(family, {512}, {32, 64, 128, 256}, 200));
  if (res.any_failed) return {false, "sweep cell failed: " + res.records.front().failure_reason};
  const auto fit = scaling_fit(res.records, Axis::N);
  if (projection_shape) {
    int violations = 0;
    double worst_margin = INFINITY;
    for (const auto& r : res.records) {
      const double rhs = r.mean_error + 3.0 * r.bias_sup + 5.0 * r.std_error;
      if (!(r.mean_error_psd <= rhs)) ++violations;
      worst_margin = std::min(worst_margin, rhs - r.mean_error_psd);
    }
    *projection_shape = {violations == 0, fmt("%zu cells, %d violations, min slack %.4g", res.records.size(), violations,
                                      worst_margin)};
  }
  const bool pass = fit.exponent > -0.6 && fit.exponent < -0.4 && fit.r2 > 0.95;
  return {pass, fmt("%s, exponent %.4f (want (-0.6,-0.4)), r2 %.4f (want > 0.95); n:error %s",
                    std::string(to_string(family)).c_str(), fit.exponent, fit.r2, cells(res.records, Axis::N).c_str())};
}

// ---- 6: p-scaling at n = 64 ----
Outcome p_scaling() {
  const auto res = run_sweep(banded_sweep(Family::Gaussian, {128, 256, 512, 1024}, {64}, 200));
  if (res.any_failed) return {false, "sweep cell failed: " + res.records.front().failure_reason};
  const auto fit = scaling_fit(res.records, Axis::P);
  const bool pass = fit.exponent > -0.6 && fit.exponent < -0.4 && fit.r2 > 0.9;
  return {pass, fmt("exponent %.4f (want (-0.6,-0.4)), r2 %.4f (want > 0.9); p:error %s", fit.exponent, fit.r2,
                    cells(res.records, Axis::P).c_str())};
}

// ---- 7: masked Toeplitz estimate against the sample covariance ----
Outcome toeplitz_gain() {
  const auto res = run_sweep(banded_sweep(Family::Gaussian, {1024}, {64}, 100));
  if (res.any_failed) return {false, "sweep cell failed: " + res.records.front().failure_reason};
  const auto& r = res.records.front();
  const double ratio = r.mean_error / r.mean_error_sample_cov;
  return {ratio < 0.25, fmt("mean masked error %.4g, mean sample-covariance error %.4g, ratio %.4f (want < 0.25)",
                            r.mean_error, r.mean_error_sample_cov, ratio)};
}

// ---- 10: bound evaluators ----
Outcome bound_values() {
  struct Item {
    const char* name;
    double got, want;
  };
  const SmoothnessParams unit{1.0, 1.0, 1.0};
  const Item items[] = {
      {"variance_bound_mean", variance_bound_mean(ToeplitzMask({1, 1, 0, 0}), 100, 2.0), 0.2002},
      {"corollary_bound", corollary_bound(8, 1024, 64, 2.0), 0.0599},
      {"tapering m", static_cast<double>(tapering_bandwidth(unit, 100, 1000).m), 24.0},
      {"banding m", static_cast<double>(banding_bandwidth(unit, 100, 1000).m), 168.0},
      {"bias_bound_tapering", bias_bound_tapering(unit, 10), 1.2},
  };
  bool pass = true;
  std::string detail;
  for (const auto& it : items) {
    const double rel = std::abs(it.got - it.want) / std::abs(it.want);
    const bool ok = rel <= 1e-3;
    pass = pass && ok;
    detail += fmt("%s %.6g vs %.6g (rel %.2g%s); ", it.name, it.got, it.want, rel, ok ? "" : " MISMATCH");
  }
  bool identity = true;
  for (std::size_t p : {2u, 4u, 17u, 1000u}) {
    const auto w = tapering_mask(p, std::max<std::size_t>(1, p / 4));
    for (std::size_t n : {1u, 7u, 100u}) {
      identity = identity && variance_bound_prob(w, n, std::log(static_cast<double>(p)), 1.5) ==
                                 variance_bound_mean(w, n, 1.5);
    }
  }
  detail += identity ? "t = log p identity exact" : "t = log p identity BROKEN";
  return {pass && identity, detail};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  auto want = [&](int c) { return only == 0 || only == c; };

  if (want(1)) run("C1", "circulant eigenvalue identity", 10, circulant_identity);
  if (want(2)) run("C2", "spectral-norm grid bound", 10, grid_bound);
  if (want(3)) run("C3", "PSD projection", 10, psd_projection);
  if (want(4)) run("C4", "unbiasedness", 60, [] { return unbiasedness(Family::Gaussian); });
  if (want(5) || want(9)) {
    Outcome projection_shape{false, "not run"};
    const auto t0 = std::chrono::steady_clock::now();
    run("C5", "n-scaling", 600, [&] { return n_scaling(Family::Gaussian, &projection_shape); });
    report("C9", "projection error shape", projection_shape, seconds_since(t0), 600);
  }
  if (want(6)) run("C6", "p-scaling", 600, p_scaling);
  if (want(7)) run("C7", "Toeplitz gain over sample covariance", 300, toeplitz_gain);
  if (want(8)) {
    run("C8", "distribution generality", 600, [] {
      const auto a = unbiasedness(Family::RademacherLinear);
      const auto b = n_scaling(Family::RademacherLinear, nullptr);
      return Outcome{a.pass && b.pass, "unbiasedness: " + a.detail + " | n-scaling: " + b.detail};
    });
  }
  if (want(10)) run("C10", "bound evaluators", 1, bound_values);
  return g_all_pass ? 0 : 1;
}
