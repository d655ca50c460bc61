// toepcov: command-line frontend.
//
//   gen-cov | sample | estimate | psd-project | bound | sweep | plot
//
// Exit codes: 0 success, 1 computation error (one-line diagnostic on
// stderr), 2 usage error.

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "toepcov/toepcov.hpp"

namespace {

using namespace toepcov;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void print_json(const Json& j) { std::cout << j.dump() << '\n'; }

/// "support:FILE" reads a SupportSet JSON file; "support:0,1,5" is inline.
MaskDescriptor resolve_mask(const std::string& text, std::optional<std::size_t> expected_p = std::nullopt) {
  constexpr std::string_view prefix = "support:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string tail = text.substr(prefix.size());
    if (std::filesystem::exists(tail)) {
      const SupportSet s = support_from_json(read_json_file(tail));
      if (expected_p && s.dimension() != *expected_p) {
        throw Error(ErrorCode::DimensionMismatch, "support file has p=" + std::to_string(s.dimension()));
      }
      return MaskDescriptor::with_support({s.indices().begin(), s.indices().end()});
    }
  }
  try {
    return parse_mask_descriptor(text);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

int cmd_gen_cov(const std::string& model, std::optional<std::size_t> p, double rho, double beta,
                std::optional<double> L0, double L, double amplitude, const std::string& support,
                const std::string& in) {
  if (model == "file") {
    if (in.empty()) throw UsageError("--model file needs --in FILE");
    print_json(to_json(toeplitz_from_json(read_json_file(in))));
    return 0;
  }
  if (!p) throw UsageError("--p is required for model " + model);
  CovarianceModel m;
  m.rho = rho;
  m.beta = beta;
  m.L = L;
  m.amplitude = amplitude;
  if (L0) m.L0 = *L0;
  if (model == "geometric") {
    m.kind = CovarianceModel::Kind::Geometric;
  } else if (model == "polynomial") {
    m.kind = CovarianceModel::Kind::Polynomial;
  } else if (model == "sparse") {
    m.kind = CovarianceModel::Kind::Sparse;
    if (support.empty()) throw UsageError("--model sparse needs --support I,J,...");
    m.support = detail::parse_index_list(support);
  } else if (model == "identity") {
    m.kind = CovarianceModel::Kind::Identity;
  } else {
    throw UsageError("unknown --model " + model);
  }
  print_json(to_json(m.build(*p)));
  return 0;
}

int cmd_sample(const std::string& cov_file, const std::string& family, std::size_t n, std::optional<std::uint64_t> seed,
               const std::string& out, double c, std::uint64_t trial) {
  const Json doc = read_json_file(cov_file);
  SamplerSpec spec = [&] {
    if (doc.contains("family")) {
      Json j = doc;
      if (!family.empty()) j["family"] = family;
      if (seed) j["seed"] = *seed;
      return sampler_spec_from_json(j);
    }
    if (family.empty()) throw UsageError("--family is required when --cov is a plain Toeplitz matrix");
    if (!seed) throw UsageError("--seed is required when --cov is a plain Toeplitz matrix");
    return make_sampler_spec(parse_family(family), toeplitz_from_json(doc), *seed, c);
  }();
  write_samples(out, Sampler(spec).draw(n, trial));
  return 0;
}

int cmd_estimate(const std::string& samples, const std::string& mask_text, bool center) {
  const SampleMatrix x = read_samples(samples);
  const MaskDescriptor mask = resolve_mask(mask_text, x.dimension());
  print_json(to_json(masked_toeplitz_estimate(x, mask.build(x.dimension()), center)));
  return 0;
}

int cmd_psd_project(const std::string& in) {
  print_json(to_json(psd_project(toeplitz_from_json(read_json_file(in)))));
  return 0;
}

int cmd_bound(const std::string& mask_text, std::size_t n, std::size_t p, std::optional<double> t, double k2,
              std::optional<double> beta, std::optional<double> L, std::optional<double> L0) {
  const MaskDescriptor desc = resolve_mask(mask_text, p);
  const ToeplitzMask mask = desc.build(p);
  Json inputs;
  inputs["mask"] = desc.to_string();
  inputs["n"] = n;
  inputs["p"] = p;
  if (t) inputs["t"] = *t;
  inputs["K_squared"] = k2;

  Json out;
  out["shape_values"] = true;
  out["inputs"] = inputs;
  out["weighted_l1"] = weighted_l1(mask);
  out["weighted_l2"] = weighted_l2(mask);
  out["variance_bound_mean"] = variance_bound_mean(mask, n, k2);
  if (t) out["variance_bound_prob"] = variance_bound_prob(mask, n, *t, k2);
  if (desc.kind == MaskDescriptor::Kind::Band || desc.kind == MaskDescriptor::Kind::Taper) {
    out["corollary_bound"] = corollary_bound(desc.bandwidth, p, n, k2);
    const auto est = corollary_norm_estimates(desc.bandwidth, p);
    out["corollary_norm_estimates"] = Json{{"weighted_l1", est.l1}, {"weighted_l2", est.l2}};
  }
  if (desc.kind == MaskDescriptor::Kind::Support) {
    const SupportSet s(p, desc.support);
    out["weighted_cardinality"] = weighted_cardinality(s);
    const double tt = t ? *t : std::log(static_cast<double>(p));
    if (tt > 0.0) out["sparse_bound"] = sparse_bound(s, n, tt, k2);
  }
  const int given = static_cast<int>(beta.has_value()) + static_cast<int>(L.has_value()) + static_cast<int>(L0.has_value());
  if (given != 0 && given != 3) throw UsageError("--beta, --L and --L0 must be given together");
  if (given == 3) {
    const SmoothnessParams sp{*beta, *L0, *L};
    const auto tap = tapering_bandwidth(sp, n, p);
    const auto band = banding_bandwidth(sp, n, p);
    out["tapering_bandwidth"] = Json{{"m", tap.m}, {"clamped", tap.clamped}, {"unrounded", tap.unrounded}};
    out["banding_bandwidth"] = Json{{"m", band.m}, {"clamped", band.clamped}, {"unrounded", band.unrounded}};
    out["bias_bound_tapering"] = bias_bound_tapering(sp, tap.m);
    out["bias_bound_banding"] = bias_bound_banding(sp, band.m);
    if (desc.kind == MaskDescriptor::Kind::Band) out["bias_bound_at_mask"] = bias_bound_banding(sp, desc.bandwidth);
    if (desc.kind == MaskDescriptor::Kind::Taper) out["bias_bound_at_mask"] = bias_bound_tapering(sp, desc.bandwidth);
  }
  print_json(out);
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& out_override) {
  SweepConfig cfg = sweep_config_from_json(read_json_file(config));
  if (!out_override.empty()) cfg.output = out_override;
  const SweepResult result = run_sweep(cfg);
  const std::string csv = sweep_csv(result.records);
  if (cfg.output.empty() || cfg.output == "-") {
    std::cout << csv;
  } else {
    write_text_file(cfg.output, csv);
  }
  if (result.any_failed) {
    for (const auto& r : result.records) {
      if (r.failed) {
        std::cerr << "toepcov: cell p=" << r.p << " n=" << r.n << " mask=" << r.mask << " failed: " << r.failure_reason
                  << '\n';
      }
    }
    return 1;
  }
  return 0;
}

int cmd_plot(const std::string& csv, const std::string& x, const std::string& y, const std::string& out, bool bound,
             const std::string& title) {
  PlotOptions opt;
  opt.x = parse_axis(x);
  opt.y = parse_metric(y);
  opt.bound_overlay = bound;
  opt.title = title;
  write_text_file(out, render_svg(parse_sweep_csv(read_text_file(csv)), opt));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Masked Toeplitz covariance estimation toolkit"};
  app.require_subcommand(1, 1);

  auto* gen = app.add_subcommand("gen-cov", "Generate a Toeplitz covariance (JSON on stdout)");
  std::string model;
  std::optional<std::size_t> gen_p;
  double rho = 0.5, beta = 1.0, L = 1.0, amplitude = 1.0;
  std::optional<double> gen_L0;
  std::string support, gen_in;
  gen->add_option("--model", model, "geometric | polynomial | sparse | identity | file")->required();
  gen->add_option("--p", gen_p, "Dimension");
  gen->add_option("--rho", rho, "Geometric ratio in [0,1)");
  gen->add_option("--beta", beta, "Polynomial decay order");
  gen->add_option("--L0", gen_L0, "Cap on ||f||_inf");
  gen->add_option("--L", L, "Smoothness constant (recorded only)");
  gen->add_option("--amplitude", amplitude, "Requested amplitude A");
  gen->add_option("--support", support, "Sparse support, e.g. 0,1,2,8");
  gen->add_option("--in", gen_in, "Toeplitz JSON for --model file");

  auto* smp = app.add_subcommand("sample", "Draw samples to a TCOV0001 (or .csv) file");
  std::string cov_file, family, sample_out;
  std::size_t sample_n = 0;
  std::optional<std::uint64_t> seed;
  double c = 1.0;
  std::uint64_t trial = 0;
  smp->add_option("--cov", cov_file, "Toeplitz JSON or SamplerSpec JSON")->required();
  smp->add_option("--family", family, "gaussian | rademacher | sphere");
  smp->add_option("--n", sample_n, "Number of samples")->required()->check(CLI::PositiveNumber);
  smp->add_option("--seed", seed, "Seed");
  smp->add_option("--out", sample_out, "Output file (.csv for CSV)")->required();
  smp->add_option("--c", c, "Rademacher c.c.p. constant");
  smp->add_option("--trial", trial, "Trial index selecting the random stream");

  auto* est = app.add_subcommand("estimate", "Masked diagonal-averaged Toeplitz estimate");
  std::string samples, est_mask;
  bool center = false;
  est->add_option("--samples", samples, "Sample file")->required();
  est->add_option("--mask", est_mask, "band:M | taper:M | support:FILE | ones")->required();
  est->add_flag("--center", center, "Subtract the sample mean first");

  auto* psd = app.add_subcommand("psd-project", "Positive semidefinite Toeplitz projection");
  std::string psd_in;
  psd->add_option("--in", psd_in, "Toeplitz JSON")->required();

  auto* bnd = app.add_subcommand("bound", "Evaluate error-bound shape values");
  std::string bnd_mask;
  std::size_t bnd_n = 0, bnd_p = 0;
  std::optional<double> t, bnd_beta, bnd_L, bnd_L0;
  double k2 = 1.0;
  bnd->add_option("--mask", bnd_mask, "band:M | taper:M | support:FILE | ones")->required();
  bnd->add_option("--n", bnd_n, "Sample count")->required()->check(CLI::PositiveNumber);
  bnd->add_option("--p", bnd_p, "Dimension")->required()->check(CLI::PositiveNumber);
  bnd->add_option("--t", t, "Deviation parameter t > 0");
  bnd->add_option("--k2", k2, "c.c.p. constant K^2 (default 1)");
  bnd->add_option("--beta", bnd_beta, "Smoothness order");
  bnd->add_option("--L", bnd_L, "Smoothness constant L");
  bnd->add_option("--L0", bnd_L0, "Norm cap L0");

  auto* swp = app.add_subcommand("sweep", "Run a Monte Carlo sweep (CSV)");
  std::string config, sweep_out;
  swp->add_option("--config", config, "Sweep config JSON")->required();
  swp->add_option("--out", sweep_out, "Output CSV (overrides config)");

  auto* plt = app.add_subcommand("plot", "Log-log SVG chart of a sweep CSV");
  std::string csv, x_axis, y_metric, plot_out, title;
  bool bound_overlay = false;
  plt->add_option("--csv", csv, "Sweep CSV")->required();
  plt->add_option("--x", x_axis, "n | p | m")->required()->check(CLI::IsMember({"n", "p", "m"}));
  plt->add_option("--y", y_metric, "mean_error | mean_error_psd | bound_mean")
      ->required()
      ->check(CLI::IsMember({"mean_error", "mean_error_psd", "bound_mean", "mean_error_sample_cov"}));
  plt->add_option("--out", plot_out, "Output SVG")->required();
  plt->add_flag("--bound", bound_overlay, "Overlay the bound shape");
  plt->add_option("--title", title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return cmd_gen_cov(model, gen_p, rho, beta, gen_L0, L, amplitude, support, gen_in);
    if (*smp) return cmd_sample(cov_file, family, sample_n, seed, sample_out, c, trial);
    if (*est) return cmd_estimate(samples, est_mask, center);
    if (*psd) return cmd_psd_project(psd_in);
    if (*bnd) return cmd_bound(bnd_mask, bnd_n, bnd_p, t, k2, bnd_beta, bnd_L, bnd_L0);
    if (*swp) return cmd_sweep(config, sweep_out);
    if (*plt) return cmd_plot(csv, x_axis, y_metric, plot_out, bound_overlay, title);
  } catch (const UsageError& e) {
    std::cerr << "toepcov: usage: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "toepcov: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
