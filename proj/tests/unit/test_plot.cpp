#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "toepcov/svg_plot.hpp"

using namespace toepcov;

namespace {
std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t c = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++c;
  return c;
}

std::vector<SweepRecord> two_series() {
  std::vector<SweepRecord> out;
  for (const char* mask : {"band", "taper"})
    for (std::size_t n : {32u, 64u, 128u}) {
      SweepRecord r;
      r.p = 64;
      r.n = n;
      r.mask = mask;
      r.m_or_support = "4";
      r.mean_error = 1.0 / std::sqrt(static_cast<double>(n));
      r.std_error = 0.01;
      r.mean_error_psd = 1.1 * r.mean_error;
      r.bound_mean = 2.0 / std::sqrt(static_cast<double>(n));
      out.push_back(r);
    }
  return out;
}
}  // namespace

TEST(RenderSvg, StructureWithErrorBars) {
  PlotOptions opt;
  opt.title = "n <scaling> & more";
  const auto svg = render_svg(two_series(), opt);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_EQ(count(svg, "class=\"series\""), 2u);
  EXPECT_EQ(count(svg, "class=\"point\""), 6u);
  EXPECT_EQ(count(svg, "class=\"errorbar\""), 6u);
  EXPECT_EQ(count(svg, "class=\"bound\""), 0u);
  EXPECT_NE(svg.find("n &lt;scaling&gt; &amp; more"), std::string::npos);
  EXPECT_NE(svg.find("mean_error (log scale)"), std::string::npos);
  EXPECT_NE(svg.find("p=64 band:4"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(RenderSvg, BoundOverlayAndNoBarsForOtherMetrics) {
  PlotOptions opt;
  opt.y = Metric::MeanErrorPsd;
  opt.bound_overlay = true;
  const auto svg = render_svg(two_series(), opt);
  EXPECT_EQ(count(svg, "class=\"errorbar\""), 0u);
  EXPECT_EQ(count(svg, "class=\"bound\""), 2u);
}

TEST(RenderSvg, SkipsNonPositiveAndRejectsEmpty) {
  auto recs = two_series();
  recs[0].mean_error = std::numeric_limits<double>::quiet_NaN();
  recs[1].mean_error = 0.0;
  const auto svg = render_svg(recs, PlotOptions{});
  EXPECT_EQ(count(svg, "class=\"point\""), 4u);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  try {
    render_svg({}, PlotOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Degenerate);
  }
}

TEST(RenderSvg, DegenerateRangeStaysFinite) {
  auto recs = two_series();
  recs.resize(1);
  const auto svg = render_svg(recs, PlotOptions{});
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
}
