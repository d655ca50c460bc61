#pragma once

// Static log-log line charts of sweep records as SVG 1.1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "toepcov/error.hpp"
#include "toepcov/harness.hpp"

namespace toepcov {

struct PlotOptions {
  Axis x = Axis::N;
  Metric y = Metric::MeanError;
  bool bound_overlay = false;  ///< dashed bound_mean curve rescaled to each series' first point
  std::string title;
  int width = 720;
  int height = 480;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string axis_name(Axis a) {
  switch (a) {
    case Axis::N: return "n";
    case Axis::P: return "p";
    case Axis::M: return "m";
  }
  return "";
}

inline std::string metric_name(Metric m) {
  switch (m) {
    case Metric::MeanError: return "mean_error";
    case Metric::MeanErrorPsd: return "mean_error_psd";
    case Metric::MeanErrorSampleCov: return "mean_error_sample_cov";
    case Metric::BoundMean: return "bound_mean";
  }
  return "";
}

/// Label of everything that stays fixed along a series.
inline std::string series_key(const SweepRecord& r, Axis x) {
  std::string key;
  if (x != Axis::P) key += "p=" + std::to_string(r.p) + " ";
  if (x != Axis::N) key += "n=" + std::to_string(r.n) + " ";
  key += r.mask;
  if (x != Axis::M && !r.m_or_support.empty()) key += ":" + r.m_or_support;
  return key;
}

/// Tick positions (in value space) covering [lo, hi] on a log axis.
inline std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const int e0 = static_cast<int>(std::floor(std::log10(lo)));
  const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
  const bool fine = (e1 - e0) <= 2;
  for (int e = e0; e <= e1; ++e) {
    for (double mult : fine ? std::vector<double>{1, 2, 5} : std::vector<double>{1}) {
      const double v = mult * std::pow(10.0, e);
      if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) ticks.push_back(v);
    }
  }
  return ticks;
}

inline std::string tick_label(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

inline std::string render_svg(const std::vector<SweepRecord>& records, const PlotOptions& opt) {
  struct Point {
    double x, y, lo, hi, bound;
  };
  std::map<std::string, std::vector<Point>> series;
  const bool bars = opt.y == Metric::MeanError;
  for (const auto& r : records) {
    const double x = axis_value(r, opt.x);
    const double y = metric_value(r, opt.y);
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(y)) continue;
    double lo = y, hi = y;
    if (bars && std::isfinite(r.std_error)) {
      lo = y - 2.0 * r.std_error;
      hi = y + 2.0 * r.std_error;
    }
    series[detail::series_key(r, opt.x)].push_back({x, y, lo, hi, r.bound_mean});
  }
  if (series.empty()) throw Error(ErrorCode::Degenerate, "no plottable records (need positive x and y values)");

  double xmin = INFINITY, xmax = 0, ymin = INFINITY, ymax = 0;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    for (const auto& pt : pts) {
      xmin = std::min(xmin, pt.x);
      xmax = std::max(xmax, pt.x);
      ymin = std::min(ymin, pt.lo > 0 ? pt.lo : pt.y);
      ymax = std::max(ymax, pt.hi);
      if (opt.bound_overlay && pts.front().bound > 0.0 && pt.bound > 0.0) {
        const double b = pt.bound * pts.front().y / pts.front().bound;
        ymin = std::min(ymin, b);
        ymax = std::max(ymax, b);
      }
    }
  }
  // Pad degenerate ranges so the log mapping stays finite.
  if (xmax <= xmin) { xmin /= 2; xmax *= 2; }
  if (ymax <= ymin) { ymin /= 2; ymax *= 2; }
  xmin /= 1.1; xmax *= 1.1; ymin /= 1.2; ymax *= 1.2;

  const double left = 80, right = 200, top = 40, bottom = 60;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto sx = [&](double v) { return left + pw * (std::log(v) - std::log(xmin)) / (std::log(xmax) - std::log(xmin)); };
  auto sy = [&](double v) {
    v = std::max(v, ymin);
    return top + ph * (1.0 - (std::log(v) - std::log(ymin)) / (std::log(ymax) - std::log(ymin)));
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream os;
  os.precision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height << "\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    os << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
       << detail::xml_escape(opt.title) << "</text>\n";
  }
  os << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : detail::log_ticks(xmin, xmax)) os << "<line x1=\"" << sx(t) << "\" y1=\"" << top << "\" x2=\"" << sx(t) << "\" y2=\"" << top + ph << "\"/>\n";
  for (double t : detail::log_ticks(ymin, ymax)) os << "<line x1=\"" << left << "\" y1=\"" << sy(t) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(t) << "\"/>\n";
  os << "</g>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double t : detail::log_ticks(xmin, xmax)) {
    os << "<text x=\"" << sx(t) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << detail::tick_label(t) << "</text>\n";
  }
  for (double t : detail::log_ticks(ymin, ymax)) {
    os << "<text x=\"" << left - 6 << "\" y=\"" << sy(t) + 4 << "\" text-anchor=\"end\">" << detail::tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << opt.height - 18 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << detail::axis_name(opt.x) << " (log scale)</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << top + ph / 2 << ")\">" << detail::metric_name(opt.y) << " (log scale)</text>\n";
  os << "</g>\n";

  std::size_t idx = 0;
  for (const auto& [key, pts] : series) {
    const char* color = palette[idx % (sizeof(palette) / sizeof(palette[0]))];
    os << "<g class=\"series\" stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    os << "<polyline fill=\"none\" stroke-width=\"2\" points=\"";
    for (const auto& pt : pts) os << sx(pt.x) << "," << sy(pt.y) << " ";
    os << "\"/>\n";
    for (const auto& pt : pts) {
      if (bars && pt.hi > pt.lo) {
        const double x = sx(pt.x);
        os << "<line class=\"errorbar\" stroke-width=\"1\" x1=\"" << x << "\" y1=\"" << sy(pt.lo) << "\" x2=\"" << x
           << "\" y2=\"" << sy(pt.hi) << "\"/>\n";
        os << "<line stroke-width=\"1\" x1=\"" << x - 4 << "\" y1=\"" << sy(pt.hi) << "\" x2=\"" << x + 4 << "\" y2=\""
           << sy(pt.hi) << "\"/>\n";
        os << "<line stroke-width=\"1\" x1=\"" << x - 4 << "\" y1=\"" << sy(pt.lo) << "\" x2=\"" << x + 4 << "\" y2=\""
           << sy(pt.lo) << "\"/>\n";
      }
      os << "<circle class=\"point\" cx=\"" << sx(pt.x) << "\" cy=\"" << sy(pt.y) << "\" r=\"3\"/>\n";
    }
    if (opt.bound_overlay && pts.front().bound > 0.0) {
      const double scale = pts.front().y / pts.front().bound;
      os << "<polyline class=\"bound\" fill=\"none\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\" points=\"";
      for (const auto& pt : pts) {
        if (pt.bound > 0.0) os << sx(pt.x) << "," << sy(pt.bound * scale) << " ";
      }
      os << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(idx);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4
       << "\" stroke=\"none\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(key) << "</text>\n";
    os << "</g>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace toepcov
