#include "swarmlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "swarmlab/reports.hpp"

namespace swarmlab {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string psi_chart_svg(const PotentialTrace& trace, const SvgOptions& opt) {
  const double left = 60, right = 20, top = 30, bottom = 40;
  const double w = opt.width - left - right;
  const double h = opt.height - top - bottom;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) +
                    "\" height=\"" + std::to_string(opt.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    out += "<text x=\"" + num(left) + "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" +
           escape(opt.title) + "</text>\n";
  }
  const std::size_t n = trace.samples();
  if (n == 0) return out + "</svg>\n";

  double lo = opt.y_min, hi = opt.y_max;
  if (lo == 0.0 && hi == 0.0) {
    lo = *std::min_element(trace.psi.begin(), trace.psi.end());
    hi = 0.0;
    if (lo == hi) lo = -1.0;
  }
  const double t0 = static_cast<double>(trace.time_of(0));
  const double t1 = std::max(t0 + 1.0, static_cast<double>(trace.time_of(n - 1)));
  auto X = [&](double t) { return left + (t - t0) / (t1 - t0) * w; };
  auto Y = [&](double v) { return top + (hi - std::clamp(v, lo, hi)) / (hi - lo) * h; };

  out += "<g stroke=\"black\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + h) + "\" x2=\"" + num(left + w) + "\" y2=\"" +
         num(top + h) + "\"/>\n";
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + h) +
         "\"/>\n</g>\n";
  out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = hi - (hi - lo) * k / 4.0;
    const double t = t0 + (t1 - t0) * k / 4.0;
    out += "<text x=\"4\" y=\"" + num(Y(v) + 4) + "\">" + fmt(std::round(v * 10) / 10) + "</text>\n";
    out += "<text x=\"" + num(X(t) - 10) + "\" y=\"" + num(top + h + 16) + "\">" + fmt(std::round(t)) +
           "</text>\n";
  }
  out += "<text x=\"" + num(left + w / 2) + "\" y=\"" + num(top + h + 34) + "\">t</text>\n</g>\n";

  // thin long series so the file stays small
  const std::size_t stride = std::max<std::size_t>(1, n / 2000);
  for (int d = 0; d < trace.dims; ++d) {
    out += "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" + std::string(kPalette[d % 10]) +
           "\" points=\"";
    for (std::size_t row = 0; row < n; row += stride) {
      out += num(X(static_cast<double>(trace.time_of(row)))) + "," + num(Y(trace.psi_at(row, d))) + " ";
    }
    out += "\"><title>d=" + std::to_string(d + 1) + "</title></polyline>\n";
  }
  return out + "</svg>\n";
}

std::string psi_series_csv(const PotentialTrace& trace) {
  std::string out = "t";
  for (int d = 1; d <= trace.dims; ++d) out += ",psi_" + std::to_string(d);
  out += '\n';
  for (std::size_t row = 0; row < trace.samples(); ++row) {
    out += std::to_string(trace.time_of(row));
    for (int d = 0; d < trace.dims; ++d) out += "," + fmt(trace.psi_at(row, d));
    out += '\n';
  }
  return out;
}

}  // namespace swarmlab
