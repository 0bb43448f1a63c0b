#include "tropescope/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

namespace tropescope::svg {

namespace {

constexpr double kWidth = 840;
constexpr double kHeight = 520;
constexpr double kLeft = 70;
constexpr double kRight = 24;
constexpr double kTop = 28;
constexpr double kBottom = 56;
constexpr int kCurveSamples = 400;

std::string strf(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

// 1-2-5 tick step covering the range with at most `target` ticks.
double nice_step(double range, int target) {
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string tick_label(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e7) return strf("%.0f", v);
  return strf("%.4g", v);
}

}  // namespace

std::string distribution_figure(std::span<const report::HistBin> bins, std::size_t n,
                                const fitting::FitResult* fit, const std::string& x_label) {
  const double x_min = bins.front().lower;
  const double x_max = bins.back().lower + bins.back().width;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double dn = static_cast<double>(n);

  double y_max = 0;
  for (const auto& b : bins) y_max = std::max(y_max, static_cast<double>(b.count) / (dn * b.width));
  std::vector<double> curve_x, curve_y;
  if (fit) {
    curve_x.reserve(kCurveSamples + 1);
    curve_y.reserve(kCurveSamples + 1);
    for (int i = 0; i <= kCurveSamples; ++i) {
      const double x = x_min + (x_max - x_min) * i / kCurveSamples;
      const double y = fitting::pdf(fit->family, x, fit->params);
      curve_x.push_back(x);
      curve_y.push_back(y);
      if (std::isfinite(y)) y_max = std::max(y_max, y);
    }
  }
  if (y_max <= 0) y_max = 1;
  y_max *= 1.06;

  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kTop + plot_h - y / y_max * plot_h; };

  std::string out;
  out.reserve(16 * 1024);
  out += strf(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
      "viewBox=\"0 0 %.0f %.0f\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& b : bins) {
    if (b.count == 0) continue;
    const double density = static_cast<double>(b.count) / (dn * b.width);
    const double x0 = sx(b.lower);
    const double x1 = sx(b.lower + b.width);
    const double y0 = sy(density);
    out += strf(
        "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#9ecae1\" "
        "stroke=\"#6baed6\" stroke-width=\"0.5\"/>\n",
        x0, y0, x1 - x0, kTop + plot_h - y0);
  }

  if (fit) {
    std::string pts;
    for (std::size_t i = 0; i < curve_x.size(); ++i) {
      if (!std::isfinite(curve_y[i])) continue;
      const double y = std::min(curve_y[i], y_max);
      pts += strf("%.2f,%.2f ", sx(curve_x[i]), sy(y));
    }
    if (!pts.empty()) pts.pop_back();
    out += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.8\" points=\"" + pts +
           "\"/>\n";
    const std::string label =
        strf("%s fit (location=%.4g, shape=%.4g, scale=%.4g)", family_name(fit->family).data(),
             fit->params.location, fit->params.shape, fit->params.scale);
    out += strf(
        "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#d62728\" "
        "stroke-width=\"1.8\"/>\n",
        kLeft + plot_w - 250.0, kTop + 14.0, kLeft + plot_w - 222.0, kTop + 14.0);
    out += strf(
        "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
        kLeft + plot_w - 216.0, kTop + 18.0, label.c_str());
  }

  // Axes.
  out += strf(
      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kLeft,
      kTop + plot_h, kLeft + plot_w, kTop + plot_h);
  out += strf("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", kLeft,
              kTop, kLeft, kTop + plot_h);

  const double x_step = nice_step(x_max - x_min, 8);
  for (double t = std::ceil(x_min / x_step) * x_step; t <= x_max + 1e-9; t += x_step) {
    const double px = sx(t);
    out += strf("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", px,
                kTop + plot_h, px, kTop + plot_h + 5);
    out += strf(
        "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"11\">%s</text>\n",
        px, kTop + plot_h + 18, tick_label(t).c_str());
  }
  const double y_step = nice_step(y_max, 6);
  for (double t = 0; t <= y_max + 1e-12; t += y_step) {
    const double py = sy(t);
    out += strf("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                kLeft - 5, py, kLeft, py);
    out += strf(
        "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-family=\"sans-serif\" "
        "font-size=\"11\">%s</text>\n",
        kLeft - 8, py + 4, tick_label(t).c_str());
  }

  out += strf(
      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"13\">%s</text>\n",
      kLeft + plot_w / 2, kHeight - 14.0, x_label.c_str());
  out += strf(
      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"13\" transform=\"rotate(-90 %.2f %.2f)\">density</text>\n",
      18.0, kTop + plot_h / 2, 18.0, kTop + plot_h / 2);

  out += "</svg>\n";
  return out;
}

}  // namespace tropescope::svg
