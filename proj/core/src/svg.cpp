#include "chemolimit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace chemolimit {

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 60.0, kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Axis {
  bool log;
  double lo, hi;
  double map(double v) const { return log ? std::log10(v) : v; }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  Axis ax{spec.log_x, 0, 0}, ay{spec.log_y, 0, 0};
  auto usable = [&](const Point& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && (!spec.log_x || p.x > 0) && (!spec.log_y || p.y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : spec.series)
    for (const auto& path : s.paths)
      for (const auto& p : path)
        if (usable(p)) {
          x0 = std::min(x0, ax.map(p.x)), x1 = std::max(x1, ax.map(p.x));
          y0 = std::min(y0, ay.map(p.y)), y1 = std::max(y1, ay.map(p.y));
        }
  if (spec.x_max > spec.x_min) x0 = ax.map(spec.x_min), x1 = ax.map(spec.x_max);
  if (spec.y_max > spec.y_min) y0 = ay.map(spec.y_min), y1 = ay.map(spec.y_max);
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  if (!(spec.x_max > spec.x_min)) {
    double pad = 0.05 * (x1 - x0);
    x0 -= pad, x1 += pad;
  }
  if (!(spec.y_max > spec.y_min)) {
    double pad = 0.05 * (y1 - y0);
    y0 -= pad, y1 += pad;
  }
  ax.lo = x0, ax.hi = x1, ay.lo = y0, ay.hi = y1;

  double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  double sx = pw / (x1 - x0), sy = ph / (y1 - y0);
  double ox = kLeft, oy = kTop;
  if (spec.equal_aspect) {
    double s = std::min(sx, sy);
    ox += 0.5 * (pw - s * (x1 - x0));
    oy += 0.5 * (ph - s * (y1 - y0));
    sx = sy = s;
    pw = s * (x1 - x0), ph = s * (y1 - y0);
  }
  auto px = [&](double x) { return ox + (ax.map(x) - x0) * sx; };
  auto py = [&](double y) { return oy + ph - (ay.map(y) - y0) * sy; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
                    num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + escape(spec.title) + "</text>\n";
  double note_y = 40.0;
  for (const auto& n : spec.notes) {
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(note_y) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + escape(n) + "</text>\n";
    note_y += 13.0;
  }
  out += "<rect x=\"" + num(ox) + "\" y=\"" + num(oy) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  // Five ticks per axis, placed in mapped coordinates.
  for (int k = 0; k <= 4; ++k) {
    double mx = x0 + (x1 - x0) * k / 4.0, my = y0 + (y1 - y0) * k / 4.0;
    double vx = spec.log_x ? std::pow(10.0, mx) : mx, vy = spec.log_y ? std::pow(10.0, my) : my;
    double tx = ox + (mx - x0) * sx, ty = oy + ph - (my - y0) * sy;
    out += "<line x1=\"" + num(tx) + "\" y1=\"" + num(oy + ph) + "\" x2=\"" + num(tx) + "\" y2=\"" + num(oy + ph + 5) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(tx) + "\" y=\"" + num(oy + ph + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + label_num(vx) + "</text>\n";
    out += "<line x1=\"" + num(ox - 5) + "\" y1=\"" + num(ty) + "\" x2=\"" + num(ox) + "\" y2=\"" + num(ty) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(ox - 8) + "\" y=\"" + num(ty + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label_num(vy) + "</text>\n";
  }
  out += "<text x=\"" + num(ox + pw / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + escape(spec.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + num(oy + ph / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 " + num(oy + ph / 2) + ")\">" + escape(spec.y_label) + "</text>\n";

  double legend_y = oy + 14.0;
  for (const auto& s : spec.series) {
    for (const auto& path : s.paths) {
      if (s.markers) {
        for (const auto& p : path)
          if (usable(p))
            out += "<circle cx=\"" + num(px(p.x)) + "\" cy=\"" + num(py(p.y)) + "\" r=\"3.5\" fill=\"" + s.color +
                   "\"/>\n";
        continue;
      }
      std::string pts;
      for (const auto& p : path)
        if (usable(p)) pts += num(px(p.x)) + "," + num(py(p.y)) + " ";
      if (pts.empty()) continue;
      out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" +
             (s.dashed ? std::string(" stroke-dasharray=\"6 4\"") : std::string()) + " points=\"" + pts + "\"/>\n";
    }
    if (!s.label.empty()) {
      out += "<rect x=\"" + num(ox + 10) + "\" y=\"" + num(legend_y - 9) + "\" width=\"12\" height=\"3\" fill=\"" +
             s.color + "\"/>\n";
      out += "<text x=\"" + num(ox + 28) + "\" y=\"" + num(legend_y - 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.label) + "</text>\n";
      legend_y += 15.0;
    }
  }
  out += "</svg>\n";
  return out;
}

std::string rate_plot(const std::string& title, const ConvergenceFit& fit) {
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "eps";
  spec.y_label = "metric";
  spec.log_x = spec.log_y = true;
  PlotSeries data{"measured", {{}}, "#1f77b4", true, false};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& [e, m] : fit.samples) {
    data.paths[0].push_back({e, m});
    lo = std::min(lo, e), hi = std::max(hi, e);
  }
  char label[80];
  std::snprintf(label, sizeof label, "fit: slope %.3f", fit.slope);
  PlotSeries line{label, {{}}, "#d62728", false, true};
  for (double e : {lo, hi}) line.paths[0].push_back({e, std::exp(fit.intercept) * std::pow(e, fit.slope)});
  spec.series = {data, line};
  char note[120];
  std::snprintf(note, sizeof note, "slope %.4f, intercept %.4f, rms residual %.2e", fit.slope, fit.intercept,
                fit.residual);
  spec.notes.push_back(note);
  return render_svg(spec);
}

}  // namespace chemolimit
