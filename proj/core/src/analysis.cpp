#include "chemolimit/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "chemolimit/error.hpp"

namespace chemolimit {

double Polyline::length() const {
  double total = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k)
    total += std::hypot(points[k].x - points[k - 1].x, points[k].y - points[k - 1].y);
  if (closed && points.size() > 1)
    total += std::hypot(points.front().x - points.back().x, points.front().y - points.back().y);
  return total;
}

double total_length(const std::vector<Polyline>& lines) {
  double total = 0.0;
  for (const Polyline& p : lines) total += p.length();
  return total;
}

std::vector<Polyline> extract_interface(const ScalarField& u, double level) {
  const Grid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  const std::size_t n_h = static_cast<std::size_t>(nx - 1) * ny;
  const std::size_t n_edges = n_h + static_cast<std::size_t>(nx) * (ny - 1);
  auto h_edge = [&](int i, int j) { return static_cast<std::size_t>(j) * (nx - 1) + i; };
  auto v_edge = [&](int i, int j) { return n_h + static_cast<std::size_t>(j) * nx + i; };
  auto above = [&](int i, int j) { return u(i, j) > level; };

  std::vector<Point> point(n_edges);
  std::vector<std::array<long, 2>> nbr(n_edges, {-1, -1});
  std::vector<char> has(n_edges, 0);

  auto crossing = [&](int i0, int j0, int i1, int j1) {
    double a = u(i0, j0), b = u(i1, j1);
    double t = (level - a) / (b - a);
    return Point{g.x(i0) + t * (g.x(i1) - g.x(i0)), g.y(j0) + t * (g.y(j1) - g.y(j0))};
  };
  auto touch = [&](std::size_t e, int i0, int j0, int i1, int j1) {
    if (!has[e]) {
      has[e] = 1;
      point[e] = crossing(i0, j0, i1, j1);
    }
  };
  auto link = [&](std::size_t a, std::size_t b) {
    (nbr[a][0] < 0 ? nbr[a][0] : nbr[a][1]) = static_cast<long>(b);
    (nbr[b][0] < 0 ? nbr[b][0] : nbr[b][1]) = static_cast<long>(a);
  };

  for (int j = 0; j < ny - 1; ++j) {
    for (int i = 0; i < nx - 1; ++i) {
      int c = (above(i, j) ? 1 : 0) | (above(i + 1, j) ? 2 : 0) | (above(i + 1, j + 1) ? 4 : 0) |
              (above(i, j + 1) ? 8 : 0);
      if (c == 0 || c == 15) continue;
      const std::size_t eb = h_edge(i, j), er = v_edge(i + 1, j), et = h_edge(i, j + 1), el = v_edge(i, j);
      std::vector<std::size_t> crossing_edges;
      if (((c & 1) != 0) != ((c & 2) != 0)) touch(eb, i, j, i + 1, j), crossing_edges.push_back(eb);
      if (((c & 2) != 0) != ((c & 4) != 0)) touch(er, i + 1, j, i + 1, j + 1), crossing_edges.push_back(er);
      if (((c & 4) != 0) != ((c & 8) != 0)) touch(et, i, j + 1, i + 1, j + 1), crossing_edges.push_back(et);
      if (((c & 8) != 0) != ((c & 1) != 0)) touch(el, i, j, i, j + 1), crossing_edges.push_back(el);
      if (crossing_edges.size() == 2) {
        link(crossing_edges[0], crossing_edges[1]);
        continue;
      }
      const double centre = 0.25 * (u(i, j) + u(i + 1, j) + u(i + 1, j + 1) + u(i, j + 1));
      const bool centre_above = centre > level;
      // Cut off the corners that are not connected through the centre.
      const bool cut_low_corners = (c == 5) != centre_above;
      if (cut_low_corners) {
        link(el, eb);  // corner (i, j)
        link(er, et);  // corner (i+1, j+1)
      } else {
        link(eb, er);  // corner (i+1, j)
        link(et, el);  // corner (i, j+1)
      }
    }
  }

  std::vector<char> seen(n_edges, 0);
  std::vector<Polyline> out;
  auto trace = [&](std::size_t start) {
    Polyline line;
    long prev = -1;
    long cur = static_cast<long>(start);
    while (cur >= 0 && !seen[cur]) {
      seen[cur] = 1;
      line.points.push_back(point[cur]);
      long next = -1;
      for (long cand : nbr[cur])
        if (cand >= 0 && cand != prev && !seen[cand]) {
          next = cand;
          break;
        }
      if (next < 0) {
        for (long cand : nbr[cur])
          if (cand == static_cast<long>(start) && cand != prev && line.points.size() > 2) line.closed = true;
      }
      prev = cur;
      cur = next;
    }
    std::vector<Point> clean;
    for (const Point& p : line.points)
      if (clean.empty() || std::hypot(p.x - clean.back().x, p.y - clean.back().y) > 1e-14) clean.push_back(p);
    if (line.closed && clean.size() > 1 &&
        std::hypot(clean.front().x - clean.back().x, clean.front().y - clean.back().y) <= 1e-14)
      clean.pop_back();
    line.points = std::move(clean);
    if (line.closed && line.points.size() < 3) line.closed = false;
    if (line.points.size() >= 2) out.push_back(std::move(line));
  };
  for (std::size_t e = 0; e < n_edges; ++e) {
    if (!has[e] || seen[e]) continue;
    int degree = (nbr[e][0] >= 0) + (nbr[e][1] >= 0);
    if (degree <= 1) trace(e);
  }
  for (std::size_t e = 0; e < n_edges; ++e)
    if (has[e] && !seen[e]) trace(e);
  return out;
}

Polyline refine(const Polyline& line, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("refine: spacing must be positive");
  Polyline out;
  out.closed = line.closed;
  const std::size_t n = line.points.size();
  const std::size_t segments = line.closed ? n : (n > 0 ? n - 1 : 0);
  for (std::size_t k = 0; k < segments; ++k) {
    const Point a = line.points[k], b = line.points[(k + 1) % n];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int s = 0; s < pieces; ++s) {
      double t = static_cast<double>(s) / pieces;
      out.points.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  if (!line.closed && n > 0) out.points.push_back(line.points.back());
  return out;
}

namespace {

double point_segment(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double auto_spacing(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto* set : {&a, &b}) {
    for (const Polyline& p : *set) {
      std::size_t segs = p.closed ? p.points.size() : p.points.size() - 1;
      if (segs > 0) best = std::min(best, p.length() / segs);
    }
  }
  return std::isfinite(best) && best > 0.0 ? 0.25 * best : 1e-3;
}

void require_nonempty(const std::vector<Polyline>& lines) {
  bool any = std::any_of(lines.begin(), lines.end(), [](const Polyline& p) { return !p.points.empty(); });
  if (!any) throw DomainError("hausdorff: empty input");
}

}  // namespace

double directed_hausdorff(const std::vector<Polyline>& a, const std::vector<Polyline>& b, double spacing) {
  require_nonempty(a);
  require_nonempty(b);
  if (spacing <= 0.0) spacing = auto_spacing(a, b);
  double worst = 0.0;
  for (const Polyline& line : a) {
    Polyline fine = refine(line, spacing);
    if (line.points.size() == 1) fine = line;
    for (const Point& p : fine.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const Polyline& other : b) {
        const std::size_t n = other.points.size();
        if (n == 1) best = std::min(best, std::hypot(p.x - other.points[0].x, p.y - other.points[0].y));
        const std::size_t segs = other.closed ? n : n - 1;
        for (std::size_t k = 0; k < segs; ++k)
          best = std::min(best, point_segment(p, other.points[k], other.points[(k + 1) % n]));
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

double hausdorff(const std::vector<Polyline>& a, const std::vector<Polyline>& b, double spacing) {
  if (spacing <= 0.0) {
    require_nonempty(a);
    require_nonempty(b);
    spacing = auto_spacing(a, b);
  }
  return std::max(directed_hausdorff(a, b, spacing), directed_hausdorff(b, a, spacing));
}

double hausdorff(const Polyline& a, const Polyline& b, double spacing) {
  return hausdorff(std::vector<Polyline>{a}, std::vector<Polyline>{b}, spacing);
}

namespace {

double keys(double s) {
  constexpr double a = -0.5;
  s = std::abs(s);
  if (s <= 1.0) return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
  if (s < 2.0) return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a;
  return 0.0;
}

int mirror(int i, int n) {
  if (i < 0) return std::min(-i, n - 1);
  if (i >= n) return std::max(2 * (n - 1) - i, 0);
  return i;
}

}  // namespace

double interpolate_cubic(const ScalarField& f, double x, double y) {
  const Grid& g = f.grid();
  x = std::clamp(x, 0.0, g.lx());
  y = std::clamp(y, 0.0, g.ly());
  const int i = std::min(static_cast<int>(x / g.hx()), g.nx() - 2);
  const int j = std::min(static_cast<int>(y / g.hy()), g.ny() - 2);
  const double tx = x / g.hx() - i, ty = y / g.hy() - j;
  double wx[4], wy[4];
  for (int k = 0; k < 4; ++k) {
    wx[k] = keys(tx - (k - 1));
    wy[k] = keys(ty - (k - 1));
  }
  double total = 0.0;
  for (int b = 0; b < 4; ++b) {
    const int jj = mirror(j - 1 + b, g.ny());
    double row = 0.0;
    for (int a = 0; a < 4; ++a) row += wx[a] * f(mirror(i - 1 + a, g.nx()), jj);
    total += wy[b] * row;
  }
  return total;
}

ThicknessReport layer_thickness_report(const ScalarField& u, double eta) {
  if (!(eta > 0.0 && eta < 0.25)) throw DomainError("layer_thickness: eta must lie in (0, 1/4)");
  const Grid& g = u.grid();
  const double h = g.h_min();
  const double ds = 0.25 * h;
  const double reach = 0.5 * std::min(g.lx(), g.ly());
  auto inside = [&](double x, double y) { return x >= 0.0 && y >= 0.0 && x <= g.lx() && y <= g.ly(); };

  // First s > 0 along p + s*dir where value(s) crosses the target (decreasing or increasing).
  auto search = [&](Point p, double dx, double dy, double target, bool falling, double& s_out) {
    auto value = [&](double s) { return interpolate_cubic(u, p.x + s * dx, p.y + s * dy); };
    auto hit = [&](double v) { return falling ? v <= target : v >= target; };
    double prev = 0.0;
    for (double s = ds; s <= reach; s += ds) {
      if (!inside(p.x + s * dx, p.y + s * dy)) return false;
      if (hit(value(s))) {
        double lo = prev, hi = s;
        for (int it = 0; it < 40; ++it) {
          double mid = 0.5 * (lo + hi);
          (hit(value(mid)) ? hi : lo) = mid;
        }
        s_out = 0.5 * (lo + hi);
        return true;
      }
      prev = s;
    }
    return false;
  };

  ThicknessReport report{0.0, 0.0, 0, 0};
  double sum = 0.0;
  for (const Polyline& line : extract_interface(u, 0.5)) {
    for (const Point& p : line.points) {
      const double e = 0.5 * h;
      double gx = (interpolate_cubic(u, p.x + e, p.y) - interpolate_cubic(u, p.x - e, p.y)) / (2 * e);
      double gy = (interpolate_cubic(u, p.x, p.y + e) - interpolate_cubic(u, p.x, p.y - e)) / (2 * e);
      double norm = std::hypot(gx, gy);
      if (!(norm > 0.0)) {
        ++report.lines_skipped;
        continue;
      }
      // Unit vector towards decreasing u.
      const double nx = -gx / norm, ny = -gy / norm;
      double s_low = 0.0, s_high = 0.0;
      bool ok = search(p, nx, ny, eta, true, s_low) && search(p, -nx, -ny, 1.0 - eta, false, s_high);
      if (!ok) {
        ++report.lines_skipped;
        continue;
      }
      const double width = s_low + s_high;
      report.thickness = std::max(report.thickness, width);
      sum += width;
      ++report.lines_used;
    }
  }
  if (report.lines_used == 0) throw NumericalError("layer_thickness: no sample line crosses both levels");
  report.mean = sum / report.lines_used;
  return report;
}

double layer_thickness(const ScalarField& u, double eta) { return layer_thickness_report(u, eta).thickness; }

ConvergenceFit fit_rate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw DomainError("fit_rate: need at least 3 samples");
  std::set<double> distinct;
  for (const auto& [eps, metric] : samples) {
    if (!(eps > 0.0)) throw DomainError("fit_rate: eps must be positive");
    if (!(metric > 0.0)) throw DomainError("fit_rate: metric must be positive");
    distinct.insert(eps);
  }
  if (distinct.size() != samples.size()) throw DomainError("fit_rate: eps values must be distinct");
  const double n = static_cast<double>(samples.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [eps, metric] : samples) {
    double x = std::log(eps), y = std::log(metric);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (const auto& [eps, metric] : samples) {
    double r = std::log(metric) - (intercept + slope * std::log(eps));
    ss += r * r;
  }
  return {slope, intercept, std::sqrt(ss / n), samples};
}

GenerationReport generation_check(const ScalarField& u, const ScalarField& u0, double m0, double eps, double eta) {
  require_same_grid(u.grid(), u0.grid(), "generation_check");
  GenerationReport r{};
  r.min_u = u.min();
  r.max_u = u.max();
  r.worst_upper = std::numeric_limits<double>::infinity();
  r.worst_lower = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u0[k] >= 0.5 + m0 * eps) {
      r.worst_upper = std::min(r.worst_upper, u[k]);
      ++r.upper_nodes;
    }
    if (u0[k] <= 0.5 - m0 * eps) {
      r.worst_lower = std::max(r.worst_lower, u[k]);
      ++r.lower_nodes;
    }
  }
  r.margin = std::min(r.min_u + eta, 1.0 + eta - r.max_u);
  if (r.upper_nodes > 0) r.margin = std::min(r.margin, r.worst_upper - (1.0 - eta));
  if (r.lower_nodes > 0) r.margin = std::min(r.margin, eta - r.worst_lower);
  r.passed = r.margin >= 0.0;
  return r;
}

CircleFit fit_circle(const std::vector<Polyline>& lines) {
  double sx = 0.0, sy = 0.0;
  long n = 0;
  for (const Polyline& p : lines)
    for (const Point& q : p.points) {
      sx += q.x;
      sy += q.y;
      ++n;
    }
  if (n == 0) throw DomainError("fit_circle: no vertices");
  CircleFit fit{sx / n, sy / n, 0.0, 0.0};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
  for (const Polyline& p : lines)
    for (const Point& q : p.points) {
      double r = std::hypot(q.x - fit.cx, q.y - fit.cy);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      sum += r;
    }
  fit.mean_radius = sum / n;
  fit.spread = hi - lo;
  return fit;
}

}  // namespace chemolimit
