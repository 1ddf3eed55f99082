#include "oracles.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace oracle {

using namespace dstori;

namespace {

// 8-point Gauss-Legendre on [-1,1]
constexpr std::array<double, 8> kNode = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kWeight = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

double gl(double x0, double x1, double y0, double y1) {
  double hx = 0.5 * (x1 - x0), hy = 0.5 * (y1 - y0);
  double mx = 0.5 * (x0 + x1), my = 0.5 * (y0 + y1);
  double s = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      double d = (mx + hx * kNode[i]) - (my + hy * kNode[j]);
      s += kWeight[i] * kWeight[j] / (d * d);
    }
  return s * hx * hy;
}

double adapt(double x0, double x1, double y0, double y1, double whole, double tol, int depth) {
  double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  double q[4] = {gl(x0, xm, y0, ym), gl(xm, x1, y0, ym), gl(x0, xm, ym, y1), gl(xm, x1, ym, y1)};
  double parts = q[0] + q[1] + q[2] + q[3];
  if (depth >= 40 || std::abs(parts - whole) <= tol) return parts;
  return adapt(x0, xm, y0, ym, q[0], tol / 4, depth + 1) + adapt(xm, x1, y0, ym, q[1], tol / 4, depth + 1) +
         adapt(x0, xm, ym, y1, q[2], tol / 4, depth + 1) + adapt(xm, x1, ym, y1, q[3], tol / 4, depth + 1);
}

double coord(const MoebiusMap& m, const ProjectivePoint& p) { return apply(m, p).value(); }

}  // namespace

double quad_box(double x0, double x1, double y0, double y1, double tol) {
  return adapt(x0, x1, y0, y1, gl(x0, x1, y0, y1), tol, 0);
}

double quad_rectangle(const LightlikeRectangle& r) {
  MoebiusMap m = bounded_chart(r);
  double x0 = coord(m, r.xA), x1 = coord(m, r.xC), y0 = coord(m, r.yA), y1 = coord(m, r.yC);
  return quad_box(std::min(x0, x1), std::max(x0, x1), std::min(y0, y1), std::max(y0, y1));
}

double quad_polygon(const GluedSurface& s) {
  const auto& E = s.spec.edges;
  const MoebiusMap& m = s.geometry.chart;
  std::vector<double> xs;
  struct H {
    double xa, xb, y;
  };
  std::vector<H> hs;
  for (const auto& e : E) {
    double ax = coord(m, e.start.x), bx = coord(m, e.end.x);
    xs.push_back(ax);
    if (e.kind == LeafKind::alpha) hs.push_back({std::min(ax, bx), std::max(ax, bx), coord(m, e.start.y)});
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
           xs.end());
  double total = 0;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    double mid = 0.5 * (xs[i] + xs[i + 1]);
    std::vector<double> ys;
    for (const auto& h : hs)
      if (h.xa < mid && mid < h.xb) ys.push_back(h.y);
    std::sort(ys.begin(), ys.end());
    for (size_t k = 0; k + 1 < ys.size(); k += 2) total += quad_box(xs[i], xs[i + 1], ys[k], ys[k + 1]);
  }
  return total;
}

std::vector<std::set<size_t>> chase_orbits(const PolygonSpec& spec, double tol) {
  size_t n = spec.edges.size();
  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto same = [&](const DSPoint& p, const DSPoint& q) {
    return chordal(p.x, q.x) <= tol && chordal(p.y, q.y) <= tol;
  };
  for (const auto& pr : spec.pairings) {
    // corners on the bottom edge, their images among the corners on the top edge
    for (size_t cb : {pr.bottom, (pr.bottom + 1) % n}) {
      DSPoint img = apply(pr.map, spec.edges[cb].start);
      for (size_t ct : {pr.top, (pr.top + 1) % n})
        if (same(img, spec.edges[ct].start)) parent[find(cb)] = find(ct);
    }
  }
  std::vector<std::set<size_t>> out;
  std::vector<long> slot(n, -1);
  for (size_t c = 0; c < n; ++c) {
    size_t r = find(c);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(out.size());
      out.emplace_back();
    }
    out[slot[r]].insert(c);
  }
  return out;
}

double birkhoff_rotation(const CircleMap& m, long n) {
  double whole = 0, t = 0;  // position = whole + t, t in [0,1)
  for (long k = 0; k < n; ++k) {
    double v = m.lift01(t);
    double f = std::floor(v);
    whole += f;
    t = v - f;
  }
  return (whole + t) / static_cast<double>(n);
}

}  // namespace oracle
