#include "dstori/glue.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "dstori/errors.h"

namespace dstori {

const char* to_string(LeafKind k) { return k == LeafKind::alpha ? "alpha" : "beta"; }

LeafKind leaf_kind_from_string(const std::string& s) {
  if (s == "alpha" || s == "a") return LeafKind::alpha;
  if (s == "beta" || s == "b") return LeafKind::beta;
  throw Error(ErrorCode::InvalidSpec, "leaf kind must be alpha or beta, got " + s);
}

namespace {

constexpr double kCornerTol = 1e-10;
constexpr double kMapTol = 1e-9;

Json point_json(const DSPoint& p) { return Json::array({p.x.a, p.x.b, p.y.a, p.y.b}); }

DSPoint point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::InvalidSpec, "point must be [ax,bx,ay,by]");
  double v[4];
  for (int i = 0; i < 4; ++i) v[i] = json_to_double(j[static_cast<size_t>(i)]);
  try {
    return DSPoint(ProjectivePoint(v[0], v[1]), ProjectivePoint(v[2], v[3]));
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
}

bool same_point(const DSPoint& p, const DSPoint& q, double tol) {
  return chordal(p.x, q.x) <= tol && chordal(p.y, q.y) <= tol;
}

bool exactly_equal(const ProjectivePoint& p, const ProjectivePoint& q) {
  return p.a == q.a && p.b == q.b;
}

int edge_dir(const Edge& e) {
  if (e.kind == LeafKind::alpha) return e.orient > 0 ? 0 : 2;
  return e.orient > 0 ? 1 : 3;
}

size_t prev_index(size_t i, size_t n) { return (i + n - 1) % n; }

// map sending edge e onto its partner
MoebiusMap transfer(const Pairing& pr, size_t e) {
  return e == pr.bottom ? pr.map : inverse(pr.map);
}

struct PairIndex {
  std::vector<size_t> partner, pairing_of;
};

PairIndex index_pairings(const PolygonSpec& spec) {
  size_t n = spec.edges.size();
  const size_t none = static_cast<size_t>(-1);
  PairIndex ix{std::vector<size_t>(n, none), std::vector<size_t>(n, none)};
  for (size_t k = 0; k < spec.pairings.size(); ++k) {
    const Pairing& p = spec.pairings[k];
    if (p.top >= n || p.bottom >= n || p.top == p.bottom)
      throw Error(ErrorCode::InconsistentPairing, "pairing " + std::to_string(k) + " has bad edge indices");
    for (size_t e : {p.top, p.bottom}) {
      if (ix.partner[e] != none)
        throw Error(ErrorCode::InconsistentPairing, "edge " + std::to_string(e) + " paired twice");
      ix.pairing_of[e] = k;
    }
    ix.partner[p.top] = p.bottom;
    ix.partner[p.bottom] = p.top;
  }
  for (size_t e = 0; e < n; ++e)
    if (ix.partner[e] == none)
      throw Error(ErrorCode::InconsistentPairing, "edge " + std::to_string(e) + " is unpaired");
  return ix;
}

}  // namespace

Json PolygonSpec::to_json() const {
  Json j;
  j["model"] = model;
  j["edges"] = Json::array();
  for (const Edge& e : edges)
    j["edges"].push_back({{"kind", to_string(e.kind)},
                          {"start", point_json(e.start)},
                          {"end", point_json(e.end)},
                          {"orient", e.orient > 0 ? "+" : "-"}});
  j["pairings"] = Json::array();
  for (const Pairing& p : pairings)
    j["pairings"].push_back({{"top", p.top},
                             {"bottom", p.bottom},
                             {"matrix", {{p.map.m11, p.map.m12}, {p.map.m21, p.map.m22}}}});
  return j;
}

PolygonSpec PolygonSpec::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("edges") || !j.contains("pairings"))
    throw Error(ErrorCode::InvalidSpec, "spec needs edges and pairings");
  PolygonSpec s;
  try {
    if (j.contains("model")) s.model = j.at("model").get<std::string>();
    for (const Json& e : j.at("edges")) {
      Edge ed;
      ed.kind = leaf_kind_from_string(e.at("kind").get<std::string>());
      ed.start = point_from_json(e.at("start"));
      ed.end = point_from_json(e.at("end"));
      const Json& o = e.at("orient");
      if (o.is_string()) {
        auto t = o.get<std::string>();
        if (t != "+" && t != "-") throw Error(ErrorCode::InvalidSpec, "orient must be + or -");
        ed.orient = t == "+" ? 1 : -1;
      } else {
        int v = o.get<int>();
        if (v != 1 && v != -1) throw Error(ErrorCode::InvalidSpec, "orient must be +1 or -1");
        ed.orient = v;
      }
      s.edges.push_back(ed);
    }
    for (const Json& p : j.at("pairings")) {
      Pairing pr;
      pr.top = p.at("top").get<size_t>();
      pr.bottom = p.at("bottom").get<size_t>();
      const Json& m = p.at("matrix");
      try {
        pr.map = MoebiusMap(json_to_double(m.at(0).at(0)), json_to_double(m.at(0).at(1)),
                            json_to_double(m.at(1).at(0)), json_to_double(m.at(1).at(1)));
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidSpec, e.what());
      }
      s.pairings.push_back(pr);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
  return s;
}

PolygonSpec canonicalize(const PolygonSpec& spec, double tol) {
  size_t n = spec.edges.size();
  std::vector<bool> zero(n);
  for (size_t i = 0; i < n; ++i) zero[i] = same_point(spec.edges[i].start, spec.edges[i].end, tol);
  std::vector<size_t> new_index(n, static_cast<size_t>(-1));
  PolygonSpec out;
  out.model = spec.model;
  for (size_t i = 0; i < n; ++i) {
    if (zero[i]) continue;
    new_index[i] = out.edges.size();
    out.edges.push_back(spec.edges[i]);
  }
  for (const Pairing& p : spec.pairings) {
    if (zero[p.top] && zero[p.bottom]) continue;
    if (zero[p.top] != zero[p.bottom])
      throw Error(ErrorCode::InconsistentPairing, "zero-length edge paired with a nondegenerate one");
    out.pairings.push_back({new_index[p.top], new_index[p.bottom], p.map});
  }
  // re-link across dropped edges: each coordinate comes from the edge that fixes it
  size_t m = out.edges.size();
  for (size_t i = 0; i < n; ++i) {
    if (zero[i] || !zero[(i + 1) % n]) continue;
    Edge& prev = out.edges[new_index[i]];
    Edge& next = out.edges[(new_index[i] + 1) % m];
    ProjectivePoint x = prev.kind == LeafKind::beta ? prev.start.x : next.start.x;
    ProjectivePoint y = prev.kind == LeafKind::alpha ? prev.start.y : next.start.y;
    if (next.kind == LeafKind::alpha) y = next.start.y;
    if (next.kind == LeafKind::beta && prev.kind != LeafKind::beta) x = next.start.x;
    DSPoint c(x, y);
    prev.end = c;
    next.start = c;
  }
  return out;
}

bool specs_equivalent(const PolygonSpec& a, const PolygonSpec& b, double tol) {
  size_t n = a.edges.size();
  if (n != b.edges.size() || a.pairings.size() != b.pairings.size()) return false;
  for (size_t shift = 0; shift < n; ++shift) {
    bool ok = true;
    for (size_t i = 0; i < n && ok; ++i) {
      const Edge& ea = a.edges[i];
      const Edge& eb = b.edges[(i + shift) % n];
      ok = ea.kind == eb.kind && ea.orient == eb.orient && same_point(ea.start, eb.start, tol) &&
           same_point(ea.end, eb.end, tol);
    }
    if (!ok) continue;
    for (const Pairing& pa : a.pairings) {
      bool found = false;
      for (const Pairing& pb : b.pairings)
        if (pb.top == (pa.top + shift) % n && pb.bottom == (pa.bottom + shift) % n &&
            max_entry_diff(pa.map, pb.map) <= tol)
          found = true;
      if (!found) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

std::vector<VertexOrbit> vertex_orbits(const PolygonSpec& spec) {
  size_t n = spec.edges.size();
  if (n == 0) throw Error(ErrorCode::InvalidSpec, "no edges");
  PairIndex ix = index_pairings(spec);
  std::vector<bool> seen(n, false);
  std::vector<VertexOrbit> out;
  for (size_t c = 0; c < n; ++c) {
    if (seen[c]) continue;
    VertexOrbit o;
    size_t k = c;
    while (!seen[k]) {
      seen[k] = true;
      o.corners.push_back(k);
      k = ix.partner[prev_index(k, n)];  // start of the partner of the incoming edge
    }
    if (k != c) throw Error(ErrorCode::InconsistentPairing, "corner correspondence is not a bijection");
    out.push_back(o);
  }
  return out;
}

Json QuadrantReport::to_json() const {
  return Json{{"standard", standard}, {"quadrants", per_corner}, {"issues", issues}};
}

QuadrantReport quadrant_check(const PolygonSpec& spec, const VertexOrbit& orbit) {
  size_t n = spec.edges.size();
  QuadrantReport r;
  PairIndex ix = index_pairings(spec);
  std::vector<int> seq;
  size_t d = orbit.corners.size();
  for (size_t k = 0; k < d; ++k) {
    size_t c = orbit.corners[k];
    const Edge& ein = spec.edges[prev_index(c, n)];
    const Edge& eout = spec.edges[c];
    int count = ((edge_dir(ein) + 2 - edge_dir(eout)) % 4 + 4) % 4;
    std::vector<int> qs;
    for (int i = 0; i < count; ++i) qs.push_back((edge_dir(eout) + i) % 4);
    if (count == 0) r.issues.push_back("corner " + std::to_string(c) + " is a cusp");
    r.per_corner.push_back(qs);
    seq.insert(seq.end(), qs.begin(), qs.end());

    size_t in_idx = prev_index(c, n);
    size_t p_idx = ix.partner[in_idx];
    const Pairing& pr = spec.pairings[ix.pairing_of[in_idx]];
    if (spec.edges[in_idx].orient == spec.edges[p_idx].orient)
      r.issues.push_back("edges " + std::to_string(in_idx) + "," + std::to_string(p_idx) +
                         " are paired with equal orientations");
    DSPoint img = apply(transfer(pr, in_idx), spec.edges[c].start);
    size_t next = orbit.corners[(k + 1) % d];
    if (!same_point(img, spec.edges[next].start, kMapTol))
      r.issues.push_back("pairing " + std::to_string(ix.pairing_of[in_idx]) + " sends corner " +
                         std::to_string(c) + " off corner " + std::to_string(next));
  }
  if (seq.size() != 4)
    r.issues.push_back("orbit carries " + std::to_string(seq.size()) + " quadrants, expected 4");
  else
    for (size_t i = 0; i < 4; ++i)
      if (seq[(i + 1) % 4] != (seq[i] + 1) % 4) {
        r.issues.push_back("quadrants out of cyclic order");
        break;
      }
  r.standard = r.issues.empty();
  return r;
}

MoebiusMap vertex_holonomy(const PolygonSpec& spec, const VertexOrbit& orbit) {
  QuadrantReport r = quadrant_check(spec, orbit);
  if (!r.standard) throw Error(ErrorCode::NonStandardQuadrants, "orbit is not standard", r.to_json());
  PairIndex ix = index_pairings(spec);
  auto f = [&](size_t corner) {
    return transfer(spec.pairings[ix.pairing_of[corner]], corner);  // out edge of the corner
  };
  MoebiusMap m = MoebiusMap::identity();
  for (size_t k = 1; k < orbit.corners.size(); ++k) m = compose(m, f(orbit.corners[k]));
  return compose(m, f(orbit.corners[0]));
}

double angle_of_holonomy(const MoebiusMap& m, const DSPoint& base) {
  if (chordal(apply(m, base.x), base.x) > 1e-8 || chordal(apply(m, base.y), base.y) > 1e-8)
    throw Error(ErrorCode::NotFixingBase, "holonomy does not fix the base corner");
  MapClass c = classify(m);
  switch (c.tag) {
    case MapTag::identity:
    case MapTag::parabolic:
      return 0;
    case MapTag::elliptic:
      throw Error(ErrorCode::EllipticHolonomy, "elliptic vertex holonomy",
                  Json{{"trace", m.trace()}});
    case MapTag::hyperbolic:
      break;
  }
  double t = std::acosh(trace_abs(m) / 2);
  int sign = multiplier_at(m, base.x) < 1 ? 1 : -1;
  return kAngleSign * sign * t;
}

namespace {

// arcs covered by the edges' moving coordinates, as (start param, length)
MoebiusMap polygon_chart(const PolygonSpec& spec) {
  auto wrap = [](double s) { return s - std::floor(s); };
  struct Arc {
    double s0, len;
  };
  std::vector<Arc> arcs;
  std::vector<double> ends;
  for (const Edge& e : spec.edges) {
    const ProjectivePoint& a = e.kind == LeafKind::alpha ? e.start.x : e.start.y;
    const ProjectivePoint& b = e.kind == LeafKind::alpha ? e.end.x : e.end.y;
    const ProjectivePoint& from = e.orient > 0 ? a : b;
    const ProjectivePoint& to = e.orient > 0 ? b : a;
    Arc arc{from.circle_param(), wrap(to.circle_param() - from.circle_param())};
    arcs.push_back(arc);
    ends.push_back(arc.s0);
    ends.push_back(wrap(arc.s0 + arc.len));
    // the fixed coordinate must also avoid infinity
    const ProjectivePoint& fixed = e.kind == LeafKind::alpha ? e.start.y : e.start.x;
    arcs.push_back({fixed.circle_param(), 0});
    ends.push_back(fixed.circle_param());
  }
  std::sort(ends.begin(), ends.end());
  double best_len = 0, best_mid = 0;
  for (size_t i = 0; i < ends.size(); ++i) {
    double lo = ends[i];
    double len = i + 1 < ends.size() ? ends[i + 1] - lo : ends[0] + 1 - lo;
    if (len <= 0) continue;
    double mid = wrap(lo + len / 2);
    bool covered = false;
    for (const Arc& a : arcs)
      if (wrap(mid - a.s0) <= a.len) covered = true;
    if (!covered && len > best_len) {
      best_len = len;
      best_mid = mid;
    }
  }
  if (best_len <= 1e-9) throw Error(ErrorCode::ChartFailure, "polygon projections cover RP^1");
  return rotation_to_infinity(ProjectivePoint::from_circle_param(best_mid));
}

double chart_coord(const MoebiusMap& c, const ProjectivePoint& p) {
  ProjectivePoint q = apply(c, p);
  return q.a / q.b;
}

bool segments_cross(const std::array<double, 2>& a0, const std::array<double, 2>& a1,
                    const std::array<double, 2>& b0, const std::array<double, 2>& b1) {
  // axis-parallel segments only
  auto lo = [](double u, double v) { return std::min(u, v); };
  auto hi = [](double u, double v) { return std::max(u, v); };
  return lo(a0[0], a1[0]) <= hi(b0[0], b1[0]) && lo(b0[0], b1[0]) <= hi(a0[0], a1[0]) &&
         lo(a0[1], a1[1]) <= hi(b0[1], b1[1]) && lo(b0[1], b1[1]) <= hi(a0[1], a1[1]);
}

ChartGeometry make_geometry(const PolygonSpec& spec) {
  ChartGeometry g;
  g.chart = polygon_chart(spec);
  size_t n = spec.edges.size();
  for (const Edge& e : spec.edges) {
    g.corners.push_back({chart_coord(g.chart, e.start.x), chart_coord(g.chart, e.start.y)});
    g.dir.push_back(edge_dir(e));
  }
  double shoelace = 0;
  for (size_t i = 0; i < n; ++i) {
    const auto& p = g.corners[i];
    const auto& q = g.corners[(i + 1) % n];
    int axis = g.dir[i] % 2 == 0 ? 0 : 1;
    double delta = q[axis] - p[axis];
    if ((g.dir[i] < 2 && !(delta > 0)) || (g.dir[i] >= 2 && !(delta < 0)))
      throw Error(ErrorCode::InvalidSpec,
                  "edge " + std::to_string(i) + " runs against its orientation in the chart");
    shoelace += p[0] * q[1] - q[0] * p[1];
  }
  if (!(shoelace > 0)) throw Error(ErrorCode::InvalidSpec, "boundary is not positively oriented");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(g.corners[i], g.corners[(i + 1) % n], g.corners[j], g.corners[(j + 1) % n]))
        throw Error(ErrorCode::InvalidSpec, "boundary is not simple: edges " + std::to_string(i) +
                                                " and " + std::to_string(j) + " meet");
    }
  return g;
}

void validate_edges(const PolygonSpec& spec) {
  if (spec.model == "flat")
    throw Error(ErrorCode::InvalidSpec, "flat model is not supported; dS only");
  if (spec.model != "dS") throw Error(ErrorCode::InvalidSpec, "unknown model " + spec.model);
  size_t n = spec.edges.size();
  if (n < 4 || n % 2 != 0) throw Error(ErrorCode::InvalidSpec, "need an even number (>= 4) of edges");
  for (size_t i = 0; i < n; ++i) {
    const Edge& e = spec.edges[i];
    if (e.orient != 1 && e.orient != -1) throw Error(ErrorCode::InvalidSpec, "orient must be +-1");
    bool leaf = e.kind == LeafKind::alpha ? exactly_equal(e.start.y, e.end.y)
                                          : exactly_equal(e.start.x, e.end.x);
    if (!leaf)
      throw Error(ErrorCode::InvalidSpec, "edge " + std::to_string(i) + " is not a lightlike segment");
    if (!same_point(e.end, spec.edges[(i + 1) % n].start, 1e-12))
      throw Error(ErrorCode::InvalidSpec, "edge " + std::to_string(i) + " does not end where the next starts");
  }
  PairIndex ix = index_pairings(spec);
  (void)ix;
  for (size_t k = 0; k < spec.pairings.size(); ++k) {
    const Pairing& p = spec.pairings[k];
    const Edge& top = spec.edges[p.top];
    const Edge& bot = spec.edges[p.bottom];
    if (top.kind != bot.kind)
      throw Error(ErrorCode::InconsistentPairing, "pairing " + std::to_string(k) + " mixes alpha and beta");
    if (top.orient == bot.orient)
      throw Error(ErrorCode::InconsistentPairing,
                  "pairing " + std::to_string(k) + " joins edges of equal orientation");
    double err = std::max({chordal(apply(p.map, bot.start.x), top.end.x),
                           chordal(apply(p.map, bot.start.y), top.end.y),
                           chordal(apply(p.map, bot.end.x), top.start.x),
                           chordal(apply(p.map, bot.end.y), top.start.y)});
    if (err > kMapTol)
      throw Error(ErrorCode::InconsistentPairing,
                  "pairing " + std::to_string(k) + " misses the top edge endpoints",
                  Json{{"pairing", k}, {"endpoint_error", err}});
  }
}

}  // namespace

double polygon_area(const PolygonSpec& spec) {
  MoebiusMap c = polygon_chart(spec);
  double area = 0;
  for (const Edge& e : spec.edges) {
    if (e.kind != LeafKind::alpha) continue;
    double y0 = chart_coord(c, e.start.y);
    double xs = chart_coord(c, e.start.x), xe = chart_coord(c, e.end.x);
    area += std::log(std::abs((xs - y0) / (xe - y0)));
  }
  return area;
}

GluedSurface build_surface(const PolygonSpec& spec) {
  validate_edges(spec);
  GluedSurface s;
  s.spec = spec;
  PairIndex ix = index_pairings(spec);
  s.partner = ix.partner;
  s.pairing_of = ix.pairing_of;
  s.geometry = make_geometry(spec);
  s.vertex_orbits = vertex_orbits(spec);
  Json bad = Json::array();
  for (const VertexOrbit& o : s.vertex_orbits) {
    s.quadrant_reports.push_back(quadrant_check(spec, o));
    if (!s.quadrant_reports.back().standard) bad.push_back(s.quadrant_reports.back().to_json());
  }
  if (!bad.empty())
    throw Error(ErrorCode::NonStandardQuadrants, "some vertex orbits are not standard", bad);
  for (const VertexOrbit& o : s.vertex_orbits) {
    s.holonomies.push_back(vertex_holonomy(spec, o));
    s.angles.push_back(angle_of_holonomy(s.holonomies.back(), spec.edges[o.corners[0]].start));
  }
  s.area = polygon_area(spec);
  if (!(s.area > 0)) throw Error(ErrorCode::InvalidSpec, "dS polygon area must be positive");
  s.euler_characteristic = static_cast<int>(s.vertex_orbits.size()) -
                           static_cast<int>(spec.pairings.size()) + 1;
  if (s.euler_characteristic != 0)
    throw Error(ErrorCode::InvalidSpec, "gluing is not a torus",
                Json{{"euler_characteristic", s.euler_characteristic}});
  return s;
}

double gauss_bonnet_check(const GluedSurface& s) {
  double sum = 0;
  for (double a : s.angles) sum += a;
  return std::abs(s.area - sum);
}

Json GluedSurface::report() const {
  Json j;
  j["area"] = area;
  j["euler_characteristic"] = euler_characteristic;
  j["gauss_bonnet_residual"] = gauss_bonnet_check(*this);
  j["orbits"] = Json::array();
  for (size_t k = 0; k < vertex_orbits.size(); ++k) {
    const auto& o = vertex_orbits[k];
    Json pts = Json::array();
    for (size_t c : o.corners) pts.push_back(point_json(spec.edges[c].start));
    const MoebiusMap& h = holonomies[k];
    j["orbits"].push_back({{"corners", o.corners},
                           {"points", pts},
                           {"quadrants", quadrant_reports[k].to_json()},
                           {"holonomy", {{h.m11, h.m12}, {h.m21, h.m22}}},
                           {"angle", angles[k]}});
  }
  j["spec"] = spec.to_json();
  return j;
}

PolygonSpec spec_T_theta_x(double theta, const ProjectivePoint& x) {
  OneSingFamilyX f = build_one_sing(theta, x);
  auto one = ProjectivePoint::finite(1), zero = ProjectivePoint::finite(0);
  auto inf = ProjectivePoint::infinity(), yt = ProjectivePoint::finite(f.y_theta);
  DSPoint c[6] = {DSPoint(one, zero), DSPoint(f.x_prime, zero), DSPoint(inf, zero),
                  DSPoint(inf, yt),   DSPoint(x, yt),           DSPoint(one, yt)};
  PolygonSpec s;
  LeafKind A = LeafKind::alpha, B = LeafKind::beta;
  LeafKind kinds[6] = {A, A, B, A, A, B};
  int orient[6] = {1, 1, 1, -1, -1, -1};
  for (int i = 0; i < 6; ++i) s.edges.push_back({kinds[i], c[i], c[(i + 1) % 6], orient[i]});
  s.pairings = {{3, 0, f.gh}, {4, 1, f.h}, {2, 5, f.g}};
  return canonicalize(s);
}

PolygonSpec spec_T_theta_xy(double theta, const ProjectivePoint& x, double y) {
  TwoSingFamilyXY f = build_two_sing(theta, x, y);
  auto one = ProjectivePoint::finite(1), zero = ProjectivePoint::finite(0);
  auto inf = ProjectivePoint::infinity();
  auto py = ProjectivePoint::finite(f.y), pyp = ProjectivePoint::finite(f.y_plus);
  DSPoint c[8] = {DSPoint(one, zero), DSPoint(f.x_prime, zero), DSPoint(inf, zero),
                  DSPoint(inf, py),   DSPoint(f.x, py),         DSPoint(f.x, pyp),
                  DSPoint(one, pyp),  DSPoint(one, f.y_prime)};
  PolygonSpec s;
  LeafKind A = LeafKind::alpha, B = LeafKind::beta;
  LeafKind kinds[8] = {A, A, B, A, B, A, B, B};
  int orient[8] = {1, 1, 1, -1, 1, -1, -1, -1};
  for (int i = 0; i < 8; ++i) s.edges.push_back({kinds[i], c[i], c[(i + 1) % 8], orient[i]});
  s.pairings = {{3, 0, f.h1}, {5, 1, f.h2}, {4, 7, f.g1}, {2, 6, f.g2}};
  return canonicalize(s);
}

namespace {

// bottom: +x alpha edges at the lowest y through (1,0); left: -y beta edges at x = 1
void register_sections(GluedSurface& s) {
  const auto& E = s.spec.edges;
  auto one = ProjectivePoint::finite(1), zero = ProjectivePoint::finite(0);
  Section bottom{LeafKind::beta, {}}, left{LeafKind::alpha, {}};
  for (size_t i = 0; i < E.size(); ++i) {
    if (E[i].kind == LeafKind::alpha && E[i].orient > 0 && exactly_equal(E[i].start.y, zero))
      bottom.edges.push_back(i);
    if (E[i].kind == LeafKind::beta && E[i].orient < 0 && exactly_equal(E[i].start.x, one))
      left.edges.push_back(i);
  }
  if (!bottom.edges.empty()) s.sections["bottom"] = bottom;
  if (!left.edges.empty()) s.sections["left"] = left;
}

}  // namespace

GluedSurface build_T_theta_x(double theta, const ProjectivePoint& x) {
  GluedSurface s = build_surface(spec_T_theta_x(theta, x));
  register_sections(s);
  return s;
}

GluedSurface build_T_theta_xy(double theta, const ProjectivePoint& x, double y) {
  GluedSurface s = build_surface(spec_T_theta_xy(theta, x, y));
  register_sections(s);
  return s;
}

// ---------------------------------------------------------------------------
// leaves

namespace {

struct FlowFrame {
  int along, trans;  // coordinate indices
  int flow_dir, exit_dir;
  LeafKind wall_kind;
};

FlowFrame frame(LeafKind k) {
  // beta leaves move in y and hit alpha edges; alpha leaves move in x and hit beta edges
  if (k == LeafKind::beta) return {1, 0, 1, 2, LeafKind::alpha};
  return {0, 1, 0, 1, LeafKind::beta};
}

struct Wall {
  size_t edge;
  double along, lo, hi;
  bool exit;
};

std::vector<Wall> walls(const GluedSurface& s, const FlowFrame& f) {
  std::vector<Wall> out;
  size_t n = s.spec.edges.size();
  for (size_t i = 0; i < n; ++i) {
    if (s.spec.edges[i].kind != f.wall_kind) continue;
    const auto& p = s.geometry.corners[i];
    const auto& q = s.geometry.corners[(i + 1) % n];
    out.push_back({i, p[f.along], std::min(p[f.trans], q[f.trans]), std::max(p[f.trans], q[f.trans]),
                   s.geometry.dir[i] == f.exit_dir});
  }
  return out;
}

const Wall* first_hit(const std::vector<Wall>& ws, double t, double a) {
  const Wall* best = nullptr;
  for (const Wall& w : ws) {
    if (t < w.lo - 1e-12 || t > w.hi + 1e-12) continue;
    if (!(w.along > a + 1e-12)) continue;
    if (!best || w.along < best->along) best = &w;
  }
  return best;
}

MoebiusMap chart_map(const GluedSurface& s, const MoebiusMap& m) {
  return conjugate(s.geometry.chart, m);
}

std::array<double, 2> apply2(const MoebiusMap& m, const std::array<double, 2>& p) {
  return {m(p[0]), m(p[1])};
}

DSPoint from_chart(const GluedSurface& s, const std::array<double, 2>& p) {
  MoebiusMap ci = inverse(s.geometry.chart);
  return DSPoint(apply(ci, ProjectivePoint::finite(p[0])), apply(ci, ProjectivePoint::finite(p[1])));
}

std::optional<size_t> corner_at(const GluedSurface& s, const std::array<double, 2>& p) {
  for (size_t i = 0; i < s.geometry.corners.size(); ++i) {
    const auto& c = s.geometry.corners[i];
    if (std::abs(c[0] - p[0]) <= kCornerTol && std::abs(c[1] - p[1]) <= kCornerTol) return i;
  }
  return std::nullopt;
}

int corner_count(const GluedSurface& s, size_t c) {
  size_t n = s.geometry.dir.size();
  return ((s.geometry.dir[prev_index(c, n)] + 2 - s.geometry.dir[c]) % 4 + 4) % 4;
}

}  // namespace

LeafTrace trace_leaf(const GluedSurface& s, const DSPoint& start, LeafKind kind,
                     const TraceOptions& opt) {
  FlowFrame f = frame(kind);
  std::vector<Wall> ws = walls(s, f);
  size_t n = s.spec.edges.size();
  LeafTrace tr;
  tr.kind = kind;
  tr.crossing_counts.assign(s.spec.pairings.size(), 0);
  std::array<double, 2> S = {chart_coord(s.geometry.chart, start.x),
                             chart_coord(s.geometry.chart, start.y)};
  std::array<double, 2> P = S;

  auto jump_through = [&](size_t e, std::array<double, 2> H, bool corner) {
    size_t k = s.pairing_of[e];
    const Pairing& pr = s.spec.pairings[k];
    MoebiusMap m = transfer(pr, e);
    tr.crossing_counts[k] += e == pr.top ? 1 : -1;
    tr.jumps.push_back({tr.segments.empty() ? 0 : tr.segments.size() - 1, e, k, m, corner});
    return apply2(chart_map(s, m), H);
  };
  auto stop_landing = [&](size_t e) {
    return std::find(opt.stop_edges.begin(), opt.stop_edges.end(), s.partner[e]) !=
           opt.stop_edges.end();
  };

  // a start on an exit edge leaves at once
  for (const Wall& w : ws)
    if (w.exit && std::abs(P[f.along] - w.along) <= 1e-12 && P[f.trans] >= w.lo && P[f.trans] <= w.hi &&
        !corner_at(s, P)) {
      P = jump_through(w.edge, P, false);
      P[f.along] = s.geometry.corners[s.partner[w.edge]][f.along];
      break;
    }

  while (true) {
    const Wall* w = first_hit(ws, P[f.trans], P[f.along]);
    if (!w) throw Error(ErrorCode::InvalidSpec, "leaf leaves the polygon");
    std::array<double, 2> H = P;
    H[f.along] = w->along;
    LeafSegment seg{from_chart(s, P), from_chart(s, H), P, H};
    // closing up on the start point
    if (!tr.jumps.empty() && std::abs(P[f.trans] - S[f.trans]) <= 1e-9 &&
        S[f.along] >= P[f.along] - 1e-9 && S[f.along] <= H[f.along] + 1e-9) {
      seg.ce = S;
      seg.end = start;
      tr.segments.push_back(seg);
      tr.closed = true;
      break;
    }
    tr.segments.push_back(seg);
    if (auto c = corner_at(s, H)) {
      if (opt.corner_policy == CornerPolicy::stop) {
        tr.corner_hit = true;
        tr.corner = *c;
        break;
      }
      // sweep clockwise from the arrival direction through two quadrants
      size_t k = *c;
      int d = (f.flow_dir + 2) % 4;
      int need = 2;
      std::array<double, 2> Q = s.geometry.corners[k];
      int guard = 0;
      while (true) {
        int avail = ((d - s.geometry.dir[k]) % 4 + 4) % 4;
        if (avail > corner_count(s, k))
          throw Error(ErrorCode::InvalidSpec, "leaf meets corner " + std::to_string(k) + " from outside");
        if (need <= avail) break;
        need -= avail;
        d = s.geometry.dir[k];
        size_t e = k;  // outgoing edge of corner k
        Q = jump_through(e, Q, true);
        k = (s.partner[e] + 1) % n;
        Q = s.geometry.corners[k];
        if (++guard > 4 * static_cast<int>(n)) throw Error(ErrorCode::InvalidSpec, "corner sweep does not end");
      }
      P = Q;
      if (static_cast<int>(tr.jumps.size()) >= opt.max_jumps) break;
      continue;
    }
    if (!w->exit) throw Error(ErrorCode::InvalidSpec, "leaf reaches an entry edge from inside");
    P = jump_through(w->edge, H, false);
    size_t pe = s.partner[w->edge];
    P[f.along] = s.geometry.corners[pe][f.along];  // snap onto the partner edge
    tr.landing = from_chart(s, P);
    if (stop_landing(w->edge)) {
      tr.returned = true;
      break;
    }
    if (static_cast<int>(tr.jumps.size()) >= opt.max_jumps) break;
  }
  return tr;
}

std::string LeafTrace::csv() const {
  std::ostringstream os;
  os << "segment,x0,y0,x1,y1,jump_edge,jump_pairing,event\n";
  for (size_t i = 0; i < segments.size(); ++i) {
    const auto& g = segments[i];
    os << i << ',' << fmt_double(g.cs[0]) << ',' << fmt_double(g.cs[1]) << ','
       << fmt_double(g.ce[0]) << ',' << fmt_double(g.ce[1]) << ',';
    std::string je, jp;
    for (const auto& j : jumps)
      if (j.after_segment == i) {
        if (!je.empty()) {
          je += ';';
          jp += ';';
        }
        je += std::to_string(j.edge);
        jp += std::to_string(j.pairing);
      }
    os << je << ',' << jp << ',';
    if (i + 1 == segments.size()) {
      if (closed) os << "closed";
      else if (corner_hit) os << "corner_hit:" << *corner;
      else if (returned) os << "returned";
    }
    os << '\n';
  }
  return os.str();
}

Json LeafTrace::to_json() const {
  Json j;
  j["kind"] = to_string(kind);
  j["segments"] = segments.size();
  j["jumps"] = Json::array();
  for (const auto& jp : jumps) j["jumps"].push_back({{"edge", jp.edge}, {"pairing", jp.pairing}});
  j["crossing_counts"] = crossing_counts;
  j["closed"] = closed;
  j["corner_hit"] = corner_hit;
  if (corner) j["corner"] = *corner;
  return j;
}

std::string svg(const GluedSurface& s, const std::vector<LeafTrace>& traces) {
  const auto& cs = s.geometry.corners;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& c : cs) {
    x0 = std::min(x0, c[0]);
    x1 = std::max(x1, c[0]);
    y0 = std::min(y0, c[1]);
    y1 = std::max(y1, c[1]);
  }
  auto X = [&](double v) { return 50 + 900 * (v - x0) / (x1 - x0); };
  auto Y = [&](double v) { return 950 - 900 * (v - y0) / (y1 - y0); };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", v);
    return std::string(b);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n";
  os << "<polygon fill=\"#f4f4f4\" stroke=\"black\" stroke-width=\"2\" points=\"";
  for (size_t i = 0; i < cs.size(); ++i) os << (i ? " " : "") << num(X(cs[i][0])) << ',' << num(Y(cs[i][1]));
  os << "\"/>\n";
  for (const auto& t : traces) {
    os << "<path fill=\"none\" stroke=\"" << (t.kind == LeafKind::alpha ? "#c0392b" : "#2e64b0")
       << "\" stroke-width=\"1\" d=\"";
    for (const auto& g : t.segments)
      os << 'M' << num(X(g.cs[0])) << ',' << num(Y(g.cs[1])) << 'L' << num(X(g.ce[0])) << ','
         << num(Y(g.ce[1]));
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// first return

namespace {

struct SectionGeom {
  FlowFrame f;
  double along = 0;
  double lo = 0, hi = 0;  // chart transverse range
  ProjectivePoint left, right;
};

SectionGeom section_geom(const GluedSurface& s, const Section& sec) {
  if (sec.edges.empty()) throw Error(ErrorCode::InvalidSpec, "empty section");
  SectionGeom g{frame(sec.flow), 0, 0, 0, {}, {}};
  size_t n = s.spec.edges.size();
  int entry_dir = (g.f.exit_dir + 2) % 4;
  struct Piece {
    double lo, hi;
    ProjectivePoint plo, phi;
  };
  std::vector<Piece> ps;
  for (size_t e : sec.edges) {
    if (e >= n || s.spec.edges[e].kind != g.f.wall_kind || s.geometry.dir[e] != entry_dir)
      throw Error(ErrorCode::InvalidSpec, "section edge " + std::to_string(e) + " is not an entry edge");
    const Edge& ed = s.spec.edges[e];
    const auto& p = s.geometry.corners[e];
    const auto& q = s.geometry.corners[(e + 1) % n];
    const ProjectivePoint& ps0 = g.f.trans == 0 ? ed.start.x : ed.start.y;
    const ProjectivePoint& pe0 = g.f.trans == 0 ? ed.end.x : ed.end.y;
    if (p[g.f.trans] < q[g.f.trans]) ps.push_back({p[g.f.trans], q[g.f.trans], ps0, pe0});
    else ps.push_back({q[g.f.trans], p[g.f.trans], pe0, ps0});
    g.along = p[g.f.along];
  }
  std::sort(ps.begin(), ps.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  for (size_t i = 0; i + 1 < ps.size(); ++i)
    if (std::abs(ps[i].hi - ps[i + 1].lo) > 1e-12)
      throw Error(ErrorCode::InvalidSpec, "section edges are not contiguous");
  for (size_t e : sec.edges)
    if (std::abs(s.geometry.corners[e][g.f.along] - g.along) > 1e-12)
      throw Error(ErrorCode::InvalidSpec, "section edges lie on different leaves");
  g.lo = ps.front().lo;
  g.hi = ps.back().hi;
  g.left = ps.front().plo;
  g.right = ps.back().phi;
  return g;
}

}  // namespace

std::pair<ProjectivePoint, ProjectivePoint> section_interval(const GluedSurface& s,
                                                             const Section& sec) {
  SectionGeom g = section_geom(s, sec);
  return {g.left, g.right};
}

DSPoint section_point(const GluedSurface& s, const Section& sec, const ProjectivePoint& t) {
  SectionGeom g = section_geom(s, sec);
  const Edge& e = s.spec.edges[sec.edges.front()];
  if (g.f.trans == 0) return DSPoint(t, e.start.y);
  return DSPoint(e.start.x, t);
}

Hiet first_return_hiet(const GluedSurface& s, const Section& sec, int max_jumps) {
  SectionGeom g = section_geom(s, sec);
  const FlowFrame& f = g.f;
  std::vector<Wall> ws = walls(s, f);
  std::set<size_t> in_section(sec.edges.begin(), sec.edges.end());
  struct State {
    double lo, hi, along;
    MoebiusMap m;  // chart map, section -> current
    int depth;
  };
  struct Piece {
    double lo;
    MoebiusMap m;
  };
  std::vector<Piece> pieces;
  std::vector<State> stack = {{g.lo, g.hi, g.along, MoebiusMap::identity(), 0}};
  while (!stack.empty()) {
    State st = stack.back();
    stack.pop_back();
    std::vector<double> cuts = {st.lo, st.hi};
    for (const Wall& w : ws)
      for (double v : {w.lo, w.hi})
        if (v > st.lo && v < st.hi) cuts.push_back(v);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
      double c = cuts[i], d = cuts[i + 1];
      if (d - c <= 1e-14) continue;
      const Wall* w = first_hit(ws, 0.5 * (c + d), st.along);
      if (!w || !w->exit) throw Error(ErrorCode::NoReturn, "flow leaves the polygon");
      MoebiusMap fm = chart_map(s, transfer(s.spec.pairings[s.pairing_of[w->edge]], w->edge));
      MoebiusMap m = compose(fm, st.m);
      size_t pe = s.partner[w->edge];
      if (in_section.count(pe)) {
        pieces.push_back({inverse(st.m)(c), m});
        continue;
      }
      if (st.depth + 1 >= max_jumps)
        throw Error(ErrorCode::NoReturn, "no return to the section within the jump budget",
                    Json{{"max_jumps", max_jumps}});
      double a = fm(c), b = fm(d);
      stack.push_back({std::min(a, b), std::max(a, b), s.geometry.corners[pe][f.along], m, st.depth + 1});
    }
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  MoebiusMap ci = inverse(s.geometry.chart);
  std::vector<ProjectivePoint> breaks;
  std::vector<MoebiusMap> maps;
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (i > 0) breaks.push_back(apply(ci, ProjectivePoint::finite(pieces[i].lo)));
    maps.push_back(conjugate(ci, pieces[i].m));
  }
  return Hiet::from_branches(g.left, g.right, breaks, maps);
}

CircleMap first_return(const GluedSurface& s, const Section& sec, int max_jumps) {
  return to_circle_map(first_return_hiet(s, sec, max_jumps));
}

}  // namespace dstori
