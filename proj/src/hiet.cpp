#include "dstori/hiet.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dstori/desitter.h"
#include "dstori/errors.h"

namespace dstori {

namespace {

constexpr double kEndpointTol = 1e-9;
constexpr double kParamTol = 1e-9;

double wrap01(double v) { return v - std::floor(v); }

// Chart value of p as a real, or NaN when p goes to infinity.
double chart_value(const MoebiusMap& chart, const ProjectivePoint& p) {
  ProjectivePoint q = apply(chart, p);
  if (q.b == 0) return NAN;
  return q.a / q.b;
}

Json point_json(const ProjectivePoint& p) { return Json::array({p.a, p.b}); }

ProjectivePoint point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidSpec, "point needs [a,b]");
  return ProjectivePoint(json_to_double(j[0]), json_to_double(j[1]));
}

}  // namespace

MoebiusMap interval_chart(const ProjectivePoint& left, const ProjectivePoint& right) {
  double s0 = left.circle_param();
  double len = wrap01(right.circle_param() - s0);
  if (len <= kPointTol) throw Error(ErrorCode::InvalidHiet, "empty interval");
  ProjectivePoint mid = ProjectivePoint::from_circle_param(s0 + len / 2);
  return from_triples(left, mid, right, ProjectivePoint::finite(0), ProjectivePoint::finite(0.5),
                      ProjectivePoint::finite(1));
}

Hiet::Hiet(const ProjectivePoint& left, const ProjectivePoint& right,
           std::vector<ProjectivePoint> top_breaks, std::vector<ProjectivePoint> bottom_breaks,
           std::vector<MoebiusMap> branches, std::vector<int> perm)
    : left_(left),
      right_(right),
      top_breaks_(std::move(top_breaks)),
      bottom_breaks_(std::move(bottom_breaks)),
      branches_(std::move(branches)),
      perm_(std::move(perm)),
      chart_(interval_chart(left, right)) {
  size_t n = branches_.size();
  if (n == 0) throw Error(ErrorCode::InvalidHiet, "no branches");
  if (top_breaks_.size() != n - 1 || bottom_breaks_.size() != n - 1 || perm_.size() != n)
    throw Error(ErrorCode::InvalidHiet, "break/branch/permutation counts disagree");
  std::vector<int> sorted = perm_;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < n; ++i)
    if (sorted[i] != static_cast<int>(i)) throw Error(ErrorCode::InvalidHiet, "perm is not a bijection");

  auto params = [&](const std::vector<ProjectivePoint>& breaks) {
    std::vector<double> s = {0.0};
    for (const auto& p : breaks) {
      double v = chart_value(chart_, p);
      if (!(v > s.back() && v < 1.0))
        throw Error(ErrorCode::InvalidHiet, "breaks must be increasing and interior");
      s.push_back(v);
    }
    s.push_back(1.0);
    return s;
  };
  top_s_ = params(top_breaks_);
  bottom_s_ = params(bottom_breaks_);

  auto top_pt = [&](size_t k) { return k == 0 ? left_ : (k == n ? right_ : top_breaks_[k - 1]); };
  auto bot_pt = [&](size_t k) {
    return k == 0 ? left_ : (k == n ? right_ : bottom_breaks_[k - 1]);
  };
  for (size_t i = 0; i < n; ++i) {
    size_t j = static_cast<size_t>(perm_[i]);
    double e0 = chordal(apply(branches_[i], top_pt(i)), bot_pt(j));
    double e1 = chordal(apply(branches_[i], top_pt(i + 1)), bot_pt(j + 1));
    if (e0 > kEndpointTol || e1 > kEndpointTol)
      throw Error(ErrorCode::InvalidHiet, "branch " + std::to_string(i) +
                                              " does not map its top subinterval onto bottom " +
                                              std::to_string(j),
                  Json{{"start_error", e0}, {"end_error", e1}});
  }
}

Hiet Hiet::from_branches(const ProjectivePoint& left, const ProjectivePoint& right,
                         const std::vector<ProjectivePoint>& top_breaks,
                         const std::vector<MoebiusMap>& branches) {
  if (branches.size() != top_breaks.size() + 1)
    throw Error(ErrorCode::InvalidHiet, "need one branch per top subinterval");
  MoebiusMap chart = interval_chart(left, right);
  // drop empty pieces, merge equal neighbours
  std::vector<ProjectivePoint> starts = {left};
  std::vector<MoebiusMap> maps = {branches[0]};
  double last_s = 0;
  for (size_t k = 0; k < top_breaks.size(); ++k) {
    double s = chart_value(chart, top_breaks[k]);
    const MoebiusMap& m = branches[k + 1];
    if (1 - s <= 1e-14) break;
    if (s - last_s <= 1e-14) {
      maps.back() = m;
      starts.back() = starts.size() == 1 ? left : top_breaks[k];
      continue;
    }
    if (max_entry_diff(m, maps.back()) <= 1e-12) continue;
    starts.push_back(top_breaks[k]);
    maps.push_back(m);
    last_s = s;
  }
  size_t n = maps.size();
  // image starts give the bottom partition
  std::vector<std::pair<double, size_t>> img;
  for (size_t i = 0; i < n; ++i) {
    double v = chart_value(chart, apply(maps[i], starts[i]));
    if (std::isnan(v)) v = 1.0;
    if (v >= 1.0 - kParamTol && v <= 1.0 + kParamTol) v = 0.0;
    if (v < 0 && v > -kParamTol) v = 0.0;
    img.emplace_back(v, i);
  }
  std::sort(img.begin(), img.end());
  std::vector<int> perm(n);
  std::vector<ProjectivePoint> bottom;
  for (size_t j = 0; j < n; ++j) {
    perm[img[j].second] = static_cast<int>(j);
    if (j > 0) bottom.push_back(apply(maps[img[j].second], starts[img[j].second]));
  }
  std::vector<ProjectivePoint> top(starts.begin() + 1, starts.end());
  return Hiet(left, right, std::move(top), std::move(bottom), std::move(maps), std::move(perm));
}

double Hiet::param(const ProjectivePoint& p) const {
  double v = chart_value(chart_, p);
  if (std::isnan(v) || v < -kParamTol || v > 1 + kParamTol)
    throw Error(ErrorCode::OutOfInterval, "point " + p.display() + " is outside the interval");
  if (v < 0) v = 0;
  if (v >= 1) v = 0;  // right endpoint is glued to the left one
  return v;
}

ProjectivePoint Hiet::point(double s) const {
  s = wrap01(s);
  if (s == 0) return left_;
  return apply(dstori::inverse(chart_), ProjectivePoint::finite(s));
}

bool Hiet::contains(const ProjectivePoint& p, double tol) const {
  double v = chart_value(chart_, p);
  return !std::isnan(v) && v >= -tol && v <= 1 + tol;
}

size_t Hiet::top_index(double s) const {
  auto it = std::upper_bound(top_s_.begin(), top_s_.end(), s);
  size_t k = static_cast<size_t>(it - top_s_.begin());
  return std::clamp<size_t>(k, 1, branches_.size()) - 1;
}

size_t Hiet::bottom_index(double s) const {
  auto it = std::upper_bound(bottom_s_.begin(), bottom_s_.end(), s);
  size_t k = static_cast<size_t>(it - bottom_s_.begin());
  return std::clamp<size_t>(k, 1, branches_.size()) - 1;
}

Hiet Hiet::inverse() const {
  size_t n = branches_.size();
  std::vector<MoebiusMap> inv(n);
  std::vector<int> perm(n);
  for (size_t i = 0; i < n; ++i) {
    inv[static_cast<size_t>(perm_[i])] = dstori::inverse(branches_[i]);
    perm[static_cast<size_t>(perm_[i])] = static_cast<int>(i);
  }
  return Hiet(left_, right_, bottom_breaks_, top_breaks_, std::move(inv), std::move(perm));
}

Json Hiet::to_json() const {
  Json j;
  j["interval"] = Json::array({point_json(left_), point_json(right_)});
  j["top_breaks"] = Json::array();
  for (const auto& p : top_breaks_) j["top_breaks"].push_back(point_json(p));
  j["bottom_breaks"] = Json::array();
  for (const auto& p : bottom_breaks_) j["bottom_breaks"].push_back(point_json(p));
  j["branches"] = Json::array();
  for (const auto& m : branches_) j["branches"].push_back({m.m11, m.m12, m.m21, m.m22});
  j["perm"] = perm_;
  return j;
}

Hiet Hiet::from_json(const Json& j) {
  try {
    const Json& iv = j.at("interval");
    std::vector<ProjectivePoint> top, bottom;
    for (const auto& p : j.at("top_breaks")) top.push_back(point_from_json(p));
    for (const auto& p : j.at("bottom_breaks")) bottom.push_back(point_from_json(p));
    std::vector<MoebiusMap> maps;
    for (const auto& m : j.at("branches")) {
      if (m.size() != 4) throw Error(ErrorCode::InvalidSpec, "branch needs 4 entries");
      maps.emplace_back(json_to_double(m[0]), json_to_double(m[1]), json_to_double(m[2]),
                        json_to_double(m[3]));
    }
    return Hiet(point_from_json(iv.at(0)), point_from_json(iv.at(1)), top, bottom, maps,
                j.at("perm").get<std::vector<int>>());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("bad hiet json: ") + e.what());
  }
}

namespace {

// Resolve the glued endpoint to the left one before applying a branch.
ProjectivePoint representative(const Hiet& h, const ProjectivePoint& p, double s) {
  if (s == 0 && chordal(p, h.left()) > kPointTol) return h.left();
  return p;
}

}  // namespace

ProjectivePoint eval(const Hiet& h, const ProjectivePoint& p) {
  double s = h.param(p);
  return apply(h.branches()[h.top_index(s)], representative(h, p, s));
}

ProjectivePoint eval_inverse(const Hiet& h, const ProjectivePoint& p) {
  double s = h.param(p);
  size_t j = h.bottom_index(s);
  size_t i = static_cast<size_t>(std::find(h.perm().begin(), h.perm().end(), static_cast<int>(j)) -
                                 h.perm().begin());
  return apply(inverse(h.branches()[i]), representative(h, p, s));
}

ProjectivePoint iterate(const Hiet& h, const ProjectivePoint& p, long n) {
  ProjectivePoint q = p;
  for (long k = 0; k < n; ++k) q = eval(h, q);
  for (long k = 0; k > n; --k) q = eval_inverse(h, q);
  return q;
}

std::string coding(const Hiet& h, const ProjectivePoint& p, long n) {
  std::string w;
  ProjectivePoint q = p;
  for (long k = 0; k < n; ++k) {
    size_t i = h.top_index(h.param(q));
    w.push_back(static_cast<char>('a' + i));
    q = eval(h, q);
  }
  return w;
}

Hiet compose(const Hiet& a, const Hiet& b) {
  if (chordal(a.left(), b.left()) > kPointTol || chordal(a.right(), b.right()) > kPointTol)
    throw Error(ErrorCode::InvalidHiet, "compose needs a common interval");
  std::vector<std::pair<double, ProjectivePoint>> cuts;
  for (const auto& p : b.top_breaks()) cuts.emplace_back(b.param(p), p);
  for (const auto& p : a.top_breaks()) {
    ProjectivePoint q = eval_inverse(b, p);
    cuts.emplace_back(b.param(q), q);
  }
  std::sort(cuts.begin(), cuts.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
  std::vector<ProjectivePoint> breaks;
  std::vector<double> bounds = {0.0};
  for (const auto& c : cuts) {
    if (c.first - bounds.back() <= 1e-14) continue;
    bounds.push_back(c.first);
    breaks.push_back(c.second);
  }
  bounds.push_back(1.0);
  std::vector<MoebiusMap> maps;
  for (size_t k = 0; k + 1 < bounds.size(); ++k) {
    double mid = (bounds[k] + bounds[k + 1]) / 2;
    size_t i = b.top_index(mid);
    ProjectivePoint img = apply(b.branches()[i], b.point(mid));
    size_t j = a.top_index(a.param(img));
    maps.push_back(compose(a.branches()[j], b.branches()[i]));
  }
  return Hiet::from_branches(b.left(), b.right(), breaks, maps);
}

// ---------------------------------------------------------------------------

CircleMap::CircleMap(const ProjectivePoint& left, const ProjectivePoint& right,
                     const MoebiusMap& chart, std::vector<CirclePiece> pieces,
                     std::optional<Hiet> hiet)
    : left_(left), right_(right), chart_(chart), pieces_(std::move(pieces)), hiet_(std::move(hiet)) {
  if (pieces_.empty()) throw Error(ErrorCode::InvalidHiet, "circle map without pieces");
  if (pieces_.front().s0 != 0.0 || pieces_.back().s1 != 1.0)
    throw Error(ErrorCode::InvalidHiet, "pieces must tile [0,1)");
  for (size_t i = 0; i + 1 < pieces_.size(); ++i)
    if (pieces_[i].s1 != pieces_[i + 1].s0 || !(pieces_[i].s1 > pieces_[i].s0))
      throw Error(ErrorCode::InvalidHiet, "pieces must tile [0,1)");
  // Branch-aware winding: each piece gets the least integer keeping the lift
  // non-decreasing across its left end.
  double prev_end = 0;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    CirclePiece& pc = pieces_[i];
    if (pc.constant) {
      pc.b1 = pc.b0;
      homeo_ = false;
    }
    pc.offset = i == 0 ? 0 : static_cast<int>(std::ceil(prev_end - 1e-9 - pc.b0));
    prev_end = pc.b1 + pc.offset;
  }
  double deg = prev_end - (pieces_.front().b0 + 1.0);
  if (std::abs(deg) > 1e-7)
    throw Error(ErrorCode::InvalidHiet, "circle map is not of degree one",
                Json{{"defect", deg}});
}

size_t CircleMap::piece_index(double s) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
                             [](double v, const CirclePiece& p) { return v < p.s0; });
  size_t k = static_cast<size_t>(it - pieces_.begin());
  return std::clamp<size_t>(k, 1, pieces_.size()) - 1;
}

double CircleMap::lift01(double s) const {
  const CirclePiece& pc = pieces_[piece_index(s)];
  double v = pc.constant ? pc.b0 : std::clamp(pc.phi(s), pc.b0, pc.b1);
  return v + pc.offset;
}

double CircleMap::eval(double s) const { return wrap01(lift01(wrap01(s))); }

double CircleMap::param(const ProjectivePoint& p) const {
  double v = chart_value(chart_, p);
  if (std::isnan(v) || v < -kParamTol || v > 1 + kParamTol)
    throw Error(ErrorCode::OutOfInterval, "point " + p.display() + " is outside the circle");
  v = std::clamp(v, 0.0, 1.0);
  return v >= 1 ? 0.0 : v;
}

ProjectivePoint CircleMap::point(double s) const {
  s = wrap01(s);
  if (s == 0) return left_;
  return apply(inverse(chart_), ProjectivePoint::finite(s));
}

ProjectivePoint CircleMap::eval_point(const ProjectivePoint& p) const { return point(eval(param(p))); }

CircleMap to_circle_map(const Hiet& h, const MoebiusMap& chart) {
  double c0 = chart_value(chart, h.left()), c1 = chart_value(chart, h.right());
  if (!(std::abs(c0) <= 1e-12 && std::abs(c1 - 1) <= 1e-12))
    throw Error(ErrorCode::InvalidHiet, "chart must send the interval onto [0,1]");
  auto s_of = [&](const ProjectivePoint& p) { return chart_value(chart, p); };
  std::vector<double> top = {0.0}, bottom = {0.0};
  for (const auto& p : h.top_breaks()) top.push_back(s_of(p));
  for (const auto& p : h.bottom_breaks()) bottom.push_back(s_of(p));
  top.push_back(1.0);
  bottom.push_back(1.0);
  MoebiusMap cinv = inverse(chart);
  std::vector<CirclePiece> pieces;
  for (size_t i = 0; i < h.size(); ++i) {
    CirclePiece pc;
    pc.s0 = top[i];
    pc.s1 = top[i + 1];
    pc.phi = compose(chart, compose(h.branches()[i], cinv));
    size_t j = static_cast<size_t>(h.perm()[i]);
    pc.b0 = bottom[j];
    pc.b1 = bottom[j + 1];
    pieces.push_back(pc);
  }
  return CircleMap(h.left(), h.right(), chart, std::move(pieces), h);
}

CircleMap to_circle_map(const Hiet& h) { return to_circle_map(h, h.chart()); }

CircleMap rigid_rotation(double r) {
  r = wrap01(r);
  auto zero = ProjectivePoint::finite(0), one = ProjectivePoint::finite(1);
  if (r == 0) {
    Hiet h(zero, one, {}, {}, {MoebiusMap::identity()}, {0});
    return to_circle_map(h, MoebiusMap::identity());
  }
  Hiet h(zero, one, {ProjectivePoint::finite(1 - r)}, {ProjectivePoint::finite(r)},
         {MoebiusMap(1, r, 0, 1), MoebiusMap(1, r - 1, 0, 1)}, {1, 0});
  return to_circle_map(h, MoebiusMap::identity());
}

// ---------------------------------------------------------------------------

MoebiusMap family_g(double theta) {
  double y = y_theta(theta);
  return MoebiusMap(-(1 - y), 0, 1, -1);
}

MoebiusMap family_h(double theta, const ProjectivePoint& x) {
  double y = y_theta(theta);
  double a = x.a, b = x.b;
  return MoebiusMap(a * (1 - y), a * y, b * (1 - y), a);
}

namespace {

void require_close(const ProjectivePoint& got, const ProjectivePoint& want, const char* what) {
  double e = chordal(got, want);
  if (e > kEndpointTol)
    throw Error(ErrorCode::VerificationFailed, std::string("family identity failed: ") + what,
                Json{{"error", e}});
}

bool near_one(const ProjectivePoint& p) { return std::abs(p.a - p.b) <= 1e-12; }

}  // namespace

OneSingFamilyX build_one_sing(double theta, const ProjectivePoint& x) {
  if (!(theta > 0)) throw Error(ErrorCode::DomainError, "theta must be positive");
  if (x.a - x.b < -1e-12 * x.a || x.a <= 0)
    throw Error(ErrorCode::DomainError, "x must lie in [1, inf]");
  OneSingFamilyX f;
  f.theta = theta;
  f.y_theta = y_theta(theta);
  f.x = x;
  f.x_prime = ProjectivePoint(x.a, x.a - x.b);
  f.g = family_g(theta);
  f.h = family_h(theta, x);
  f.gh = compose(f.g, f.h);
  auto P = ProjectivePoint::finite;
  auto inf = ProjectivePoint::infinity();
  require_close(apply(f.h, f.x_prime), P(1), "h(x') = 1");
  require_close(apply(f.h, inf), x, "h(inf) = x");
  require_close(apply(f.h, P(0)), P(f.y_theta), "h(0) = y_theta");
  require_close(apply(f.gh, P(1)), x, "gh(1) = x");
  if (x.is_infinite() || near_one(x)) {
    // E_1 = E_inf = h_inf on [1, inf)
    MoebiusMap hinf = family_h(theta, inf);
    f.E.emplace(P(1), inf, std::vector<ProjectivePoint>{}, std::vector<ProjectivePoint>{},
                std::vector<MoebiusMap>{hinf}, std::vector<int>{0});
  } else {
    f.E.emplace(P(1), inf, std::vector<ProjectivePoint>{f.x_prime}, std::vector<ProjectivePoint>{x},
                std::vector<MoebiusMap>{f.gh, f.h}, std::vector<int>{1, 0});
  }
  return f;
}

OneSingFamilyX build_one_sing(double theta, double x) {
  return build_one_sing(theta, ProjectivePoint::finite(x));
}

MoebiusMap family_h1(double theta, const ProjectivePoint& x, double y) {
  double e = std::exp(theta), a = x.a, b = x.b;
  return MoebiusMap(a * (e - y * (e + 1)), a * y, -(a + e * (y - 1) * b), a);
}

MoebiusMap family_h2(double theta, const ProjectivePoint& x, double y) {
  double e = std::exp(theta), a = x.a, b = x.b;
  double k = e * (1 - y) * b - a;
  return MoebiusMap(a * k, a * (a * (1 - e) + y * e * b), b * k, a * (b + e * (y * b - a)));
}

TwoSingFamilyXY build_two_sing(double theta, const ProjectivePoint& x, double y) {
  if (!(theta > 0)) throw Error(ErrorCode::NonPositiveAngle, "theta must be positive");
  const double tol = 1e-12;
  double yt = y_theta(theta), e = std::exp(theta);
  Json where{{"theta", theta}, {"x", json_double(x.value())}, {"y", y}};
  if (x.a - x.b < -tol * x.a || x.a <= 0)
    throw Error(ErrorCode::OutsideDomain, "x must lie in [1, inf]", where);
  bool top_edge = std::abs(y - yt) <= tol;
  if (top_edge && near_one(x)) return build_two_sing(theta, ProjectivePoint::infinity(), yt);
  if (top_edge) {
    y = yt;
  } else if (x.is_infinite()) {
    if (y < -tol || y > yt + tol) throw Error(ErrorCode::OutsideDomain, "y outside [0, y_theta]", where);
    y = std::max(y, 0.0);
  } else if (!in_domain(theta, x, y, tol)) {
    double xv = x.value();
    bool bottom_edge = std::abs(y) <= tol && xv >= e * (1 - tol);
    bool diagonal = std::abs(y - (1 - xv / e)) <= tol && xv > 1 && xv <= e * (1 + tol);
    if (bottom_edge || diagonal)
      throw Error(ErrorCode::BoundaryCase, "boundary parameters: use build_boundary_inverse", where);
    throw Error(ErrorCode::OutsideDomain, "(x,y) outside the domain", where);
  }

  TwoSingFamilyXY f;
  f.theta = theta;
  f.y_theta = yt;
  f.x = x;
  f.y = y;
  f.y_plus = lshape_y_plus(theta, x, y);
  f.x_prime = ProjectivePoint(x.a, x.a + e * (y - 1) * x.b);
  f.h1 = family_h1(theta, x, y);
  f.h2 = family_h2(theta, x, y);
  MoebiusMap h2inv = inverse(f.h2);
  f.g1 = compose(f.h2, compose(f.h1, h2inv));
  f.g2 = compose(f.h1, h2inv);
  f.y_prime = apply(compose(f.h2, inverse(f.h1)), ProjectivePoint::finite(0));

  auto P = ProjectivePoint::finite;
  auto inf = ProjectivePoint::infinity();
  ProjectivePoint yp = P(f.y_plus), yy = P(y);
  require_close(apply(f.h1, P(1)), x, "h1(1) = x");
  require_close(apply(f.h1, f.x_prime), inf, "h1(x') = inf");
  require_close(apply(f.h1, P(0)), yy, "h1(0) = y");
  require_close(apply(f.h2, f.x_prime), P(1), "h2(x') = 1");
  require_close(apply(f.h2, inf), x, "h2(inf) = x");
  require_close(apply(f.h2, P(0)), yp, "h2(0) = y_plus");
  require_close(apply(f.g1, P(1)), x, "g1(1) = x");
  require_close(apply(f.g1, P(0)), yy, "g1(0) = y");
  require_close(apply(f.g1, f.y_prime), yp, "g1(y') = y_plus");
  require_close(apply(f.g2, P(1)), inf, "g2(1) = inf");
  require_close(apply(f.g2, f.y_prime), P(0), "g2(y') = 0");
  require_close(apply(f.g2, yp), yy, "g2(y_plus) = y");

  if (near_one(f.x_prime)) {
    f.E.emplace(P(1), inf, std::vector<ProjectivePoint>{}, std::vector<ProjectivePoint>{},
                std::vector<MoebiusMap>{f.h2}, std::vector<int>{0});
  } else {
    f.E.emplace(P(1), inf, std::vector<ProjectivePoint>{f.x_prime}, std::vector<ProjectivePoint>{x},
                std::vector<MoebiusMap>{f.h1, f.h2}, std::vector<int>{1, 0});
  }
  double ypv = f.y_prime.value();
  if (std::abs(ypv) <= 1e-12) {
    f.F.emplace(P(0), yp, std::vector<ProjectivePoint>{}, std::vector<ProjectivePoint>{},
                std::vector<MoebiusMap>{f.g2}, std::vector<int>{0});
  } else if (std::abs(ypv - f.y_plus) <= 1e-12) {
    f.F.emplace(P(0), yp, std::vector<ProjectivePoint>{}, std::vector<ProjectivePoint>{},
                std::vector<MoebiusMap>{f.g1}, std::vector<int>{0});
  } else {
    f.F.emplace(P(0), yp, std::vector<ProjectivePoint>{f.y_prime}, std::vector<ProjectivePoint>{yy},
                std::vector<MoebiusMap>{f.g1, f.g2}, std::vector<int>{1, 0});
  }
  return f;
}

TwoSingFamilyXY build_two_sing(double theta, double x, double y) {
  return build_two_sing(theta, ProjectivePoint::finite(x), y);
}

CircleMap build_boundary_inverse(double theta, const ProjectivePoint& x) {
  if (!(theta > 0)) throw Error(ErrorCode::NonPositiveAngle, "theta must be positive");
  double e = std::exp(theta);
  if (x.a - x.b <= 1e-12 * x.a || x.a <= 0)
    throw Error(ErrorCode::NotBoundary, "boundary parameter x must lie in (1, inf]");
  auto P = ProjectivePoint::finite;
  auto inf = ProjectivePoint::infinity();
  double xv = x.value();
  double y = xv >= e * (1 - 1e-12) ? 0.0 : 1 - xv / e;
  bool regular = x.is_infinite() || xv > e * (1 + 1e-12);
  if (regular) {
    // y = 0 with x > e^theta: E is still a homeomorphism.
    MoebiusMap h1 = family_h1(theta, x, 0), h2 = family_h2(theta, x, 0);
    ProjectivePoint xp(x.a, x.a - e * x.b);
    Hiet E = x.is_infinite()
                 ? Hiet(P(1), inf, {}, {}, {h2}, {0})
                 : Hiet(P(1), inf, {xp}, {x}, {h1, h2}, {1, 0});
    return to_circle_map(E.inverse());
  }
  // x' = inf: E^-1 is h1^-1 on [x, inf) and the constant inf on [1, x).
  MoebiusMap h1 = family_h1(theta, x, y);
  require_close(apply(h1, P(1)), x, "h1(1) = x");
  require_close(apply(h1, inf), inf, "h1(inf) = inf");
  MoebiusMap chart = interval_chart(P(1), inf);
  double sx = chart_value(chart, x);
  CirclePiece c;
  c.s0 = 0;
  c.s1 = sx;
  c.constant = true;
  c.b0 = c.b1 = 0;  // inf is the glued point, lifted to 0
  CirclePiece m;
  m.s0 = sx;
  m.s1 = 1;
  m.phi = compose(chart, compose(inverse(h1), inverse(chart)));
  m.b0 = 0;
  m.b1 = 1;
  return CircleMap(P(1), inf, chart, {c, m});
}

}  // namespace dstori
