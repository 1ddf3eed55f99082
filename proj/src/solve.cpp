#include "dstori/solve.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dstori/desitter.h"
#include "dstori/errors.h"

namespace dstori {

namespace {

double wrap01(double v) { return v - std::floor(v); }

double circ_dist(double a, double b) {
  double d = wrap01(a - b);
  return std::min(d, 1 - d);
}

const MoebiusMap& x_chart() {
  static const MoebiusMap c = interval_chart(ProjectivePoint::finite(1), ProjectivePoint::infinity());
  return c;
}

}  // namespace

ProjectivePoint x_point(double x) {
  return std::isinf(x) ? ProjectivePoint::infinity() : ProjectivePoint::finite(x);
}

double x_of_chart(double s) {
  if (s >= 1) return INFINITY;
  if (s <= 0) return 1;
  return apply(inverse(x_chart()), ProjectivePoint::finite(s)).value();
}

double chart_of_x(double x) {
  if (std::isinf(x)) return 1;
  ProjectivePoint q = apply(x_chart(), ProjectivePoint::finite(x));
  return q.a / q.b;
}

Json AffineCircle::to_json() const {
  Json j{{"kind", kind == Kind::dilation ? "dilation" : "translation"},
         {"interval", {{left.a, left.b}, {right.a, right.b}}}};
  if (kind == Kind::dilation) {
    j["mu"] = mu;
    j["generator"] = {{generator.m11, generator.m12}, {generator.m21, generator.m22}};
  }
  return j;
}

AffineCircle closed_alpha_leaf_circle(const GluedSurface& s) {
  auto it = s.sections.find("bottom");
  if (it == s.sections.end()) throw Error(ErrorCode::IncompatibleCircle, "surface has no bottom section");
  auto [left, right] = section_interval(s, it->second);
  MoebiusMap c = interval_chart(left, right);
  ProjectivePoint mid = apply(inverse(c), ProjectivePoint::finite(0.5));
  TraceOptions o;
  o.corner_policy = CornerPolicy::pass_through;
  o.max_jumps = 8;
  LeafTrace t = trace_leaf(s, section_point(s, it->second, mid), LeafKind::alpha, o);
  if (!t.closed) throw Error(ErrorCode::IncompatibleCircle, "the alpha-leaf of the bottom section is not closed");
  MoebiusMap hol = MoebiusMap::identity();
  for (const auto& j : t.jumps) hol = compose(j.map, hol);
  MoebiusMap gen = inverse(hol);
  if (chordal(apply(gen, left), right) > 1e-9)
    throw Error(ErrorCode::IncompatibleCircle, "leaf holonomy does not glue the section ends");
  MapClass mc = classify(gen);
  AffineCircle a;
  a.left = left;
  a.right = right;
  if (mc.tag == MapTag::hyperbolic) {
    a.kind = AffineCircle::Kind::dilation;
    a.mu = std::exp(2 * mc.translation_parameter);
    a.generator = gen;
  } else {
    throw Error(ErrorCode::IncompatibleCircle, "closed leaf holonomy is not hyperbolic");
  }
  return a;
}

Hiet circle_automorphism(const AffineCircle& c, double u) {
  u = wrap01(u);
  if (u == 0)
    return Hiet::from_branches(c.left, c.right, {}, {MoebiusMap::identity()});
  MoebiusMap m0, m1;
  if (c.kind == AffineCircle::Kind::dilation) {
    m0 = hyperbolic_power(c.generator, u);
    m1 = hyperbolic_power(c.generator, u - 1);
  } else {
    MoebiusMap ch = interval_chart(c.left, c.right);
    m0 = conjugate(inverse(ch), MoebiusMap(1, u, 0, 1));
    m1 = conjugate(inverse(ch), MoebiusMap(1, u - 1, 0, 1));
  }
  ProjectivePoint cut = apply(inverse(m0), c.right);
  return Hiet::from_branches(c.left, c.right, {cut}, {m0, m1});
}

double lift_value(const RotationNumber& r) {
  if (r.is_rational()) return static_cast<double>(r.p) / static_cast<double>(r.q);
  return 0.5 * (r.lo + r.hi);
}

Json SurgeryResult::to_json() const {
  return Json{{"parameter", parameter}, {"rotation", rotation.to_json()}, {"rho_lift", rho_lift}};
}

SurgeryResult surgery_compose(const CircleMap& p, const AffineCircle& c, double u,
                              const RotationOptions& opt) {
  if (!p.hiet() || chordal(p.left(), c.left) > 1e-12 || chordal(p.right(), c.right) > 1e-12)
    throw Error(ErrorCode::IncompatibleCircle, "return map does not live on this circle");
  double turns = std::floor(u);
  double frac = u - turns;
  Hiet t = circle_automorphism(c, frac);
  CircleMap m = to_circle_map(compose(*p.hiet(), t), p.chart());
  RotationNumber r = rotation_number(m, opt);
  // integer correction between the standard lift of P o T and lift(P) o lift(T)
  double tu = frac == 0 ? 0 : p.param(eval(t, c.left));
  double k = std::round(p.lift01(tu) - m.lift01(0));
  return SurgeryResult{m, r, u, lift_value(r) + k + turns};
}

std::string rotation_word(long p, long q) {
  if (q < 1 || p < 0 || p >= q) throw Error(ErrorCode::DomainError, "need 0 <= p < q");
  std::string w;
  for (long k = 0; k < q; ++k) w += (k * p) % q < q - p ? 'a' : 'b';
  return w;
}

MoebiusMap word_map(const std::string& w, const MoebiusMap& a, const MoebiusMap& b) {
  MoebiusMap m = MoebiusMap::identity();
  for (char c : w) {
    if (c != 'a' && c != 'b') throw Error(ErrorCode::DomainError, "word letters must be a or b");
    m = compose(c == 'a' ? a : b, m);
  }
  return m;
}

Json RealizeReport::to_json() const {
  Json j{{"kind", kind}, {"theta", theta}, {"x", json_double(x)}, {"iterations", iterations}};
  if (kind == "rational") {
    j["p"] = p;
    j["q"] = q;
    j["word"] = word;
    j["coding"] = coding;
    j["orbit"] = orbit;
    j["return_error"] = return_error;
    j["word_residual"] = word_residual;
    j["cyclic_order_ok"] = cyclic_order_ok;
  } else {
    j["target"] = target;
    j["measured"] = measured;
    j["residual"] = residual;
    j["error_bound"] = error_bound;
    j["plateau_warning"] = plateau_warning;
  }
  if (kind == "pair") {
    j["y"] = y;
    j["target_beta"] = target_beta;
    j["measured_beta"] = measured_beta;
    j["residual_beta"] = residual_beta;
  }
  return j;
}

namespace {

CircleMap e_map(double theta, double x) { return to_circle_map(*build_one_sing(theta, x_point(x)).E); }

// F^q(0) - p for the lift with F(0) in [0,1]
double orbit_defect(double theta, double s, long p, long q) {
  CircleMap m = e_map(theta, x_of_chart(s));
  Lift F(m);
  LiftPoint z{0, 0};
  for (long k = 0; k < q; ++k) z = F(z);
  return static_cast<double>(z.n - p) + z.s;
}

}  // namespace

RealizeReport realize_rational(double theta, long p, long q, const SolveOptions& opt) {
  if (!(theta > 0)) throw Error(ErrorCode::NonPositiveAngle, "theta must be positive");
  if (q < 2 || p <= 0 || p >= q || std::gcd(p, q) != 1)
    throw Error(ErrorCode::DomainError, "need reduced 0 < p/q < 1");
  double lo = 0, hi = 1 - 1e-12;
  double dlo = orbit_defect(theta, lo, p, q), dhi = orbit_defect(theta, hi, p, q);
  if (!(dlo < 0 && dhi > 0))
    throw Error(ErrorCode::NoRoot, "orbit defect does not change sign on [1, inf)",
                Json{{"defect_at_1", dlo}, {"defect_near_inf", dhi}});
  int it = 0;
  for (; it < opt.bisection_depth; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double d = orbit_defect(theta, mid, p, q);
    if (d == 0) {
      lo = hi = mid;
      dlo = dhi = 0;
      break;
    }
    if (d < 0) {
      lo = mid;
      dlo = d;
    } else {
      hi = mid;
      dhi = d;
    }
  }
  double s = std::abs(dlo) <= std::abs(dhi) ? lo : hi;
  RealizeReport r;
  r.kind = "rational";
  r.theta = theta;
  r.p = p;
  r.q = q;
  r.iterations = it;
  r.x = x_of_chart(s);
  OneSingFamilyX fam = build_one_sing(theta, x_point(r.x));
  CircleMap m = to_circle_map(*fam.E);
  r.word = rotation_word(p, q);
  r.coding = coding(*fam.E, ProjectivePoint::finite(1), q);
  double t = 0;
  for (long k = 0; k < q; ++k) {
    r.orbit.push_back(t);
    t = m.eval(t);
  }
  r.return_error = std::abs(orbit_defect(theta, s, p, q));
  r.word_residual = chordal(apply(word_map(r.word, fam.gh, fam.h), ProjectivePoint::finite(1)),
                            ProjectivePoint::finite(1));
  try {
    r.cyclic_order_ok = cyclic_order_matches(r.orbit, p, q);
  } catch (const Error&) {
    r.cyclic_order_ok = false;
  }
  if (r.return_error > opt.rotation.return_tol || !r.cyclic_order_ok ||
      r.word_residual > opt.rotation.return_tol)
    throw Error(ErrorCode::VerificationFailed, "realized orbit fails its certificate", r.to_json());
  return r;
}

RealizeReport realize_irrational(double theta, double target, double tol, const SolveOptions& opt) {
  if (!(theta > 0)) throw Error(ErrorCode::NonPositiveAngle, "theta must be positive");
  if (!(target >= 0 && target < 1) || !(tol > 0))
    throw Error(ErrorCode::DomainError, "target must lie in [0,1) and tol > 0");
  RealizeReport r;
  r.kind = "irrational";
  r.theta = theta;
  r.target = target;
  if (target == 0) {  // rho = 0 only at x = 1 = inf
    r.x = 1;
    RotationNumber rn = rotation_number(e_map(theta, 1), opt.rotation);
    r.measured = rn.value;
    r.residual = circ_dist(rn.value, 0);
    return r;
  }
  RotationOptions ro = opt.rotation;
  ro.tol = std::min(ro.tol, tol / 4);
  double lo = 0, hi = 1 - 1e-12;
  RotationNumber best;
  double best_s = 0.5;
  for (int it = 0;; ++it) {
    if (it >= opt.bisection_depth)
      throw Error(ErrorCode::BudgetExceeded, "bisection depth exhausted",
                  Json{{"x", json_double(x_of_chart(best_s))}, {"measured", best.value}});
    double mid = 0.5 * (lo + hi);
    RotationNumber rn = rotation_number(e_map(theta, x_of_chart(mid)), ro);
    double v = lift_value(rn);
    best = rn;
    best_s = mid;
    r.iterations = it + 1;
    double res = std::abs(v - target);
    if (res + rn.error_bound <= tol || hi - lo < opt.x_width) {
      r.x = x_of_chart(mid);
      r.measured = rn.value;
      r.error_bound = rn.error_bound;
      r.residual = res;
      r.plateau_warning = res + rn.error_bound > tol;
      return r;
    }
    if (v < target) lo = mid;
    else hi = mid;
  }
}

namespace {

struct PairEval {
  bool ok = false;
  double ra = 0, rb = 0;  // measured
  double ea = 0, eb = 0;  // residual + bound
  double x = 0, y = 0;
  double score() const { return ok ? std::max(ea, eb) : INFINITY; }
};

}  // namespace

RealizeReport realize_pair(double theta, double rho_alpha, double rho_beta, double tol,
                           const SolveOptions& opt) {
  if (!(theta > 0)) throw Error(ErrorCode::NonPositiveAngle, "theta must be positive");
  if (!(tol > 0)) throw Error(ErrorCode::DomainError, "tol must be positive");
  double yt = y_theta(theta);
  RotationOptions ro = opt.rotation;
  ro.tol = std::min(ro.tol, tol / 4);
  long evals = 0;
  // (s, t) in (0,1]^2 -> (x, y) with y between the lower boundary and y_theta
  auto eval = [&](double s, double t) {
    PairEval e;
    ++evals;
    e.x = x_of_chart(s);
    double ylo = std::isinf(e.x) ? 0 : std::max(0.0, 1 - std::exp(-theta) * e.x);
    e.y = t >= 1 ? yt : ylo + t * (yt - ylo);
    try {
      TwoSingFamilyXY f = build_two_sing(theta, x_point(e.x), e.y);
      RotationNumber a = rotation_number(to_circle_map(*f.F), ro);
      RotationNumber b = rotation_number(to_circle_map(f.E->inverse()), ro);
      e.ra = a.value;
      e.rb = b.value;
      e.ea = circ_dist(a.value, rho_alpha) + a.error_bound;
      e.eb = circ_dist(b.value, rho_beta) + b.error_bound;
      e.ok = true;
    } catch (const Error& err) {
      if (err.code() == ErrorCode::BudgetExceeded) throw;
      e.ok = false;  // boundary or outside the domain
    }
    return e;
  };
  int G = std::max(2, opt.grid);
  struct Cand {
    double s, t;
    PairEval e;
  };
  // a zero target pins one boundary edge: y = y_theta carries rho(F) = 0 and
  // x = inf carries rho(E^-1) = 0, the other number sweeping degree one there
  bool free_s = rho_beta != 0;
  bool free_t = rho_alpha != 0;
  std::vector<Cand> grid;
  for (int i = 1; i <= (free_s ? G : 1); ++i)
    for (int j = 1; j <= (free_t ? G : 1); ++j) {
      double s = free_s ? static_cast<double>(i) / G : 1.0;
      double t = free_t ? static_cast<double>(j) / G : 1.0;
      grid.push_back({s, t, eval(s, t)});
    }
  std::stable_sort(grid.begin(), grid.end(),
                   [](const Cand& a, const Cand& b) { return a.e.score() < b.e.score(); });
  Cand best = grid.front();
  auto finish = [&](const Cand& c) {
    RealizeReport r;
    r.kind = "pair";
    r.theta = theta;
    r.x = c.e.x;
    r.y = c.e.y;
    r.target = rho_alpha;
    r.target_beta = rho_beta;
    r.measured = c.e.ra;
    r.measured_beta = c.e.rb;
    r.residual = c.e.ea;
    r.residual_beta = c.e.eb;
    r.iterations = evals;
    return r;
  };
  if (best.e.score() <= tol) return finish(best);
  // pattern search from the best few grid points
  for (size_t start = 0; start < std::min<size_t>(5, grid.size()); ++start) {
    Cand cur = grid[start];
    if (!cur.e.ok) break;
    double step = 1.0 / G;
    while (step > 1e-13 && evals < opt.pair_budget) {
      bool moved = false;
      const double ds[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& d : ds) {
        if ((d[0] != 0 && !free_s) || (d[1] != 0 && !free_t)) continue;
        double s = std::clamp(cur.s + d[0] * step, 1e-12, 1.0);
        double t = std::clamp(cur.t + d[1] * step, 1e-12, 1.0);
        PairEval e = eval(s, t);
        if (e.score() < cur.e.score()) {
          cur = {s, t, e};
          moved = true;
          break;
        }
      }
      if (cur.e.score() < best.e.score()) best = cur;
      if (best.e.score() <= tol) return finish(best);
      if (!moved) step /= 2;
    }
    if (evals >= opt.pair_budget) break;
  }
  RealizeReport r = finish(best);
  throw Error(ErrorCode::BudgetExceeded, "no parameter pair met both targets", r.to_json());
}

Json WordScanReport::to_json() const {
  return Json{{"word", word},
              {"theta", theta},
              {"x_base", json_double(x_base)},
              {"s_max", s_max},
              {"grid_points", grid_points},
              {"strictly_increasing", strictly_increasing},
              {"in_range", in_range},
              {"violations", violations},
              {"range_exits", range_exits}};
}

namespace {

// g-time from 1 to x along the flow of g (g^s(1) sweeps [1, inf] for s in [0,1])
double g_time(double theta, double x) {
  if (std::isinf(x)) return 1;
  double e = std::exp(theta);
  double ustar = e / (e - 1);
  return std::log((ustar - 1 / x) / (ustar - 1)) / theta;
}

bool in_x_range(const ProjectivePoint& p) {
  return on_arc(ProjectivePoint::finite(1), ProjectivePoint::infinity(), p, 1e-12);
}

}  // namespace

WordScanReport monotone_word_scan(double theta, double x_base, const std::string& word,
                                  const std::vector<double>& s_grid) {
  if (!(theta > 0)) throw Error(ErrorCode::NonPositiveAngle, "theta must be positive");
  if (!(x_base > 1) || std::isinf(x_base)) throw Error(ErrorCode::DomainError, "x_base must lie in (1, inf)");
  WordScanReport r;
  r.word = word;
  r.theta = theta;
  r.x_base = x_base;
  r.s_max = 1 - g_time(theta, x_base);
  MoebiusMap g = family_g(theta), h = family_h(theta, x_point(x_base));
  std::vector<double> grid;
  for (double s : s_grid)
    if (s >= 0 && s <= r.s_max) grid.push_back(s);
  std::sort(grid.begin(), grid.end());
  r.grid_points = grid.size();
  size_t n = word.size();
  // values[i][k]: prefix of length k+1 at grid[i]
  std::vector<std::vector<ProjectivePoint>> values(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    MoebiusMap a = compose(hyperbolic_power(g, grid[i] + 1), h);
    MoebiusMap b = compose(hyperbolic_power(g, grid[i]), h);
    ProjectivePoint v = ProjectivePoint::finite(1);
    for (size_t k = 0; k < n; ++k) {
      v = apply(word[k] == 'a' ? a : b, v);
      values[i].push_back(v);
      if (!in_x_range(v))
        r.range_exits.push_back({{"prefix", k + 1}, {"s", grid[i]}, {"value", v.value()}});
    }
  }
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
      bool admissible = true;
      for (size_t j = 0; j < k && admissible; ++j)
        admissible = in_x_range(values[i][j]) && in_x_range(values[i + 1][j]);
      if (!admissible) continue;
      double d = wrap01(values[i + 1][k].circle_param() - values[i][k].circle_param());
      if (!(d > 0 && d < 0.5))
        r.violations.push_back({{"prefix", k + 1}, {"s0", grid[i]}, {"s1", grid[i + 1]}, {"step", d}});
    }
  r.strictly_increasing = r.violations.empty();
  r.in_range = r.range_exits.empty();
  return r;
}

Json RigidityReport::to_json() const {
  Json rx = Json::array();
  for (double x : roots_x) rx.push_back(json_double(x));
  return Json{{"unique", unique}, {"p", p}, {"q", q}, {"roots_s", roots_s}, {"roots_x", rx},
              {"crossings", crossings}};
}

RigidityReport rigidity_uniqueness_check(double theta, long p, long q, int grid) {
  if (!(theta > 0)) throw Error(ErrorCode::NonPositiveAngle, "theta must be positive");
  RigidityReport r;
  r.p = p;
  r.q = q;
  if (p == 0) {  // fixed-point locus x in {1, inf}
    if (q != 1) throw Error(ErrorCode::DomainError, "0/q must be reduced to 0/1");
    r.roots_x = {1, INFINITY};
    r.unique = true;
    return r;
  }
  if (q < 2 || p < 0 || p >= q || std::gcd(p, q) != 1)
    throw Error(ErrorCode::DomainError, "need reduced 0 <= p/q < 1");
  std::string w = rotation_word(p, q);
  MoebiusMap g = family_g(theta), h1 = family_h(theta, ProjectivePoint::finite(1));
  const double one = ProjectivePoint::finite(1).circle_param();
  auto defect = [&](double s) {
    MoebiusMap a = compose(hyperbolic_power(g, s + 1), h1);
    MoebiusMap b = compose(hyperbolic_power(g, s), h1);
    double d = wrap01(apply(word_map(w, a, b), ProjectivePoint::finite(1)).circle_param() - one);
    return d > 0.5 ? d - 1 : d;
  };
  std::vector<double> d(static_cast<size_t>(grid) + 1);
  for (int i = 0; i <= grid; ++i) d[static_cast<size_t>(i)] = defect(static_cast<double>(i) / grid);
  for (int i = 0; i < grid; ++i) {
    double a = d[static_cast<size_t>(i)], b = d[static_cast<size_t>(i) + 1];
    if (!((a < 0 && b >= 0) || (a > 0 && b <= 0))) continue;
    if (std::abs(a) > 0.25 || std::abs(b) > 0.25) continue;  // wrap, not a crossing
    double lo = static_cast<double>(i) / grid, hi = static_cast<double>(i + 1) / grid;
    if (b == 0) lo = hi;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      double mid = 0.5 * (lo + hi);
      double dm = defect(mid);
      if ((dm < 0) == (a < 0)) lo = mid;
      else hi = mid;
    }
    if (lo <= 0 || lo >= 1) continue;  // x = 1 or inf is the 0/1 locus
    ++r.crossings;
    double x = apply(hyperbolic_power(g, lo), ProjectivePoint::finite(1)).value();
    // keep only crossings realized by the actual dynamics with the right coding
    try {
      OneSingFamilyX fam = build_one_sing(theta, x_point(x));
      CircleMap m = to_circle_map(*fam.E);
      std::vector<double> orbit;
      double t = 0;
      for (long k = 0; k < q; ++k) {
        orbit.push_back(t);
        t = m.eval(t);
      }
      // the last orbit point sits on the break x', so its letter is not compared
      std::string c = coding(*fam.E, ProjectivePoint::finite(1), q - 1);
      if (c == w.substr(0, static_cast<size_t>(q - 1)) && cyclic_order_matches(orbit, p, q) &&
          circ_dist(t, 0) <= 1e-7) {
        r.roots_s.push_back(lo);
        r.roots_x.push_back(x);
      }
    } catch (const Error&) {
    }
  }
  r.unique = r.roots_s.size() == 1;
  return r;
}

}  // namespace dstori
