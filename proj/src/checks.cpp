#include "dstori/checks.h"

#include <cmath>
#include <random>

#include "dstori/errors.h"
#include "dstori/parallel.h"
#include "dstori/solve.h"

namespace dstori {

Json SuiteResult::to_json() const {
  Json cs = Json::array();
  for (const auto& c : checks) cs.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return Json{{"suite", suite}, {"passed", passed}, {"checks", cs}};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = {"traces",   "gauss-bonnet", "words",
                                             "cross-validation", "rotation", "surgery"};
  return n;
}

std::vector<double> sweep_grid(int n) {
  std::vector<double> xs;
  if (n == 1) return {x_of_chart(0.5)};
  for (int i = 0; i < n; ++i) xs.push_back(x_of_chart(static_cast<double>(i) / (n - 1)));
  return xs;
}

CircleMap traced_e_map(double theta, double x) {
  GluedSurface s = build_T_theta_x(theta, x_point(x));
  return to_circle_map(first_return_hiet(s, s.sections.at("bottom")).inverse());
}

std::vector<SweepRow> rotation_sweep(double theta, const std::vector<double>& xs,
                                     const RotationOptions& opt, int workers) {
  auto rows = parallel_map<SweepRow>(xs.size(), workers, [&](size_t i) {
    SweepRow r;
    r.x = xs[i];
    r.rho = rotation_number(traced_e_map(theta, xs[i]), opt);
    return r;
  });
  double prev = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    double v = lift_value(rows[i].rho);
    v -= std::floor(v);
    if (i > 0) v += std::round(prev - v);
    rows[i].lift = prev = v;
  }
  return rows;
}

Json SweepSummary::to_json() const {
  return Json{{"monotone", monotone},
              {"worst_drop", worst_drop},
              {"zero_at_ends", zero_at_ends},
              {"both_sides_of_half", both_sides_of_half},
              {"total", total}};
}

SweepSummary summarize_sweep(const std::vector<SweepRow>& rows) {
  SweepSummary s;
  if (rows.empty()) return s;
  bool below = false, above = false;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    double v = r.lift - std::floor(r.lift);
    if (r.rho.is_rational() ? 2 * r.rho.p < r.rho.q : v + r.rho.error_bound < 0.5) below |= v > 0;
    if (r.rho.is_rational() ? 2 * r.rho.p > r.rho.q : v - r.rho.error_bound > 0.5) above = true;
    if (i == 0) continue;
    double drop = rows[i - 1].lift - r.lift - 2 * (r.rho.error_bound + rows[i - 1].rho.error_bound);
    if (drop > 0) {
      s.monotone = false;
      s.worst_drop = std::max(s.worst_drop, drop);
    }
  }
  auto zero = [](const RotationNumber& r) { return r.is_rational() && r.p % r.q == 0; };
  s.zero_at_ends = zero(rows.front().rho) && zero(rows.back().rho);
  s.both_sides_of_half = below && above;
  s.total = rows.back().lift - rows.front().lift;
  return s;
}

double traced_return_error(const GluedSurface& s, const Section& sec, const Hiet& expected, int n) {
  TraceOptions opt;
  opt.max_jumps = 64;
  opt.stop_edges = sec.edges;
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    ProjectivePoint t = expected.point((i + 0.5) / n);
    LeafTrace tr = trace_leaf(s, section_point(s, sec, t), sec.flow, opt);
    if (!tr.returned || !tr.landing) return INFINITY;
    const ProjectivePoint& got = sec.flow == LeafKind::beta ? tr.landing->x : tr.landing->y;
    worst = std::max(worst, chordal(got, eval(expected, t)));
  }
  return worst;
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }

Json xjson(double x) { return json_double(x); }

void add(SuiteResult& s, CheckResult c) {
  s.passed = s.passed && c.passed;
  s.checks.push_back(std::move(c));
}

// (x, y) in the open domain: x from the chart, y between the two lower bounds and y_theta
std::pair<double, double> domain_point(double theta, double a, double b) {
  double x = x_of_chart(a);
  double lo = std::max(0.0, 1 - std::exp(-theta) * x);
  return {x, lo + b * (y_theta(theta) - lo)};
}

SuiteResult suite_traces(const RunConfig& cfg) {
  SuiteResult out{"traces", true, {}};
  Rng rng(cfg.seed);
  const double thetas[] = {0.5, 1, 2};

  CheckResult closed{"closed_alpha_leaf", true, Json::array()};
  for (double th : thetas)
    for (double x : {1.5, 2.0, 4.0, double(INFINITY)}) {
      GluedSurface s = build_T_theta_x(th, x_point(x));
      double x0 = x_of_chart(uniform(rng, 0.05, 0.95));
      TraceOptions o;
      o.corner_policy = CornerPolicy::pass_through;
      o.max_jumps = 5;
      LeafTrace t = trace_leaf(s, DSPoint::finite(x0, 0), LeafKind::alpha, o);
      bool ok = t.closed && t.jumps.size() <= 2;
      closed.passed = closed.passed && ok;
      closed.detail.push_back(Json{{"theta", th}, {"x", xjson(x)}, {"start", x0},
                                   {"closed", t.closed}, {"jumps", t.jumps.size()}});
    }
  add(out, std::move(closed));

  CheckResult jumps{"jump_consistency", true, Json::array()};
  for (double th : thetas) {
    double x = x_of_chart(uniform(rng, 0.1, 0.9));
    GluedSurface s = build_T_theta_x(th, x_point(x));
    const Section& sec = s.sections.at("bottom");
    auto [l, r] = section_interval(s, sec);
    ProjectivePoint t0 = apply(inverse(interval_chart(l, r)), ProjectivePoint::finite(uniform(rng, 0.01, 0.99)));
    TraceOptions o;
    o.max_jumps = 50;
    LeafTrace t = trace_leaf(s, section_point(s, sec, t0), LeafKind::beta, o);
    double worst = 0, drift = 0;
    for (const auto& j : t.jumps) {
      if (j.after_segment + 1 >= t.segments.size()) continue;
      DSPoint img = apply(j.map, t.segments[j.after_segment].end);
      const DSPoint& nxt = t.segments[j.after_segment + 1].start;
      worst = std::max({worst, chordal(img.x, nxt.x), chordal(img.y, nxt.y)});
    }
    for (const auto& seg : t.segments) drift = std::max(drift, chordal(seg.start.x, seg.end.x));
    long total = 0;
    for (long c : t.crossing_counts) total += std::labs(c);
    bool ok = worst <= cfg.geometry_tol && drift <= 1e-12 &&
              total <= static_cast<long>(t.jumps.size()) && (t.jumps.size() == 50 || t.corner_hit);
    jumps.passed = jumps.passed && ok;
    jumps.detail.push_back(Json{{"theta", th}, {"x", xjson(x)}, {"jumps", t.jumps.size()},
                                {"map_error", worst}, {"leaf_drift", drift},
                                {"corner_hit", t.corner_hit}});
  }
  add(out, std::move(jumps));

  CheckResult corner{"corner_hit", true, Json::array()};
  for (double th : thetas) {
    double x = 2;
    GluedSurface s = build_T_theta_x(th, x_point(x));
    LeafTrace t = trace_leaf(s, DSPoint::finite(x, 0.5 * y_theta(th)), LeafKind::beta);
    bool ok = t.corner_hit && t.corner && approx_equal(s.spec.edges[*t.corner].start.x, x_point(x), 1e-12);
    corner.passed = corner.passed && ok;
    corner.detail.push_back(Json{{"theta", th}, {"corner_hit", t.corner_hit},
                                 {"corner", t.corner ? Json(*t.corner) : Json()}});
  }
  add(out, std::move(corner));
  return out;
}

SuiteResult suite_gauss_bonnet(const RunConfig& cfg) {
  SuiteResult out{"gauss-bonnet", true, {}};
  Rng rng(cfg.seed);
  const double gb_tol = 1e-6;

  CheckResult rect{"rectangle_area", true, Json::array()};
  for (double th : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    double e = std::abs(area_rectangle(rectangle_theta(th)) - th);
    rect.passed = rect.passed && e <= cfg.geometry_tol;
    rect.detail.push_back(Json{{"theta", th}, {"error", e}});
  }
  add(out, std::move(rect));

  auto record = [&](CheckResult& c, const GluedSurface& s, Json where) {
    double res = gauss_bonnet_check(s);
    bool ok = res <= gb_tol && s.euler_characteristic == 0;
    c.passed = c.passed && ok;
    where["residual"] = res;
    where["euler"] = s.euler_characteristic;
    if (!ok) c.detail.push_back(where);
    return res;
  };

  CheckResult one{"one_singularity", true, Json::array()};
  double worst1 = 0, worst_angle = 0;
  for (double th : {0.25, 0.5, 1.0, 2.0})
    for (double x : sweep_grid(12)) {
      GluedSurface s = build_T_theta_x(th, x_point(x));
      worst1 = std::max(worst1, record(one, s, Json{{"theta", th}, {"x", xjson(x)}}));
      double amax = 0;
      for (double a : s.angles) amax = std::max(amax, a);
      worst_angle = std::max(worst_angle, std::abs(amax - th));
    }
  one.passed = one.passed && worst_angle <= cfg.geometry_tol;
  one.detail.push_back(Json{{"worst_residual", worst1}, {"worst_angle_error", worst_angle}});
  add(out, std::move(one));

  CheckResult two{"two_singularities_grid", true, Json::array()};
  double worst2 = 0;
  size_t n2 = 0;
  for (double th : {0.5, 1.0, 2.0})
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        auto [x, y] = domain_point(th, 0.05 + 0.9 * i / 9, (j + 1) / 10.0);
        GluedSurface s = build_T_theta_xy(th, x_point(x), y);
        worst2 = std::max(worst2, record(two, s, Json{{"theta", th}, {"x", xjson(x)}, {"y", y}}));
        ++n2;
      }
  two.detail.push_back(Json{{"surfaces", n2}, {"worst_residual", worst2}});
  add(out, std::move(two));

  CheckResult rnd{"random_two_singularities", true, Json::array()};
  double worst3 = 0;
  for (int k = 0; k < 20; ++k) {
    double th = uniform(rng, 0.1, 3);
    auto [x, y] = domain_point(th, uniform(rng, 0.01, 0.99), uniform(rng, 0.01, 1));
    GluedSurface s = build_T_theta_xy(th, x_point(x), y);
    worst3 = std::max(worst3, record(rnd, s, Json{{"theta", th}, {"x", xjson(x)}, {"y", y}}));
  }
  rnd.detail.push_back(Json{{"seed", cfg.seed}, {"worst_residual", worst3}});
  add(out, std::move(rnd));

  CheckResult flat{"flat_model_rejected", false, Json()};
  PolygonSpec spec = spec_T_theta_x(1, x_point(2));
  spec.model = "flat";
  try {
    build_surface(spec);
  } catch (const Error& e) {
    flat.passed = e.code() == ErrorCode::InvalidSpec;
    flat.detail = e.what();
  }
  add(out, std::move(flat));
  return out;
}

SuiteResult suite_words(const RunConfig& cfg) {
  SuiteResult out{"words", true, {}};
  std::vector<double> grid;
  for (int i = 0; i < 200; ++i) grid.push_back(i / 199.0);
  SolveOptions so = cfg.solve();
  for (double th : {0.5, 1.0, 2.0})
    for (auto [p, q] : {std::pair<long, long>{1, 2}, {1, 3}, {2, 5}}) {
      CheckResult c{"word_" + std::to_string(p) + "_" + std::to_string(q) + "_theta_" + fmt_double(th),
                    true, Json::object()};
      RealizeReport rr = realize_rational(th, p, q, so);
      WordScanReport ws = monotone_word_scan(th, 1.5, rr.word, grid);
      RigidityReport rg = rigidity_uniqueness_check(th, p, q);
      double dx = rg.roots_x.empty() ? INFINITY : std::abs(chart_of_x(rg.roots_x[0]) - chart_of_x(rr.x));
      c.passed = ws.strictly_increasing && ws.grid_points > 0 && rg.unique && dx <= 1e-6;
      c.detail = Json{{"word", rr.word},
                      {"realized_x", xjson(rr.x)},
                      {"scan_points", ws.grid_points},
                      {"strictly_increasing", ws.strictly_increasing},
                      {"range_exits", ws.range_exits.size()},
                      {"unique", rg.unique},
                      {"crossings", rg.crossings},
                      {"root_chart_gap", dx}};
      add(out, std::move(c));
    }
  return out;
}

struct XParam {
  double theta, x;
};
struct XYParam {
  double theta, x, y;
};
const XParam kOneParams[] = {{0.5, 1.5}, {1, 2}, {1, 5}, {2, 3}, {1, INFINITY}};
const XYParam kTwoParams[] = {
    {1, 2, 0.4}, {1, 3, 0.6}, {0.5, 2, 0.3}, {2, 4, 0.7}, {1, INFINITY, 0.5}};

double propagated_error(const Hiet& got, const Hiet& want, int n = 100) {
  double e = 0;
  for (int i = 0; i < n; ++i) {
    ProjectivePoint t = want.point((i + 0.5) / n);
    e = std::max(e, chordal(eval(got, t), eval(want, t)));
  }
  return e;
}

SuiteResult suite_cross_validation(const RunConfig& cfg) {
  SuiteResult out{"cross-validation", true, {}};
  auto run = [&](CheckResult& c, const GluedSurface& s, const char* section, const Hiet& want, Json where) {
    const Section& sec = s.sections.at(section);
    double traced = traced_return_error(s, sec, want);
    double prop = propagated_error(first_return_hiet(s, sec), want);
    bool ok = traced <= cfg.return_tol && prop <= cfg.return_tol;
    c.passed = c.passed && ok;
    where["section"] = section;
    where["traced_error"] = json_double(traced);
    where["propagated_error"] = prop;
    c.detail.push_back(where);
  };
  CheckResult one{"one_singularity_returns", true, Json::array()};
  for (const auto& p : kOneParams) {
    GluedSurface s = build_T_theta_x(p.theta, x_point(p.x));
    run(one, s, "bottom", build_one_sing(p.theta, x_point(p.x)).E->inverse(),
        Json{{"theta", p.theta}, {"x", xjson(p.x)}});
  }
  add(out, std::move(one));
  CheckResult two{"two_singularity_returns", true, Json::array()};
  for (const auto& p : kTwoParams) {
    GluedSurface s = build_T_theta_xy(p.theta, x_point(p.x), p.y);
    TwoSingFamilyXY f = build_two_sing(p.theta, x_point(p.x), p.y);
    Json where{{"theta", p.theta}, {"x", xjson(p.x)}, {"y", p.y}};
    run(two, s, "bottom", f.E->inverse(), where);
    run(two, s, "left", f.F->inverse(), where);
  }
  add(out, std::move(two));
  return out;
}

SuiteResult suite_rotation(const RunConfig& cfg) {
  SuiteResult out{"rotation", true, {}};
  auto rows = rotation_sweep(1.0, sweep_grid(cfg.sweep_points), cfg.rotation(), cfg.workers);
  SweepSummary sum = summarize_sweep(rows);
  add(out, {"sweep_monotone", sum.monotone, sum.to_json()});
  add(out, {"zero_at_ends", sum.zero_at_ends, sum.to_json()});
  add(out, {"both_sides_of_half", sum.both_sides_of_half, sum.to_json()});
  add(out, {"degree_one", std::abs(sum.total - 1) < 1e-9, sum.to_json()});
  size_t half = 0;
  for (const auto& r : rows) half += r.rho.is_rational() && r.rho.p == 1 && r.rho.q == 2;
  add(out, {"plateau_at_half", half >= 2, Json{{"samples_at_half", half}}});
  return out;
}

SuiteResult suite_surgery(const RunConfig& cfg) {
  SuiteResult out{"surgery", true, {}};
  GluedSurface s = build_T_theta_x(1.0, x_point(2));
  AffineCircle c = closed_alpha_leaf_circle(s);
  CircleMap P = first_return(s, s.sections.at("bottom"));
  RotationOptions ro = cfg.rotation();
  add(out, {"dilation_factor", c.kind == AffineCircle::Kind::dilation && std::abs(c.mu - std::exp(1.0)) < 1e-9,
            Json{{"mu", c.mu}}});

  const int n = 200;
  std::vector<SurgeryResult> rs = parallel_map<SurgeryResult>(
      n + 1, cfg.workers, [&](size_t i) { return surgery_compose(P, c, static_cast<double>(i) / n, ro); });
  bool mono = true;
  for (int i = 1; i <= n; ++i)
    if (rs[i].rho_lift < rs[i - 1].rho_lift - 2 * (rs[i].rotation.error_bound + rs[i - 1].rotation.error_bound))
      mono = false;
  double span = rs[n].rho_lift - rs[0].rho_lift;
  add(out, {"loop_monotone", mono, Json{{"start", rs[0].rho_lift}, {"end", rs[n].rho_lift}}});
  add(out, {"loop_degree_one", std::abs(span - 1) < 1e-9, Json{{"span", span}}});

  CheckResult hits{"passes_one_over_q", true, Json::array()};
  for (long q = 2; q <= 8; ++q) {
    double target = 1.0 / q + std::ceil(rs[0].rho_lift - 1.0 / q);
    // bracket on the grid, then bisect u until the certificate shows up
    int i = 0;
    while (i < n && rs[i + 1].rho_lift < target) ++i;
    double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
    std::optional<SurgeryResult> found;
    for (const auto* r : {&rs[i], &rs[std::min(i + 1, n)]})
      if (r->rotation.is_rational() && std::abs(r->rho_lift - target) < 1e-12) found = *r;
    for (int k = 0; k < 60 && !found; ++k) {
      double mid = 0.5 * (lo + hi);
      SurgeryResult m = surgery_compose(P, c, mid, ro);
      if (m.rotation.is_rational() && std::abs(m.rho_lift - target) < 1e-12) found = m;
      else if (m.rho_lift < target) lo = mid;
      else hi = mid;
    }
    bool ok = found.has_value() && found->rotation.return_error <= ro.return_tol;
    hits.passed = hits.passed && ok;
    hits.detail.push_back(Json{{"q", q},
                               {"target", target},
                               {"u", found ? Json(found->parameter) : Json()},
                               {"return_error", found ? Json(found->rotation.return_error) : Json()}});
  }
  add(out, std::move(hits));
  return out;
}

}  // namespace

std::vector<SuiteResult> run_suite(const std::string& name, const RunConfig& cfg) {
  cfg.validate();
  std::vector<SuiteResult> out;
  for (const auto& n : suite_names()) {
    if (name != "all" && name != n) continue;
    if (n == "traces") out.push_back(suite_traces(cfg));
    else if (n == "gauss-bonnet") out.push_back(suite_gauss_bonnet(cfg));
    else if (n == "words") out.push_back(suite_words(cfg));
    else if (n == "cross-validation") out.push_back(suite_cross_validation(cfg));
    else if (n == "rotation") out.push_back(suite_rotation(cfg));
    else if (n == "surgery") out.push_back(suite_surgery(cfg));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidSpec, "unknown suite " + name);
  return out;
}

}  // namespace dstori
