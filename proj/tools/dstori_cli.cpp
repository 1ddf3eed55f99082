#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dstori/checks.h"
#include "dstori/config.h"
#include "dstori/errors.h"
#include "dstori/glue.h"
#include "dstori/parallel.h"
#include "dstori/solve.h"

using namespace dstori;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_path;
  std::string output_dir;
  long long seed = -1;
  int workers = 0;
};

RunConfig resolve(const Globals& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : RunConfig::load(g.config_path);
  if (const char* env = std::getenv("DSTORI_OUTPUT_DIR"); env && *env) c.output_dir = env;
  if (!g.output_dir.empty()) c.output_dir = g.output_dir;
  if (g.seed >= 0) c.seed = static_cast<std::uint64_t>(g.seed);
  if (g.workers > 0) c.workers = g.workers;
  c.validate();
  return c;
}

double parse_x(const std::string& s) {
  if (s == "inf" || s == "infinity") return INFINITY;
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidSpec, "not a number: " + s);
  }
}

// writes only after everything has been computed, so failures leave no files
void write_file(const RunConfig& c, const std::string& name, const std::string& body) {
  fs::create_directories(c.output_dir);
  std::ofstream out(fs::path(c.output_dir) / name, std::ios::binary);
  out << body;
  if (!out) throw std::runtime_error("cannot write " + (fs::path(c.output_dir) / name).string());
}

void emit(const RunConfig& c, const std::string& name, const Json& j) {
  std::string text = dump_json(j) + "\n";
  write_file(c, name, text);
  std::cout << text;
}

struct SurfaceArgs {
  double theta = 1;
  std::string x = "2";
  std::string y;  // empty: one-singularity family
};

void add_surface_opts(CLI::App* app, SurfaceArgs& a) {
  app->add_option("--theta", a.theta, "cone angle theta > 0");
  app->add_option("--x", a.x, "x in [1, inf], 'inf' allowed");
  app->add_option("--y", a.y, "y for the two-singularity family");
}

GluedSurface build_from(const SurfaceArgs& a) {
  double x = parse_x(a.x);
  if (a.y.empty()) return build_T_theta_x(a.theta, x_point(x));
  return build_T_theta_xy(a.theta, x_point(x), parse_x(a.y));
}

Json surface_params(const SurfaceArgs& a) {
  Json j{{"theta", a.theta}, {"x", json_double(parse_x(a.x))}};
  if (!a.y.empty()) j["y"] = parse_x(a.y);
  return j;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s + "\n";
}

std::string f17(double v) { return fmt_double(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular de Sitter tori: gluing, lightlike dynamics, rotation numbers"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "flat JSON run config");
  app.add_option("--output-dir", g.output_dir, "artifact directory (overrides DSTORI_OUTPUT_DIR)");
  app.add_option("--seed", g.seed, "seed for randomized suites");
  app.add_option("--workers", g.workers, "worker threads for sweeps");

  // build
  auto* build = app.add_subcommand("build", "build a surface and report orbits, angles, area");
  std::string build_kind, spec_path;
  SurfaceArgs bargs;
  build->add_option("kind", build_kind, "rect-torus | l-torus | custom")
      ->required()
      ->check(CLI::IsMember({"rect-torus", "l-torus", "custom"}));
  add_surface_opts(build, bargs);
  build->add_option("--spec", spec_path, "polygon spec JSON (custom)");

  // rotation
  auto* rot = app.add_subcommand("rotation", "rotation number of a first-return map");
  SurfaceArgs rargs;
  std::string section = "bottom";
  int sweep_n = 0;
  add_surface_opts(rot, rargs);
  rot->add_option("--section", section, "bottom (beta flow) | left (alpha flow)")
      ->check(CLI::IsMember({"bottom", "left"}));
  rot->add_option("--sweep", sweep_n, "sweep rho(E_x) over this many x-values instead");

  // realize
  auto* real = app.add_subcommand("realize", "solve for parameters with prescribed rotation numbers");
  std::string real_kind;
  double rtheta = 1, rho = 0.5, rho_a = 0.3, rho_b = 0.7, rtol = 1e-6;
  long rp = 1, rq = 2;
  real->add_option("kind", real_kind, "irrational | rational | pair")
      ->required()
      ->check(CLI::IsMember({"irrational", "rational", "pair"}));
  real->add_option("--theta", rtheta);
  real->add_option("--rho", rho, "target (irrational)");
  real->add_option("--p", rp);
  real->add_option("--q", rq);
  real->add_option("--rho-alpha", rho_a);
  real->add_option("--rho-beta", rho_b);
  real->add_option("--tol", rtol);

  // trace
  auto* tr = app.add_subcommand("trace", "trace a lightlike leaf, write CSV and SVG");
  SurfaceArgs targs;
  std::string start_x, start_y, leaf = "beta", tname = "trace";
  int jumps = 100;
  bool pass_through = false;
  add_surface_opts(tr, targs);
  tr->add_option("--start-x", start_x)->required();
  tr->add_option("--start-y", start_y)->required();
  tr->add_option("--kind", leaf)->check(CLI::IsMember({"alpha", "beta"}));
  tr->add_option("--jumps", jumps);
  tr->add_flag("--pass-through", pass_through, "continue through corners");
  tr->add_option("--name", tname, "file stem");

  // surgery
  auto* surg = app.add_subcommand("surgery", "rotation number of P o T_u along the closed alpha-leaf");
  SurfaceArgs sargs;
  int steps = 200;
  add_surface_opts(surg, sargs);
  surg->add_option("--steps", steps);

  // check
  auto* chk = app.add_subcommand("check", "run an invariant suite");
  std::string suite;
  chk->add_option("suite", suite, "traces | gauss-bonnet | words | cross-validation | rotation | surgery | all")
      ->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "parameter sweeps on the worker pool");
  std::string sweep_kind;
  double stheta = 1;
  int sgrid = 10;
  sw->add_option("kind", sweep_kind, "rotation | two-sing")
      ->required()
      ->check(CLI::IsMember({"rotation", "two-sing"}));
  sw->add_option("--theta", stheta);
  sw->add_option("--grid", sgrid, "points per axis (two-sing)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = resolve(g);

    if (build->parsed()) {
      GluedSurface s = [&] {
        if (build_kind == "custom") {
          if (spec_path.empty()) throw Error(ErrorCode::InvalidSpec, "custom needs --spec");
          std::ifstream in(spec_path);
          if (!in) throw Error(ErrorCode::InvalidSpec, "cannot read " + spec_path);
          std::stringstream ss;
          ss << in.rdbuf();
          Json j;
          try {
            j = Json::parse(ss.str());
          } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidSpec, std::string("spec is not JSON: ") + e.what());
          }
          return build_surface(PolygonSpec::from_json(j));
        }
        if (build_kind == "l-torus" && bargs.y.empty()) throw Error(ErrorCode::InvalidSpec, "l-torus needs --y");
        if (build_kind == "rect-torus") bargs.y.clear();
        return build_from(bargs);
      }();
      Json rep = s.report();
      rep["kind"] = build_kind;
      if (build_kind != "custom") {
        rep["params"] = surface_params(bargs);
        if (build_kind == "l-torus")
          rep["in_domain"] = in_domain(bargs.theta, x_point(parse_x(bargs.x)), parse_x(bargs.y));
      }
      emit(cfg, "build_" + build_kind + ".json", rep);
      return 0;
    }

    if (rot->parsed()) {
      if (sweep_n > 0) {
        auto rows = rotation_sweep(rargs.theta, sweep_grid(sweep_n), cfg.rotation(), cfg.workers);
        std::string csv = "x,rho,bound,certified,lift\n";
        for (const auto& r : rows)
          csv += csv_row({f17(r.x), f17(r.rho.value), f17(r.rho.error_bound),
                          r.rho.is_rational() ? "1" : "0", f17(r.lift)});
        write_file(cfg, "rotation_sweep.csv", csv);
        Json j = summarize_sweep(rows).to_json();
        j["theta"] = rargs.theta;
        j["points"] = rows.size();
        emit(cfg, "rotation_sweep.json", j);
        return 0;
      }
      GluedSurface s = build_from(rargs);
      auto it = s.sections.find(section);
      if (it == s.sections.end()) throw Error(ErrorCode::InvalidSpec, "no section " + section);
      Hiet ret = first_return_hiet(s, it->second);
      Json j{{"params", surface_params(rargs)},
             {"section", section},
             {"first_return", ret.to_json()},
             {"rotation", rotation_number(to_circle_map(ret), cfg.rotation()).to_json()},
             {"rotation_inverse", rotation_number(to_circle_map(ret.inverse()), cfg.rotation()).to_json()}};
      emit(cfg, "rotation_" + section + ".json", j);
      return 0;
    }

    if (real->parsed()) {
      SolveOptions so = cfg.solve();
      RealizeReport r;
      if (real_kind == "irrational") r = realize_irrational(rtheta, rho, rtol, so);
      else if (real_kind == "rational") r = realize_rational(rtheta, rp, rq, so);
      else r = realize_pair(rtheta, rho_a, rho_b, rtol, so);
      emit(cfg, "realize_" + real_kind + ".json", r.to_json());
      return 0;
    }

    if (tr->parsed()) {
      GluedSurface s = build_from(targs);
      TraceOptions o;
      o.max_jumps = jumps;
      o.corner_policy = pass_through ? CornerPolicy::pass_through : CornerPolicy::stop;
      DSPoint start(x_point(parse_x(start_x)), x_point(parse_x(start_y)));
      LeafTrace t = trace_leaf(s, start, leaf_kind_from_string(leaf), o);
      std::string csv = t.csv(), pic = svg(s, {t});
      write_file(cfg, tname + ".csv", csv);
      write_file(cfg, tname + ".svg", pic);
      Json j{{"params", surface_params(targs)},
             {"kind", leaf},
             {"segments", t.segments.size()},
             {"jumps", t.jumps.size()},
             {"closed", t.closed},
             {"corner_hit", t.corner_hit},
             {"crossing_counts", t.crossing_counts}};
      emit(cfg, tname + ".json", j);
      return 0;
    }

    if (surg->parsed()) {
      if (!sargs.y.empty()) throw Error(ErrorCode::InvalidSpec, "surgery runs on the one-singularity family");
      GluedSurface s = build_from(sargs);
      AffineCircle c = closed_alpha_leaf_circle(s);
      CircleMap P = first_return(s, s.sections.at("bottom"));
      if (steps < 1) throw Error(ErrorCode::InvalidSpec, "steps must be >= 1");
      auto rs = parallel_map<SurgeryResult>(static_cast<size_t>(steps) + 1, cfg.workers, [&](size_t i) {
        return surgery_compose(P, c, static_cast<double>(i) / steps, cfg.rotation());
      });
      std::string csv = "u,rho_lift,rho,bound,certified\n";
      for (const auto& r : rs)
        csv += csv_row({f17(r.parameter), f17(r.rho_lift), f17(r.rotation.value),
                        f17(r.rotation.error_bound), r.rotation.is_rational() ? "1" : "0"});
      write_file(cfg, "surgery.csv", csv);
      emit(cfg, "surgery.json",
           Json{{"params", surface_params(sargs)}, {"circle", c.to_json()}, {"steps", steps},
                {"rho_start", rs.front().rho_lift}, {"rho_end", rs.back().rho_lift}});
      return 0;
    }

    if (chk->parsed()) {
      auto res = run_suite(suite, cfg);
      Json j = Json::array();
      bool ok = true;
      for (const auto& r : res) {
        j.push_back(r.to_json());
        ok = ok && r.passed;
      }
      emit(cfg, "check_" + suite + ".json", Json{{"passed", ok}, {"seed", cfg.seed}, {"suites", j}});
      for (const auto& r : res) std::cerr << r.suite << ": " << (r.passed ? "pass" : "FAIL") << "\n";
      return ok ? 0 : 1;
    }

    if (sw->parsed()) {
      if (sweep_kind == "rotation") {
        auto rows = rotation_sweep(stheta, sweep_grid(cfg.sweep_points), cfg.rotation(), cfg.workers);
        std::string csv = "x,rho,bound,certified,lift\n";
        for (const auto& r : rows)
          csv += csv_row({f17(r.x), f17(r.rho.value), f17(r.rho.error_bound),
                          r.rho.is_rational() ? "1" : "0", f17(r.lift)});
        write_file(cfg, "sweep_rotation.csv", csv);
        emit(cfg, "sweep_rotation.json", summarize_sweep(rows).to_json());
        return 0;
      }
      if (sgrid < 1) throw Error(ErrorCode::InvalidSpec, "grid must be >= 1");
      size_t n = static_cast<size_t>(sgrid) * static_cast<size_t>(sgrid);
      struct Row {
        double x, y, area, residual, rho_alpha, rho_beta;
      };
      auto rows = parallel_map<Row>(n, cfg.workers, [&](size_t k) {
        double a = (k / sgrid + 0.5) / sgrid, b = (k % sgrid + 1.0) / sgrid;
        double x = x_of_chart(a);
        double lo = std::max(0.0, 1 - std::exp(-stheta) * x);
        double y = lo + b * (y_theta(stheta) - lo);
        GluedSurface s = build_T_theta_xy(stheta, x_point(x), y);
        TwoSingFamilyXY f = build_two_sing(stheta, x_point(x), y);
        RotationNumber ra = rotation_number(to_circle_map(*f.F), cfg.rotation());
        RotationNumber rb = rotation_number(to_circle_map(f.E->inverse()), cfg.rotation());
        return Row{x, y, s.area, gauss_bonnet_check(s), ra.value, rb.value};
      });
      std::string csv = "x,y,area,gb_residual,rho_alpha,rho_beta\n";
      double worst = 0;
      for (const auto& r : rows) {
        csv += csv_row({f17(r.x), f17(r.y), f17(r.area), f17(r.residual), f17(r.rho_alpha), f17(r.rho_beta)});
        worst = std::max(worst, r.residual);
      }
      write_file(cfg, "sweep_two_sing.csv", csv);
      emit(cfg, "sweep_two_sing.json", Json{{"theta", stheta}, {"points", n}, {"worst_gb_residual", worst}});
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    if (!e.payload().is_null()) std::cerr << dump_json(e.payload()) << "\n";
    if (e.code() == ErrorCode::BudgetExceeded) return 3;
    return e.is_validation() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
