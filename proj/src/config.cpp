#include "dstori/config.h"

#include <fstream>
#include <sstream>

#include "dstori/errors.h"

namespace dstori {

void RunConfig::validate() const {
  auto pos = [](double v, const char* name) {
    if (!(v > 0)) throw Error(ErrorCode::InvalidSpec, std::string(name) + " must be > 0");
  };
  auto atleast1 = [](long v, const char* name) {
    if (v < 1) throw Error(ErrorCode::InvalidSpec, std::string(name) + " must be >= 1");
  };
  pos(rotation_tol, "rotation_tol");
  pos(return_tol, "return_tol");
  pos(geometry_tol, "geometry_tol");
  atleast1(iteration_budget, "iteration_budget");
  atleast1(q_max, "q_max");
  atleast1(bisection_depth, "bisection_depth");
  atleast1(grid, "grid");
  atleast1(sweep_points, "sweep_points");
  atleast1(workers, "workers");
}

Json RunConfig::to_json() const {
  return Json{{"rotation_tol", rotation_tol},   {"return_tol", return_tol},
              {"geometry_tol", geometry_tol},   {"iteration_budget", iteration_budget},
              {"q_max", q_max},                 {"bisection_depth", bisection_depth},
              {"grid", grid},                   {"sweep_points", sweep_points},
              {"workers", workers},             {"output_dir", output_dir},
              {"seed", seed}};
}

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "config must be a JSON object");
  RunConfig c;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "rotation_tol") c.rotation_tol = v.get<double>();
      else if (k == "return_tol") c.return_tol = v.get<double>();
      else if (k == "geometry_tol") c.geometry_tol = v.get<double>();
      else if (k == "iteration_budget") c.iteration_budget = v.get<long>();
      else if (k == "q_max") c.q_max = v.get<int>();
      else if (k == "bisection_depth") c.bisection_depth = v.get<int>();
      else if (k == "grid") c.grid = v.get<int>();
      else if (k == "sweep_points") c.sweep_points = v.get<int>();
      else if (k == "workers") c.workers = v.get<int>();
      else if (k == "output_dir") c.output_dir = v.get<std::string>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else throw Error(ErrorCode::InvalidSpec, "unknown config key " + k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidSpec, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("config is not JSON: ") + e.what());
  }
  return from_json(j);
}

RotationOptions RunConfig::rotation() const {
  RotationOptions o;
  o.budget = iteration_budget;
  o.tol = rotation_tol;
  o.q_max = q_max;
  o.return_tol = return_tol;
  return o;
}

SolveOptions RunConfig::solve() const {
  SolveOptions o;
  o.rotation = rotation();
  o.bisection_depth = bisection_depth;
  o.grid = grid;
  return o;
}

}  // namespace dstori
