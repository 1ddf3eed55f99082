#pragma once

#include <cstdint>
#include <string>

#include "dstori/io.h"
#include "dstori/rotation.h"
#include "dstori/solve.h"

namespace dstori {

struct RunConfig {
  double rotation_tol = 1e-6;
  double return_tol = 1e-9;
  double geometry_tol = 1e-9;
  long iteration_budget = 2'000'000;
  int q_max = 64;
  int bisection_depth = 200;
  int grid = 24;
  int sweep_points = 200;
  int workers = 4;
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  /// Throws InvalidSpec: tolerances must be > 0 and budgets >= 1.
  void validate() const;
  Json to_json() const;
  /// Unknown keys are rejected; missing keys keep their defaults.
  static RunConfig from_json(const Json& j);
  static RunConfig load(const std::string& path);

  RotationOptions rotation() const;
  SolveOptions solve() const;
};

}  // namespace dstori
