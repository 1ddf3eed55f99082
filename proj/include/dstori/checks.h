#pragma once

#include <string>
#include <vector>

#include "dstori/config.h"
#include "dstori/glue.h"
#include "dstori/io.h"
#include "dstori/rotation.h"

namespace dstori {

struct CheckResult {
  std::string name;
  bool passed = false;
  Json detail;
};

struct SuiteResult {
  std::string suite;
  bool passed = true;
  std::vector<CheckResult> checks;
  Json to_json() const;
};

/// traces, gauss-bonnet, words, cross-validation, rotation, surgery.
const std::vector<std::string>& suite_names();
/// "all" runs every suite. Throws InvalidSpec for an unknown name.
std::vector<SuiteResult> run_suite(const std::string& name, const RunConfig& cfg);

/// x = x_of_chart(i / (n-1)): 1 and inf at the ends.
std::vector<double> sweep_grid(int n);

struct SweepRow {
  double x = 0;
  RotationNumber rho;  // of E_x, read off the traced return map of the bottom section
  double lift = 0;     // unwrapped along the sweep, starts at 0
};

/// Rows keep input order. Unwrapping picks the integer closest to the previous row.
std::vector<SweepRow> rotation_sweep(double theta, const std::vector<double>& xs,
                                     const RotationOptions& opt, int workers);

/// E_x as the inverse of the traced return map of T_{theta,x}.
CircleMap traced_e_map(double theta, double x);

struct SweepSummary {
  bool monotone = true;
  double worst_drop = 0;  // largest decrease beyond 2x the bounds
  bool zero_at_ends = false;
  bool both_sides_of_half = false;
  double total = 0;  // lift(last) - lift(first)
  Json to_json() const;
};
SweepSummary summarize_sweep(const std::vector<SweepRow>& rows);

/// Largest chordal error between the first return traced leaf by leaf from
/// n section points and the algebraic map `expected` on the same interval.
double traced_return_error(const GluedSurface& s, const Section& sec, const Hiet& expected,
                           int n = 100);

}  // namespace dstori
