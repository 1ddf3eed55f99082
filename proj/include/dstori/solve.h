#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dstori/glue.h"
#include "dstori/hiet.h"
#include "dstori/io.h"
#include "dstori/rotation.h"

namespace dstori {

/// Section circle with its affine structure. For a dilation circle the
/// generator acts as v -> mu v in a coordinate v centred at its fixed point.
struct AffineCircle {
  enum class Kind { translation, dilation } kind = Kind::translation;
  double mu = 1;                  // dilation only, > 1
  MoebiusMap generator;           // dilation only: sends left to right
  ProjectivePoint left, right;    // the fundamental interval [left, right)
  Json to_json() const;
};

/// Affine circle of the closed alpha-leaf y = 0 of T_{theta,x}; mu is read off
/// the translation length of the leaf holonomy.
AffineCircle closed_alpha_leaf_circle(const GluedSurface& s);

/// Automorphism T_u of the circle as a two-branch exchange of [left, right).
Hiet circle_automorphism(const AffineCircle& c, double u);

struct SurgeryResult {
  CircleMap map;
  RotationNumber rotation;
  double parameter = 0;
  double rho_lift = 0;  // continuous in the parameter, rho_lift(1) = rho_lift(0) + 1
  Json to_json() const;
};

/// P o T_u. Throws IncompatibleCircle if P does not live on the circle's interval.
SurgeryResult surgery_compose(const CircleMap& p, const AffineCircle& c, double u,
                              const RotationOptions& opt = {});

/// Integer-lift value of a rotation result: p/q or the bracket midpoint, for
/// the lift with F(0) in [0,1].
double lift_value(const RotationNumber& r);

/// Branch coding of the rigid orbit of 0 under x -> x + p/q, boundary at 1 - p/q.
std::string rotation_word(long p, long q);

/// l_n ... l_1 with l_1 applied first; 'a' -> a, 'b' -> b.
MoebiusMap word_map(const std::string& w, const MoebiusMap& a, const MoebiusMap& b);

struct RealizeReport {
  std::string kind;
  double theta = 0;
  double x = 0;       // +inf allowed
  double y = 0;       // pair only
  double target = 0, target_beta = 0;
  double measured = 0, measured_beta = 0;
  double error_bound = 0;
  double residual = 0, residual_beta = 0;
  long p = 0, q = 1;
  std::string word, coding;
  std::vector<double> orbit;
  double return_error = 0;
  double word_residual = 0;
  bool cyclic_order_ok = false;
  bool plateau_warning = false;
  long iterations = 0;
  Json to_json() const;
};

struct SolveOptions {
  RotationOptions rotation;
  int bisection_depth = 200;
  double x_width = 1e-12;  // plateau stop, in the chart of [1, inf]
  int grid = 24;
  long pair_budget = 4000;  // evaluations for realize_pair
};

/// x in [1, inf] <-> s in [0, 1] through the chart of the arc [1, inf].
/// +inf maps to the point at infinity.
ProjectivePoint x_point(double x);
double x_of_chart(double s);
double chart_of_x(double x);

RealizeReport realize_rational(double theta, long p, long q, const SolveOptions& opt = {});
RealizeReport realize_irrational(double theta, double target, double tol,
                                 const SolveOptions& opt = {});
/// rho(F_{x,y}) ~ rho_alpha and rho(E^-1_{x,y}) ~ rho_beta. BudgetExceeded
/// carries the best point found.
RealizeReport realize_pair(double theta, double rho_alpha, double rho_beta, double tol,
                           const SolveOptions& opt = {});

struct WordScanReport {
  std::string word;
  double theta = 0, x_base = 0, s_max = 0;
  size_t grid_points = 0;
  bool strictly_increasing = true;
  bool in_range = true;
  std::vector<Json> violations;
  std::vector<Json> range_exits;
  Json to_json() const;
};

/// s -> w_k(g^{s+1} h, g^s h)(1) over the grid for every prefix w_k, h = h_{x_base}.
/// Grid points beyond the window where g^s h is still a family member are dropped.
WordScanReport monotone_word_scan(double theta, double x_base, const std::string& word,
                                  const std::vector<double>& s_grid);

struct RigidityReport {
  bool unique = false;
  long p = 0, q = 1;
  std::vector<double> roots_s;  // crossings whose orbit coding is the word
  std::vector<double> roots_x;
  size_t crossings = 0;
  Json to_json() const;
};

RigidityReport rigidity_uniqueness_check(double theta, long p, long q, int grid = 2000);

}  // namespace dstori
