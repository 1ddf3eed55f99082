#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dstori/hiet.h"
#include "dstori/io.h"

namespace dstori {

/// n + s with s in [0,1); keeps long orbits exact in the integer part.
struct LiftPoint {
  long long n = 0;
  double s = 0;
  double value() const { return static_cast<double>(n) + s; }
};

/// The lift F of a circle map with F(0) in [0,1], shifted by an integer.
class Lift {
 public:
  explicit Lift(const CircleMap& base, long long shift = 0) : base_(&base), shift_(shift) {}
  LiftPoint operator()(LiftPoint t) const;
  double operator()(double t) const;
  const CircleMap& base() const { return *base_; }
  long long shift() const { return shift_; }

 private:
  const CircleMap* base_;
  long long shift_;
};

struct TranslationEstimate {
  double value = 0;
  double error_bound = 0;
  double lo = 0, hi = 0;  // bracket [max p_n/n, min (p_n+1)/n]
  long iterations = 0;
};

/// Iterates F from 0. Throws BudgetExceeded (payload: best estimate) if the
/// bracket is still wider than 2 tol after `budget` steps.
TranslationEstimate translation_number(const Lift& F, long budget, double tol);

struct RotationOptions {
  long budget = 2'000'000;
  double tol = 1e-6;
  int q_max = 64;
  double return_tol = 1e-9;
};

struct RotationNumber {
  enum class Kind { rational, estimate } kind = Kind::estimate;
  long p = 0, q = 1;             // rational
  std::vector<double> orbit;     // certificate orbit, chart coordinates
  double return_error = 0;       // |F^q(s) - s - p| on the certificate orbit
  double value = 0;              // in [0,1)
  double error_bound = 0;        // 0 for certificates
  double lo = 0, hi = 0;         // translation bracket of the lift with F(0) in [0,1]
  long iterations = 0;

  bool is_rational() const { return kind == Kind::rational; }
  Json to_json() const;
};

/// Certificate first (q <= q_max), estimate otherwise.
RotationNumber rotation_number(const CircleMap& m, const RotationOptions& opt = {});

/// Periodic orbit of p/q through some point, found by sign changes of
/// F^q(s) - s - p; nullopt if none passes the combinatorial check.
std::optional<RotationNumber> certify_rational(const CircleMap& m, long p, long q,
                                               const std::vector<double>& hints,
                                               double return_tol = 1e-9);

std::optional<std::pair<long, long>> orbit_cyclic_order(const CircleMap& m, double s0, int q_max,
                                                        double return_tol = 1e-9);

/// Exact rank comparison with the rigid p/q orbit; throws DuplicatePoints.
bool cyclic_order_matches(const std::vector<double>& orbit, long p, long q);

/// R+[first + (u+n) second]. Rational u = p/q gives the primitive integer class
/// q first + (p + n q) second.
struct HomologyRay {
  std::string first_label, second_label;
  double first = 1, second = 0;  // real coefficients of the ray
  bool rational = false;
  long long first_int = 0, second_int = 0;
  double slope_error = 0;  // error bound on `second` for estimates
  Json to_json() const;
};

HomologyRay asymptotic_cycle(const RotationNumber& u, long n,
                             const std::pair<std::string, std::string>& basis_labels);

}  // namespace dstori
