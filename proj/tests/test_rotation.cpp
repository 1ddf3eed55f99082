#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dstori/errors.h"
#include "dstori/hiet.h"
#include "dstori/rotation.h"
#include "dstori/solve.h"
#include "support/oracles.h"

using namespace dstori;

namespace {

std::mt19937_64 rng(oracle::seed());

double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

CircleMap e_map(double theta, double x) { return to_circle_map(*build_one_sing(theta, x_point(x)).E); }

}  // namespace

TEST_CASE("translation number of rigid rotations") {
  for (double r : {0.1, 0.25, 0.6180339887, 0.9}) {
    CircleMap m = rigid_rotation(r);
    TranslationEstimate t = translation_number(Lift(m), 100000, 1e-6);
    CHECK(std::abs(t.value - r) <= t.error_bound + 1e-12);
    CHECK(t.lo <= r + 1e-12);
    CHECK(t.hi >= r - 1e-12);
  }
  CircleMap m = rigid_rotation(0.3);
  TranslationEstimate shifted = translation_number(Lift(m, 2), 100000, 1e-6);
  CHECK(std::abs(shifted.value - 2.3) <= shifted.error_bound + 1e-12);
}

TEST_CASE("budget exhaustion carries the estimate") {
  CircleMap m = rigid_rotation(0.6180339887);
  try {
    translation_number(Lift(m), 10, 1e-9);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
    CHECK(e.payload().contains("estimate"));
  }
}

TEST_CASE("rotation number examples") {
  for (double th : {0.5, 1.0, 2.0}) {
    RotationNumber r = rotation_number(e_map(th, INFINITY));
    CHECK(r.is_rational());
    CHECK(r.p % r.q == 0);
    RotationNumber one = rotation_number(e_map(th, 1.0));
    CHECK(one.is_rational());
    CHECK(one.p % one.q == 0);
  }
  RotationNumber half = rotation_number(e_map(1.0, 2.0));
  REQUIRE(half.is_rational());
  CHECK(half.p == 1);
  CHECK(half.q == 2);
  CHECK(half.return_error <= 1e-9);
  CHECK(half.error_bound == 0);
}

// independent fixed point search: sign change of E(s) - s inside a top piece
bool has_fixed_point(const Hiet& E, int per_piece = 4000) {
  const auto& ts = E.top_params();
  for (size_t k = 0; k + 1 < ts.size(); ++k) {
    double prev = 0;
    for (int i = 0; i <= per_piece; ++i) {
      double s = ts[k] + (ts[k + 1] - ts[k]) * (i + 0.5) / (per_piece + 1);
      double d = E.param(eval(E, E.point(s))) - s;
      if (i > 0 && (d > 0) != (prev > 0)) return true;
      prev = d;
    }
  }
  return false;
}

TEST_CASE("zero rotation number exactly when E_x has a fixed point") {
  int with_fixed = 0, without = 0;
  for (int i = 0; i < 40; ++i) {
    double th = uni(0.2, 3), x = 1 + std::exp(uni(-4, 4));
    OneSingFamilyX f = build_one_sing(th, x_point(x));
    RotationNumber r = rotation_number(to_circle_map(*f.E));
    bool zero = r.is_rational() && r.p % r.q == 0;
    bool fixed = has_fixed_point(*f.E);
    CHECK(zero == fixed);
    (fixed ? with_fixed : without)++;
  }
  CHECK(without > 0);
}

TEST_CASE("E_x has fixed points for x close to 1") {
  // E(1) = x > 1 while the gh branch tends to h_inf, which pulls (1, inf) toward 1
  for (double th : {0.5, 1.0, 2.0}) {
    double x = 1 + 1e-3;
    OneSingFamilyX f = build_one_sing(th, x_point(x));
    CHECK(eval(*f.E, ProjectivePoint::finite(1)).value() > 1);
    CHECK(has_fixed_point(*f.E));
    RotationNumber r = rotation_number(to_circle_map(*f.E));
    REQUIRE(r.is_rational());
    CHECK(r.p == 0);
  }
}

TEST_CASE("conjugacy invariance") {
  // the same exchange in a different chart of [1, inf] is a conjugate circle map
  for (int i = 0; i < 10; ++i) {
    double x = 1 + std::exp(uni(-3, 3));
    OneSingFamilyX f = build_one_sing(1.0, x_point(x));
    double c = uni(-0.9, 20);
    CircleMap a = to_circle_map(*f.E), b = to_circle_map(*f.E, MoebiusMap(1, -1, 1, c));
    RotationNumber ra = rotation_number(a), rb = rotation_number(b);
    CHECK(ra.is_rational() == rb.is_rational());
    CHECK(std::abs(ra.value - rb.value) <= ra.error_bound + rb.error_bound + 1e-9);
  }
}

TEST_CASE("Birkhoff oracle agrees with the estimator") {
  for (int i = 0; i < 10; ++i) {
    double th = uni(0.2, 3), x = 1 + std::exp(uni(-3, 3));
    CircleMap m = e_map(th, x);
    RotationNumber r = rotation_number(m);
    double b = oracle::birkhoff_rotation(m, 200000);
    double v = lift_value(r);
    double d = std::abs(b - v);
    CHECK(d <= r.error_bound + 1.0 / 200000 + 1e-9);
  }
}

TEST_CASE("orbit cyclic order on a rigid rotation") {
  CircleMap m = rigid_rotation(0.4);
  auto pq = orbit_cyclic_order(m, 0.05, 16);
  REQUIRE(pq.has_value());
  CHECK(pq->first == 2);
  CHECK(pq->second == 5);
  CHECK_FALSE(orbit_cyclic_order(rigid_rotation(0.6180339887), 0.05, 16).has_value());
}

TEST_CASE("cyclic order matching") {
  std::vector<double> orbit;
  for (int k = 0; k < 5; ++k) orbit.push_back(std::fmod(0.05 + 0.4 * k, 1.0));
  CHECK(cyclic_order_matches(orbit, 2, 5));
  CHECK_FALSE(cyclic_order_matches(orbit, 1, 5));
  std::vector<double> rev(orbit.rbegin(), orbit.rend());
  std::rotate(rev.begin(), rev.end() - 1, rev.end());
  CHECK(cyclic_order_matches(rev, 3, 5));
  CHECK_THROWS_AS(cyclic_order_matches({0.1, 0.1, 0.5}, 1, 3), Error);
}

TEST_CASE("certificates pass the combinatorial check") {
  for (double x : {1.6, 2.0, 2.5}) {
    CircleMap m = e_map(1.0, x);
    RotationNumber r = rotation_number(m);
    if (!r.is_rational()) continue;
    CHECK(r.orbit.size() == static_cast<size_t>(r.q));
    CHECK(cyclic_order_matches(r.orbit, r.p, r.q));
    for (size_t k = 0; k + 1 < r.orbit.size(); ++k)
      CHECK(std::abs(m.eval(r.orbit[k]) - r.orbit[k + 1]) <= 1e-9);
  }
}

TEST_CASE("asymptotic cycle") {
  RotationNumber u;
  u.kind = RotationNumber::Kind::rational;
  u.p = 2;
  u.q = 5;
  u.value = 0.4;
  HomologyRay h = asymptotic_cycle(u, 1, {"A", "B"});
  CHECK(h.rational);
  CHECK(h.first_int == 5);
  CHECK(h.second_int == 2 + 5);
  CHECK(h.first_label == "A");
  RotationNumber est;
  est.value = 0.3;
  est.error_bound = 1e-7;
  HomologyRay e = asymptotic_cycle(est, 0, {"A", "B"});
  CHECK_FALSE(e.rational);
  CHECK(e.second / e.first == doctest::Approx(0.3));
  CHECK(e.slope_error >= 1e-7);
}

TEST_CASE("lift values unwrap continuously along x") {
  // 1e4 samples: consecutive values never jump by more than the sampling can explain
  const int n = 10000;
  double prev = 0, worst_jump = 0;
  RotationOptions o;
  o.tol = 1e-4;
  for (int i = 0; i < n; i += 50) {
    double x = x_of_chart((i + 0.5) / n);
    RotationNumber r = rotation_number(e_map(1.0, x), o);
    double v = lift_value(r);
    v -= std::floor(v);
    if (i > 0) {
      v += std::round(prev - v);
      worst_jump = std::max(worst_jump, std::abs(v - prev));
    }
    prev = v;
  }
  CHECK(worst_jump < 0.25);
  for (int i = 0; i < n; ++i) {
    double s = (i + 0.5) / n;
    CircleMap m = rigid_rotation(0.37);
    double f = m.lift01(s);
    CHECK(std::abs(f - (s + 0.37)) <= 1e-12);
  }
}

TEST_CASE("rotation number is monotone in x") {
  // E_x = g^tau E_{x0} on the long branch: the family increases with x
  double prev = -1;
  for (int i = 1; i < 40; ++i) {
    double x = x_of_chart(i / 40.0);
    RotationNumber r = rotation_number(e_map(1.0, x));
    double v = lift_value(r);
    v -= std::floor(v);
    if (prev >= 0) v += std::round(prev - v);
    CHECK(v >= prev - r.error_bound - 1e-9);
    prev = v;
  }
}
