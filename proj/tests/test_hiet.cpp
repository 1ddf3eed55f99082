#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dstori/desitter.h"
#include "dstori/errors.h"
#include "dstori/hiet.h"
#include "dstori/rotation.h"
#include "dstori/solve.h"
#include "support/oracles.h"

using namespace dstori;

namespace {

std::mt19937_64 rng(oracle::seed());

double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

ProjectivePoint P(double t) { return ProjectivePoint::finite(t); }
const ProjectivePoint kInf = ProjectivePoint::infinity();

bool near(const ProjectivePoint& a, const ProjectivePoint& b, double tol = 1e-10) { return chordal(a, b) <= tol; }

}  // namespace

TEST_CASE("one-singularity family at theta = ln 2, x = 2") {
  OneSingFamilyX f = build_one_sing(std::log(2.0), 2.0);
  CHECK(f.x_prime.value() == doctest::Approx(2).epsilon(1e-14));
  REQUIRE(f.E->size() == 2);
  CHECK(near(f.E->top_breaks()[0], f.E->bottom_breaks()[0]));
}

TEST_CASE("one-singularity family at x = inf") {
  OneSingFamilyX f = build_one_sing(1.0, kInf);
  CHECK(near(f.x_prime, P(1)));
  CHECK(f.E->size() == 1);
  CHECK(near(eval(*f.E, P(1)), P(1)));
  CircleMap m = to_circle_map(*f.E);
  CHECK(std::abs(m.eval(0)) < 1e-12);
}

TEST_CASE("branch endpoints of h_x") {
  for (double th : {0.5, 1.0, 2.0})
    for (double x : {1.5, 3.0, 10.0}) {
      OneSingFamilyX f = build_one_sing(th, x);
      CHECK(near(apply(f.h, f.x_prime), P(1)));
      CHECK(near(apply(f.h, kInf), P(x)));
      CHECK(near(apply(f.h, P(0)), P(y_theta(th))));
      CHECK(near(apply(f.gh, P(1)), P(x), 1e-9));
    }
  CHECK_THROWS_AS(build_one_sing(1.0, 0.5), Error);
  CHECK_THROWS_AS(build_one_sing(-1.0, 2.0), Error);
}

TEST_CASE("two-singularity family") {
  for (double th : {0.5, 1.0, 2.0})
    for (double x : {1.2, 2.0, 5.0})
      for (double b : {0.2, 0.6, 0.95}) {
        double lo = std::max(0.0, 1 - std::exp(-th) * x);
        double y = lo + b * (y_theta(th) - lo);
        TwoSingFamilyXY f = build_two_sing(th, x, y);
        double e = std::exp(th);
        double yp = (x + e * x * (y - 1)) / (1 + e * x * (y - 1) + y * (x - 1));
        CHECK(f.y_prime.value() == doctest::Approx(yp).epsilon(1e-10));
        double xp = f.x_prime.is_infinite() ? INFINITY : f.x_prime.value();
        CHECK((std::isinf(xp) || xp >= 1 - 1e-12));
        CHECK(f.y_prime.value() >= -1e-12);
        CHECK(f.y_prime.value() < f.y_plus);
        CHECK(near(apply(f.g1, P(1)), P(x), 1e-9));
        CHECK(near(apply(f.g1, P(0)), P(y), 1e-9));
        CHECK(near(apply(f.g1, f.y_prime), P(f.y_plus), 1e-9));
        CHECK(near(apply(f.g2, P(1)), kInf, 1e-9));
        CHECK(near(apply(f.g2, f.y_prime), P(0), 1e-9));
        CHECK(near(apply(f.g2, P(f.y_plus)), P(y), 1e-9));
      }
}

TEST_CASE("two-singularity family edges") {
  double th = 1.0;
  TwoSingFamilyXY top = build_two_sing(th, 3.0, y_theta(th));
  CHECK(std::abs(top.y_prime.value()) < 1e-12);
  CHECK(top.F->size() == 1);
  CHECK(max_entry_diff(top.F->branches()[0], top.g2) < 1e-12);
  TwoSingFamilyXY right = build_two_sing(th, kInf, 0.4);
  CHECK(near(right.x_prime, P(1)));
  CHECK(right.E->size() == 1);
  CHECK(max_entry_diff(right.E->branches()[0], right.h2) < 1e-12);
  CHECK_THROWS_AS(build_two_sing(th, 1.1, 0.01), Error);
  try {
    build_two_sing(th, 3.0, 0.0);
    FAIL("expected BoundaryCase");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryCase);
  }
}

TEST_CASE("boundary inverse") {
  double th = 1.0, e = std::exp(th);
  CircleMap b = build_boundary_inverse(th, P(e));
  CHECK_FALSE(b.homeomorphism());
  bool has_const = false;
  for (const auto& pc : b.pieces()) has_const |= pc.constant;
  CHECK(has_const);
  // the constant branch lands on inf, the glued point at chart 0
  for (const auto& pc : b.pieces())
    if (pc.constant) CHECK(pc.b0 == 0);
  // pointwise limit from the interior along y -> 0+, linear in y
  for (double y : {1e-3, 1e-4, 1e-5}) {
    TwoSingFamilyXY f = build_two_sing(th, e, y);
    CircleMap in = to_circle_map(f.E->inverse(), b.chart());
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      double s = (i + 0.5) / 20;
      double d = std::abs(in.eval(s) - b.eval(s));
      worst = std::max(worst, std::min(d, 1 - d));
    }
    CHECK(worst <= 2 * y);
  }
  CHECK(rotation_number(b).is_rational());
  CHECK(rotation_number(b).p == 0);
  CircleMap at_inf = build_boundary_inverse(th, kInf);
  CHECK(rotation_number(at_inf).p == 0);
  CHECK_THROWS_AS(build_boundary_inverse(th, P(0.5)), Error);
}

TEST_CASE("eval conventions and inverse law") {
  OneSingFamilyX f = build_one_sing(1.0, 3.0);
  const Hiet& E = *f.E;
  // at the top break the right-hand branch (h) applies
  CHECK(near(eval(E, f.x_prime), apply(f.h, f.x_prime)));
  CHECK(near(eval(E, f.x_prime), P(1)));
  for (int i = 0; i < 1000; ++i) {
    ProjectivePoint p = E.point(uni(0, 1));
    CHECK(chordal(eval_inverse(E, eval(E, p)), p) <= 1e-10);
  }
  CHECK(near(iterate(E, iterate(E, P(1.7), 5), -5), P(1.7), 1e-9));
  CHECK_THROWS_AS(eval(E, P(0.5)), Error);
}

TEST_CASE("coding matches the word evaluation") {
  for (double x : {1.3, 2.0, 4.0}) {
    OneSingFamilyX f = build_one_sing(1.0, x);
    std::string w = coding(*f.E, P(1), 8);
    for (size_t k = 1; k <= w.size(); ++k) {
      ProjectivePoint viaword = apply(word_map(w.substr(0, k), f.gh, f.h), P(1));
      CHECK(near(viaword, iterate(*f.E, P(1), static_cast<long>(k)), 1e-9));
    }
  }
  OneSingFamilyX inf = build_one_sing(1.0, kInf);
  std::string w = coding(*inf.E, P(1), 6);
  CHECK(w == std::string(6, w[0]));
}

TEST_CASE("periodic orbits code by the rotation word") {
  // 1/3 at theta = 1: realize returns the left end of the plateau
  RealizeReport r = realize_rational(1.0, 1, 3);
  std::string want = rotation_word(1, 3);
  for (double dx : {0.0, 1e-4}) {
    OneSingFamilyX f = build_one_sing(1.0, r.x + dx);
    CircleMap m = to_circle_map(*f.E);
    RotationNumber rn = rotation_number(m);
    REQUIRE(rn.is_rational());
    CHECK(rn.q == 3);
    std::string c = coding(*f.E, m.point(rn.orbit[0]), 6);
    CHECK(c.substr(0, 3) == c.substr(3, 3));
    CHECK((want + want).find(c.substr(0, 3)) != std::string::npos);
  }
}

TEST_CASE("circle map charts") {
  OneSingFamilyX f = build_one_sing(1.0, 2.5);
  CircleMap m = to_circle_map(*f.E);
  CHECK(std::abs(m.param(P(1))) < 1e-12);
  CHECK(near(m.point(1 - 1e-12), kInf, 1e-9));
  // another chart of [1, inf]: t -> (t - 1) / (t + c) still sends 1 -> 0 and inf -> 1
  for (double c : {0.0, 2.0, 10.0}) {
    MoebiusMap ch(1, -1, 1, c);
    CircleMap m2 = to_circle_map(*f.E, ch);
    CHECK(std::abs(m2.param(P(1))) < 1e-12);
    RotationNumber a = rotation_number(m), b = rotation_number(m2);
    CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound + 1e-9);
    CHECK(a.is_rational() == b.is_rational());
  }
}

TEST_CASE("top pieces map onto bottom pieces") {
  for (int i = 0; i < 30; ++i) {
    double th = uni(0.1, 3), x = 1 + uni(0.01, 20);
    OneSingFamilyX f = build_one_sing(th, x);
    const Hiet& E = *f.E;
    std::vector<ProjectivePoint> top{E.left()}, bot{E.left()};
    for (const auto& t : E.top_breaks()) top.push_back(t);
    for (const auto& t : E.bottom_breaks()) bot.push_back(t);
    top.push_back(E.right());
    bot.push_back(E.right());
    for (size_t k = 0; k < E.size(); ++k) {
      size_t j = static_cast<size_t>(E.perm()[k]);
      CHECK(near(apply(E.branches()[k], top[k]), bot[j], 1e-9));
      CHECK(near(apply(E.branches()[k], top[k + 1]), bot[j + 1], 1e-9));
      // orientation preserving inside the piece
      double s0 = E.top_params()[k], s1 = E.top_params()[k + 1];
      double prev = -1;
      for (int q = 1; q < 20; ++q) {
        double v = E.param(eval(E, E.point(s0 + (s1 - s0) * q / 20)));
        CHECK(v > prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("monotone family law") {
  for (double th : {0.5, 1.0, 2.0}) {
    MoebiusMap g = family_g(th);
    double x1 = 1.5, x2 = 4.0;
    MoebiusMap h1 = family_h(th, P(x1)), h2 = family_h(th, P(x2));
    // tau from the flow: g^tau(x1) = x2, solved by bisection on the hyperbolic power
    double lo = 0, hi = 1;
    for (int k = 0; k < 200; ++k) {
      double mid = 0.5 * (lo + hi);
      double v = apply(hyperbolic_power(g, mid), P(x1)).value();
      (v < x2 && v >= 1 ? lo : hi) = mid;
    }
    MoebiusMap gt = hyperbolic_power(g, 0.5 * (lo + hi));
    CHECK(max_entry_diff(compose(gt, h1), h2) < 1e-9);
    CHECK(std::abs(trace_commutator(g, h1) - trace_commutator(g, h2)) < 1e-9);
  }
}

TEST_CASE("continuity at x = 1") {
  for (double th : {0.5, 1.0, 2.0}) {
    MoebiusMap g = family_g(th);
    MoebiusMap lim = compose(inverse(g), family_h(th, kInf));
    CHECK(max_entry_diff(family_h(th, P(1)), lim) < 1e-12);
    CHECK(max_entry_diff(family_h(th, P(1 + 1e-9)), lim) < 1e-7);
  }
}

TEST_CASE("json round trip") {
  OneSingFamilyX f = build_one_sing(1.0, 2.5);
  Json j = f.E->to_json();
  for (const char* k : {"interval", "top_breaks", "bottom_breaks", "branches", "perm"}) CHECK(j.contains(k));
  Hiet back = Hiet::from_json(Json::parse(dump_json(j)));
  for (int i = 0; i < 50; ++i) {
    ProjectivePoint p = f.E->point(uni(0, 1));
    CHECK(chordal(eval(back, p), eval(*f.E, p)) < 1e-14);
  }
  CHECK_THROWS_AS(Hiet::from_json(Json{{"interval", 1}}), Error);
}

TEST_CASE("invalid hiets are rejected") {
  MoebiusMap g = family_g(1.0);
  CHECK_THROWS_AS(Hiet(P(1), kInf, {}, {}, {g}, {0}), Error);
}
