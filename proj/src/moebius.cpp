#include "dstori/moebius.h"

#include <cmath>
#include <cstdio>
#include <limits>

#include "dstori/errors.h"

namespace dstori {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Scale so that a^2+b^2 = 1 unless already within a few ulps, which keeps
// normalization idempotent bit for bit.
void normalize_pair(double& a, double& b) {
  double r = std::hypot(a, b);
  if (std::abs(r - 1.0) > 4 * kEps) {
    a /= r;
    b /= r;
  }
  if (b < 0 || (b == 0 && a < 0)) {
    a = -a;
    b = -b;
  }
  if (a == 0) a = 0.0;  // drop the sign of zero
  if (b == 0) b = 0.0;
}

}  // namespace

ProjectivePoint::ProjectivePoint(double a_, double b_) : a(a_), b(b_) {
  if (!(std::isfinite(a) && std::isfinite(b)) || (a == 0 && b == 0))
    throw Error(ErrorCode::DomainError, "projective point needs finite (a,b) != (0,0)");
  normalize_pair(a, b);
}

ProjectivePoint ProjectivePoint::finite(double t) {
  if (std::isinf(t)) return infinity();
  return ProjectivePoint(t, 1.0);
}

ProjectivePoint ProjectivePoint::infinity() { return ProjectivePoint(1.0, 0.0); }

double ProjectivePoint::value() const {
  if (b == 0) return std::numeric_limits<double>::infinity();
  return a / b;
}

double ProjectivePoint::circle_param() const {
  if (b == 0) return 0.0;
  double psi = std::atan2(b, a);  // in (0, pi)
  double s = (M_PI - psi) / M_PI;
  return s >= 1.0 ? 0.0 : s;
}

ProjectivePoint ProjectivePoint::from_circle_param(double s) {
  s -= std::floor(s);
  if (s == 0) return infinity();
  double psi = M_PI * (1.0 - s);
  return ProjectivePoint(std::cos(psi), std::sin(psi));
}

std::string ProjectivePoint::display() const {
  if (is_infinite()) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value());
  return buf;
}

bool approx_equal(const ProjectivePoint& p, const ProjectivePoint& q, double tol) {
  return chordal(p, q) <= tol;
}

MoebiusMap::MoebiusMap(double a, double b, double c, double d) : m11(a), m12(b), m21(c), m22(d) {
  double dt = a * d - b * c;
  if (!(std::isfinite(dt)) || dt <= 0)
    throw Error(ErrorCode::InvalidMatrix, "Moebius map needs positive determinant");
  if (std::abs(dt - 1.0) > 8 * kEps) {
    double s = 1.0 / std::sqrt(dt);
    m11 *= s;
    m12 *= s;
    m21 *= s;
    m22 *= s;
  }
  double first = m11 != 0 ? m11 : (m12 != 0 ? m12 : m21);
  if (first < 0) {
    m11 = -m11;
    m12 = -m12;
    m21 = -m21;
    m22 = -m22;
  }
  if (m11 == 0) m11 = 0.0;
  if (m12 == 0) m12 = 0.0;
  if (m21 == 0) m21 = 0.0;
  if (m22 == 0) m22 = 0.0;
}

double MoebiusMap::operator()(double t) const {
  if (std::isinf(t)) {
    if (m21 == 0) return std::numeric_limits<double>::infinity();
    return m11 / m21;
  }
  double den = m21 * t + m22;
  if (den == 0) return std::numeric_limits<double>::infinity();
  return (m11 * t + m12) / den;
}

ProjectivePoint apply(const MoebiusMap& m, const ProjectivePoint& p) {
  return ProjectivePoint(m.m11 * p.a + m.m12 * p.b, m.m21 * p.a + m.m22 * p.b);
}

MoebiusMap compose(const MoebiusMap& m, const MoebiusMap& n) {
  return MoebiusMap(m.m11 * n.m11 + m.m12 * n.m21, m.m11 * n.m12 + m.m12 * n.m22,
                    m.m21 * n.m11 + m.m22 * n.m21, m.m21 * n.m12 + m.m22 * n.m22);
}

MoebiusMap inverse(const MoebiusMap& m) { return MoebiusMap(m.m22, -m.m12, -m.m21, m.m11); }

MoebiusMap conjugate(const MoebiusMap& by, const MoebiusMap& m) {
  return compose(by, compose(m, inverse(by)));
}

double max_entry_diff(const MoebiusMap& m, const MoebiusMap& n) {
  auto a = m.entries();
  auto b = n.entries();
  double d = 0;
  for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

namespace {

// Matrix (up to positive scale) sending p1 -> 0, p2 -> 1, p3 -> inf, as a raw
// 2x2 whose determinant sign is the cyclic order sign of (p1,p2,p3).
std::array<double, 4> standard_map(const ProjectivePoint& p1, const ProjectivePoint& p2,
                                   const ProjectivePoint& p3) {
  double k1 = det(p2, p3);
  double k2 = det(p2, p1);
  return {k1 * p1.b, -k1 * p1.a, k2 * p3.b, -k2 * p3.a};
}

void check_triple(const ProjectivePoint& p1, const ProjectivePoint& p2, const ProjectivePoint& p3) {
  if (chordal(p1, p2) <= kPointTol || chordal(p2, p3) <= kPointTol ||
      chordal(p1, p3) <= kPointTol)
    throw Error(ErrorCode::DegenerateTriple, "two points of a triple coincide");
}

}  // namespace

MoebiusMap from_triples(const ProjectivePoint& p1, const ProjectivePoint& p2,
                        const ProjectivePoint& p3, const ProjectivePoint& q1,
                        const ProjectivePoint& q2, const ProjectivePoint& q3) {
  check_triple(p1, p2, p3);
  check_triple(q1, q2, q3);
  auto s = standard_map(p1, p2, p3);
  auto t = standard_map(q1, q2, q3);
  // t^-1 (adjugate) times s
  double i11 = t[3], i12 = -t[1], i21 = -t[2], i22 = t[0];
  double a = i11 * s[0] + i12 * s[2];
  double b = i11 * s[1] + i12 * s[3];
  double c = i21 * s[0] + i22 * s[2];
  double d = i21 * s[1] + i22 * s[3];
  double dt = a * d - b * c;
  if (!(dt > 0))
    throw Error(ErrorCode::OrientationMismatch,
                "triples have opposite cyclic orders; no element of PSL(2,R) maps one to the other");
  return MoebiusMap(a, b, c, d);
}

double trace_abs(const MoebiusMap& m) { return std::abs(m.trace()); }

double trace_commutator(const MoebiusMap& m, const MoebiusMap& n) {
  // Sign-free by construction: the SL2 lifts' signs cancel in M N M^-1 N^-1.
  double a = m.m11, b = m.m12, c = m.m21, d = m.m22;
  double e = n.m11, f = n.m12, g = n.m21, h = n.m22;
  // M N
  double p11 = a * e + b * g, p12 = a * f + b * h, p21 = c * e + d * g, p22 = c * f + d * h;
  // M^-1 N^-1 = (N M)^-1
  double q11 = e * a + f * c, q12 = e * b + f * d, q21 = g * a + h * c, q22 = g * b + h * d;
  double r11 = q22, r12 = -q12, r21 = -q21, r22 = q11;
  return p11 * r11 + p12 * r21 + p21 * r12 + p22 * r22;
}

MapClass classify(const MoebiusMap& m, double tol) {
  double tr = trace_abs(m);
  MapClass out;
  bool is_identity = std::abs(m.m11 - 1) <= tol && std::abs(m.m22 - 1) <= tol &&
                     std::abs(m.m12) <= tol && std::abs(m.m21) <= tol;
  if (is_identity) {
    out.tag = MapTag::identity;
  } else if (tr > 2 + tol) {
    out.tag = MapTag::hyperbolic;
    out.translation_parameter = std::acosh(tr / 2);
  } else if (std::abs(tr - 2) <= tol) {
    out.tag = MapTag::parabolic;
  } else {
    out.tag = MapTag::elliptic;
  }
  return out;
}

namespace {

struct Eigen2 {
  double lambda;  // > 1, eigenvalue of the positive-trace lift
  double sign;    // +-1, sign making the trace positive
  double v1x, v1y;  // eigenvector for lambda
  double v2x, v2y;  // eigenvector for 1/lambda
};

void eigenvector(double a, double b, double c, double d, double l, double& x, double& y) {
  // (M - l I) v = 0; pick the better-conditioned row.
  double r1x = b, r1y = l - a;
  double r2x = l - d, r2y = c;
  if (std::hypot(r1x, r1y) >= std::hypot(r2x, r2y)) {
    x = r1x;
    y = r1y;
  } else {
    x = r2x;
    y = r2y;
  }
}

Eigen2 eigen(const MoebiusMap& m, double tol) {
  MapClass cls = classify(m, tol);
  if (cls.tag != MapTag::hyperbolic) throw Error(ErrorCode::NotHyperbolic, "map is not hyperbolic");
  Eigen2 e;
  e.sign = m.trace() >= 0 ? 1.0 : -1.0;
  double a = e.sign * m.m11, b = e.sign * m.m12, c = e.sign * m.m21, d = e.sign * m.m22;
  double half = (a + d) / 2;
  e.lambda = half + std::sqrt(half * half - 1);
  eigenvector(a, b, c, d, e.lambda, e.v1x, e.v1y);
  eigenvector(a, b, c, d, 1.0 / e.lambda, e.v2x, e.v2y);
  return e;
}

}  // namespace

MoebiusMap hyperbolic_power(const MoebiusMap& m, double t, double tol) {
  Eigen2 e = eigen(m, tol);
  double l1 = std::pow(e.lambda, t), l2 = std::pow(e.lambda, -t);
  // V diag(l1,l2) V^-1 with V = [v1 v2]
  double vdet = e.v1x * e.v2y - e.v2x * e.v1y;
  double a = (e.v1x * l1 * e.v2y - e.v2x * l2 * e.v1y) / vdet;
  double b = (-e.v1x * l1 * e.v2x + e.v2x * l2 * e.v1x) / vdet;
  double c = (e.v1y * l1 * e.v2y - e.v2y * l2 * e.v1y) / vdet;
  double d = (-e.v1y * l1 * e.v2x + e.v2y * l2 * e.v1x) / vdet;
  return MoebiusMap(a, b, c, d);
}

std::pair<ProjectivePoint, ProjectivePoint> fixed_points(const MoebiusMap& m, double tol) {
  Eigen2 e = eigen(m, tol);
  return {ProjectivePoint(e.v1x, e.v1y), ProjectivePoint(e.v2x, e.v2y)};
}

double multiplier_at(const MoebiusMap& m, const ProjectivePoint& p) {
  // For M v = mu v with det M = 1 the derivative at [v] is 1/mu^2.
  double mx = m.m11 * p.a + m.m12 * p.b;
  double my = m.m21 * p.a + m.m22 * p.b;
  double mu = mx * p.a + my * p.b;
  return 1.0 / (mu * mu);
}

Orientation cyclic_order(const ProjectivePoint& p, const ProjectivePoint& q,
                         const ProjectivePoint& r, double tol) {
  double d1 = det(p, q), d2 = det(q, r), d3 = det(r, p);
  if (std::abs(d1) <= tol || std::abs(d2) <= tol || std::abs(d3) <= tol)
    return Orientation::degenerate;
  // (0,1,inf) gives a positive product, so no extra calibration sign.
  return d1 * d2 * d3 > 0 ? Orientation::positive : Orientation::negative;
}

double cross_ratio(const ProjectivePoint& p, const ProjectivePoint& q, const ProjectivePoint& r,
                   const ProjectivePoint& s, double tol) {
  const ProjectivePoint* pts[4] = {&p, &q, &r, &s};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (chordal(*pts[i], *pts[j]) <= tol)
        throw Error(ErrorCode::DegenerateTuple, "cross-ratio of coincident points");
  return det(s, p) * det(q, r) / (det(s, r) * det(q, p));
}

MoebiusMap rotation_to_infinity(const ProjectivePoint& z) {
  return MoebiusMap(z.a, z.b, -z.b, z.a);
}

bool on_arc(const ProjectivePoint& from, const ProjectivePoint& to, const ProjectivePoint& p,
            double tol) {
  if (chordal(p, from) <= tol || chordal(p, to) <= tol) return true;
  double s0 = from.circle_param();
  double len = to.circle_param() - s0;
  len -= std::floor(len);
  double d = p.circle_param() - s0;
  d -= std::floor(d);
  return d <= len;
}

}  // namespace dstori
