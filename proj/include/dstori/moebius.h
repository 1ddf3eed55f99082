#pragma once

#include <array>
#include <string>
#include <utility>

namespace dstori {

/// A point [a : b] of RP^1. Finite t is [t : 1], infinity is [1 : 0].
/// Stored normalized: a^2 + b^2 = 1 with b > 0, or b = 0 and a > 0.
struct ProjectivePoint {
  double a = 1.0;
  double b = 0.0;

  ProjectivePoint() = default;
  ProjectivePoint(double a_, double b_);

  static ProjectivePoint finite(double t);
  static ProjectivePoint infinity();

  bool is_infinite() const { return b == 0.0; }
  /// a/b; +inf for the point at infinity.
  double value() const;
  /// Coordinate in [0,1) increasing along the positive orientation of RP^1,
  /// with infinity at 0 and 0 at 1/2.
  double circle_param() const;
  static ProjectivePoint from_circle_param(double s);

  std::string display() const;
};

/// 2x2 determinant of homogeneous coordinates.
inline double det(const ProjectivePoint& p, const ProjectivePoint& q) {
  return p.a * q.b - p.b * q.a;
}

/// Chordal distance |sin| of the angle between the two lines; 0 iff equal.
inline double chordal(const ProjectivePoint& p, const ProjectivePoint& q) {
  double d = det(p, q);
  return d < 0 ? -d : d;
}

bool approx_equal(const ProjectivePoint& p, const ProjectivePoint& q, double tol);

/// Element of PSL(2,R): determinant one, sign-canonical.
struct MoebiusMap {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  MoebiusMap() = default;
  /// Normalizes; throws InvalidMatrix if the determinant is not positive.
  MoebiusMap(double a, double b, double c, double d);

  static MoebiusMap identity() { return {}; }

  double trace() const { return m11 + m22; }
  double det() const { return m11 * m22 - m12 * m21; }
  std::array<double, 4> entries() const { return {m11, m12, m21, m22}; }
  /// Affine action on a finite t (may return +-inf at the pole).
  double operator()(double t) const;
};

enum class MapTag { identity, elliptic, parabolic, hyperbolic };

struct MapClass {
  MapTag tag = MapTag::identity;
  /// t >= 0 with |trace| = 2 cosh t; only meaningful for hyperbolic maps.
  double translation_parameter = 0.0;
};

enum class Orientation { positive, negative, degenerate };

constexpr double kDefaultTraceTol = 1e-9;
constexpr double kPointTol = 1e-12;

ProjectivePoint apply(const MoebiusMap& m, const ProjectivePoint& p);
MoebiusMap compose(const MoebiusMap& m, const MoebiusMap& n);
MoebiusMap inverse(const MoebiusMap& m);
MoebiusMap conjugate(const MoebiusMap& by, const MoebiusMap& m);  // by m by^-1
double max_entry_diff(const MoebiusMap& m, const MoebiusMap& n);

MoebiusMap from_triples(const ProjectivePoint& p1, const ProjectivePoint& p2,
                        const ProjectivePoint& p3, const ProjectivePoint& q1,
                        const ProjectivePoint& q2, const ProjectivePoint& q3);

double trace_abs(const MoebiusMap& m);
double trace_commutator(const MoebiusMap& m, const MoebiusMap& n);

MapClass classify(const MoebiusMap& m, double tol = kDefaultTraceTol);

MoebiusMap hyperbolic_power(const MoebiusMap& m, double t, double tol = kDefaultTraceTol);

/// (attracting, repelling) fixed points of a hyperbolic map.
std::pair<ProjectivePoint, ProjectivePoint> fixed_points(const MoebiusMap& m,
                                                         double tol = kDefaultTraceTol);

/// Multiplier of m at one of its fixed points (derivative in any affine chart).
double multiplier_at(const MoebiusMap& m, const ProjectivePoint& fixed);

Orientation cyclic_order(const ProjectivePoint& p, const ProjectivePoint& q,
                         const ProjectivePoint& r, double tol = kPointTol);

/// Convention: cross_ratio(0, 1, inf, t) = t.
double cross_ratio(const ProjectivePoint& p, const ProjectivePoint& q,
                   const ProjectivePoint& r, const ProjectivePoint& s, double tol = kPointTol);

/// Elliptic rotation sending z to infinity; used to move finite configurations
/// into a bounded affine chart.
MoebiusMap rotation_to_infinity(const ProjectivePoint& z);

/// True if p lies on the closed positive arc from `from` to `to`.
bool on_arc(const ProjectivePoint& from, const ProjectivePoint& to, const ProjectivePoint& p,
            double tol = kPointTol);

}  // namespace dstori
