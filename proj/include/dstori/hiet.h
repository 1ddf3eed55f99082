#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dstori/io.h"
#include "dstori/moebius.h"

namespace dstori {

/// Homographic interval exchange on the positive arc [left, right) of RP^1.
/// Top and bottom subintervals are half-open, closed on the left.
class Hiet {
 public:
  /// Validates breaks, tiling and endpoint images (tol 1e-9); throws InvalidHiet.
  Hiet(const ProjectivePoint& left, const ProjectivePoint& right,
       std::vector<ProjectivePoint> top_breaks, std::vector<ProjectivePoint> bottom_breaks,
       std::vector<MoebiusMap> branches, std::vector<int> perm);

  /// Bottom partition derived from the images of the top subintervals.
  /// Adjacent branches with equal maps and contiguous images are merged.
  static Hiet from_branches(const ProjectivePoint& left, const ProjectivePoint& right,
                            const std::vector<ProjectivePoint>& top_breaks,
                            const std::vector<MoebiusMap>& branches);

  const ProjectivePoint& left() const { return left_; }
  const ProjectivePoint& right() const { return right_; }
  const std::vector<ProjectivePoint>& top_breaks() const { return top_breaks_; }
  const std::vector<ProjectivePoint>& bottom_breaks() const { return bottom_breaks_; }
  const std::vector<MoebiusMap>& branches() const { return branches_; }
  const std::vector<int>& perm() const { return perm_; }
  size_t size() const { return branches_.size(); }

  /// Default chart: (left, angular midpoint, right) -> (0, 1/2, 1).
  const MoebiusMap& chart() const { return chart_; }
  /// Chart coordinate in [0,1); the right endpoint is glued to the left.
  /// Throws OutOfInterval off the arc.
  double param(const ProjectivePoint& p) const;
  ProjectivePoint point(double s) const;
  bool contains(const ProjectivePoint& p, double tol = 1e-9) const;

  /// Subinterval bounds in chart coordinates, including 0 and 1.
  const std::vector<double>& top_params() const { return top_s_; }
  const std::vector<double>& bottom_params() const { return bottom_s_; }
  size_t top_index(double s) const;
  size_t bottom_index(double s) const;

  Hiet inverse() const;

  Json to_json() const;
  static Hiet from_json(const Json& j);

 private:
  ProjectivePoint left_, right_;
  std::vector<ProjectivePoint> top_breaks_, bottom_breaks_;
  std::vector<MoebiusMap> branches_;
  std::vector<int> perm_;
  MoebiusMap chart_;
  std::vector<double> top_s_, bottom_s_;
};

MoebiusMap interval_chart(const ProjectivePoint& left, const ProjectivePoint& right);

ProjectivePoint eval(const Hiet& h, const ProjectivePoint& p);
ProjectivePoint eval_inverse(const Hiet& h, const ProjectivePoint& p);
ProjectivePoint iterate(const Hiet& h, const ProjectivePoint& p, long n);
/// Letter k (k = 1..n) is 'a' + branch index of iterate(h, p, k-1).
std::string coding(const Hiet& h, const ProjectivePoint& p, long n);

/// a o b, on a common interval.
Hiet compose(const Hiet& a, const Hiet& b);

/// One piece of a circle map in chart coordinates: on [s0, s1) the value is
/// phi(s) (or the constant c), clamped to the image [b0, b1].
struct CirclePiece {
  double s0 = 0, s1 = 1;
  bool constant = false;
  MoebiusMap phi;
  double b0 = 0, b1 = 1;
  int offset = 0;  // integer added by the lift on this piece
};

/// Degree-one monotone map of S^1_I = [left,right]/(left~right), coordinatized
/// by R/Z through `chart`.
class CircleMap {
 public:
  /// Pieces in chart coordinates must tile [0,1); offsets are computed here.
  CircleMap(const ProjectivePoint& left, const ProjectivePoint& right, const MoebiusMap& chart,
            std::vector<CirclePiece> pieces, std::optional<Hiet> hiet = std::nullopt);

  const ProjectivePoint& left() const { return left_; }
  const ProjectivePoint& right() const { return right_; }
  const MoebiusMap& chart() const { return chart_; }
  const std::optional<Hiet>& hiet() const { return hiet_; }
  const std::vector<CirclePiece>& pieces() const { return pieces_; }
  bool homeomorphism() const { return homeo_; }

  /// Map on [0,1) -> [0,1).
  double eval(double s) const;
  /// Lift F on [0,1) with F(0) in [0,1]; F(t+1) = F(t)+1.
  double lift01(double s) const;
  double param(const ProjectivePoint& p) const;
  ProjectivePoint point(double s) const;
  ProjectivePoint eval_point(const ProjectivePoint& p) const;

 private:
  size_t piece_index(double s) const;

  ProjectivePoint left_, right_;
  MoebiusMap chart_;
  std::vector<CirclePiece> pieces_;
  std::optional<Hiet> hiet_;
  bool homeo_ = true;
};

CircleMap to_circle_map(const Hiet& h);
/// Same map in another chart; chart(left) = 0 and chart(right) = 1 required.
CircleMap to_circle_map(const Hiet& h, const MoebiusMap& chart);
/// Rigid rotation s -> s + r on [0,1) with the identity chart.
CircleMap rigid_rotation(double r);

struct OneSingFamilyX {
  double theta = 0, y_theta = 0;
  ProjectivePoint x, x_prime;
  MoebiusMap g, h, gh;
  std::optional<Hiet> E;  // always set by build_one_sing
};

/// Throws DomainError for x outside [1, inf] or theta <= 0.
OneSingFamilyX build_one_sing(double theta, const ProjectivePoint& x);
OneSingFamilyX build_one_sing(double theta, double x);

/// g, h_x of the one-parameter family (x homogeneous, x >= 1).
MoebiusMap family_g(double theta);
MoebiusMap family_h(double theta, const ProjectivePoint& x);

struct TwoSingFamilyXY {
  double theta = 0, y_theta = 0, y = 0, y_plus = 0;
  ProjectivePoint x, x_prime, y_prime;
  MoebiusMap h1, h2, g1, g2;
  std::optional<Hiet> E, F;
};

/// Accepts the interior of the domain plus the edges x = inf and y = y_theta.
/// Throws BoundaryCase on the edges y = 0 (x < inf) and y = 1 - e^-theta x,
/// OutsideDomain elsewhere.
TwoSingFamilyXY build_two_sing(double theta, const ProjectivePoint& x, double y);
TwoSingFamilyXY build_two_sing(double theta, double x, double y);

/// h1, h2 as closed forms in (theta, x, y).
MoebiusMap family_h1(double theta, const ProjectivePoint& x, double y);
MoebiusMap family_h2(double theta, const ProjectivePoint& x, double y);

/// E^-1 at a boundary point: x in [e^theta, inf] means the edge y = 0, and
/// x in (1, e^theta) the edge y = 1 - e^-theta x. Throws NotBoundary otherwise.
CircleMap build_boundary_inverse(double theta, const ProjectivePoint& x);

}  // namespace dstori
