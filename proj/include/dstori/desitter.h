#pragma once

#include <array>

#include "dstori/moebius.h"

namespace dstori {

/// Point of dS^2 = RP^1 x RP^1 minus the diagonal.
struct DSPoint {
  ProjectivePoint x;
  ProjectivePoint y;

  DSPoint() = default;
  /// Throws DomainError on the diagonal.
  DSPoint(const ProjectivePoint& x_, const ProjectivePoint& y_);
  static DSPoint finite(double x, double y);
};

DSPoint apply(const MoebiusMap& m, const DSPoint& p);  // diagonal action

/// Lightlike rectangle [xA,xC] x [yA,yC] (positive arcs).
struct LightlikeRectangle {
  ProjectivePoint xA, xC, yA, yC;

  /// Validates the two cyclic order conditions; throws DegenerateRectangle.
  LightlikeRectangle(const ProjectivePoint& xA_, const ProjectivePoint& xC_,
                     const ProjectivePoint& yA_, const ProjectivePoint& yC_);
  std::array<DSPoint, 4> corners() const;  // A=(xA,yA), (xC,yA), C=(xC,yC), (xA,yC)
};

LightlikeRectangle apply(const MoebiusMap& m, const LightlikeRectangle& r);

double y_theta(double theta);

/// R_theta = [1,inf] x [0,y_theta].
LightlikeRectangle rectangle_theta(double theta);

/// Closed form, chart independent: log of a cross-ratio of the four sides.
double area_rectangle(const LightlikeRectangle& r);

/// Bounded-chart move used by the quadrature oracle: returns M such that
/// both side arcs of M.r avoid infinity. Throws ChartFailure otherwise.
MoebiusMap bounded_chart(const LightlikeRectangle& r);

/// y_plus(theta, x, y) making the L-shape area equal to theta.
double lshape_y_plus(double theta, const ProjectivePoint& x, double y);

/// Strict membership in the parameter domain (x,y) with x in (1,inf],
/// y in (0,y_theta], y > 1 - e^-theta x. Tolerance 1e-12.
bool in_domain(double theta, const ProjectivePoint& x, double y, double tol = 1e-12);

struct LShapedPolygon {
  double theta;
  ProjectivePoint x;
  double y;
  double y_plus;

  /// Throws NonPositiveAngle / OutsideDomain.
  LShapedPolygon(double theta_, const ProjectivePoint& x_, double y_);
};

double area_lshape(const LShapedPolygon& p);

}  // namespace dstori
