#include "dstori/desitter.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dstori/errors.h"

namespace dstori {

DSPoint::DSPoint(const ProjectivePoint& x_, const ProjectivePoint& y_) : x(x_), y(y_) {
  if (chordal(x, y) <= kPointTol) throw Error(ErrorCode::DomainError, "point on the diagonal");
}

DSPoint DSPoint::finite(double x, double y) {
  return DSPoint(ProjectivePoint::finite(x), ProjectivePoint::finite(y));
}

DSPoint apply(const MoebiusMap& m, const DSPoint& p) { return DSPoint(apply(m, p.x), apply(m, p.y)); }

LightlikeRectangle::LightlikeRectangle(const ProjectivePoint& xA_, const ProjectivePoint& xC_,
                                       const ProjectivePoint& yA_, const ProjectivePoint& yC_)
    : xA(xA_), xC(xC_), yA(yA_), yC(yC_) {
  if (cyclic_order(yA, yC, xA) != Orientation::positive ||
      cyclic_order(xA, xC, yA) != Orientation::positive)
    throw Error(ErrorCode::DegenerateRectangle, "rectangle sides are not positively ordered");
}

std::array<DSPoint, 4> LightlikeRectangle::corners() const {
  return {DSPoint(xA, yA), DSPoint(xC, yA), DSPoint(xC, yC), DSPoint(xA, yC)};
}

LightlikeRectangle apply(const MoebiusMap& m, const LightlikeRectangle& r) {
  return LightlikeRectangle(apply(m, r.xA), apply(m, r.xC), apply(m, r.yA), apply(m, r.yC));
}

double y_theta(double theta) {
  if (!(theta > 0)) throw Error(ErrorCode::NonPositiveAngle, "theta must be positive");
  return -std::expm1(-theta);
}

LightlikeRectangle rectangle_theta(double theta) {
  return LightlikeRectangle(ProjectivePoint::finite(1), ProjectivePoint::infinity(),
                            ProjectivePoint::finite(0), ProjectivePoint::finite(y_theta(theta)));
}

double area_rectangle(const LightlikeRectangle& r) {
  // Iterated integral of 1/(x-y)^2 over [x1,x2]x[y1,y2] is
  // log((x1-y1)(x2-y2)/((x1-y2)(x2-y1))); homogeneous scalings cancel.
  double num = det(r.xA, r.yA) * det(r.xC, r.yC);
  double den = det(r.xC, r.yA) * det(r.xA, r.yC);
  if (num == 0 || den == 0) throw Error(ErrorCode::DegenerateRectangle, "corner on the diagonal");
  return std::log(std::abs(num / den));
}

MoebiusMap bounded_chart(const LightlikeRectangle& r) {
  // Side arcs in circle parameter; infinity goes to the middle of the
  // largest uncovered gap between arc endpoints.
  auto wrap = [](double v) { return v - std::floor(v); };
  struct Arc {
    double s0, len;
  };
  auto arc = [&](const ProjectivePoint& a, const ProjectivePoint& b) {
    return Arc{a.circle_param(), wrap(b.circle_param() - a.circle_param())};
  };
  Arc arcs[2] = {arc(r.xA, r.xC), arc(r.yA, r.yC)};
  std::vector<double> ends;
  for (const Arc& a : arcs) {
    ends.push_back(a.s0);
    ends.push_back(wrap(a.s0 + a.len));
  }
  std::sort(ends.begin(), ends.end());
  double best_len = 0, best_mid = 0;
  for (size_t i = 0; i < ends.size(); ++i) {
    double lo = ends[i];
    double len = i + 1 < ends.size() ? ends[i + 1] - lo : ends[0] + 1 - lo;
    double mid = wrap(lo + len / 2);
    bool covered = false;
    for (const Arc& a : arcs)
      if (wrap(mid - a.s0) <= a.len) covered = true;
    if (!covered && len > best_len) {
      best_len = len;
      best_mid = mid;
    }
  }
  if (best_len <= 1e-9) throw Error(ErrorCode::ChartFailure, "rectangle sides cover RP^1");
  return rotation_to_infinity(ProjectivePoint::from_circle_param(best_mid));
}

double lshape_y_plus(double theta, const ProjectivePoint& x, double y) {
  // the second rectangle is empty on the edge y = y_theta
  if (std::abs(y - y_theta(theta)) <= 1e-12) return y;
  double e = std::exp(theta);
  double w = x.a - y * x.b;
  return (-x.a + e * w) / (-x.b + e * w);
}

bool in_domain(double theta, const ProjectivePoint& x, double y, double tol) {
  double yt = y_theta(theta);
  if (!(y > tol && y <= yt + tol)) return false;
  // x in (1, inf]: a/b > 1 or b = 0
  if (!(x.is_infinite() || x.a - x.b > tol * x.a)) return false;
  // y > 1 - e^-theta x, homogeneously: y b > b - e^-theta a
  return y * x.b - (x.b - std::exp(-theta) * x.a) > tol;
}

LShapedPolygon::LShapedPolygon(double theta_, const ProjectivePoint& x_, double y_)
    : theta(theta_), x(x_), y(y_) {
  y_theta(theta);  // validates theta
  if (!in_domain(theta, x, y)) throw Error(ErrorCode::OutsideDomain, "(x,y) outside the domain");
  y_plus = lshape_y_plus(theta, x, y);
}

double area_lshape(const LShapedPolygon& p) {
  auto one = ProjectivePoint::finite(1);
  double total = area_rectangle(LightlikeRectangle(one, ProjectivePoint::infinity(),
                                                   ProjectivePoint::finite(0),
                                                   ProjectivePoint::finite(p.y)));
  if (p.y_plus - p.y > 0)
    total += area_rectangle(LightlikeRectangle(one, p.x, ProjectivePoint::finite(p.y),
                                               ProjectivePoint::finite(p.y_plus)));
  return total;
}

}  // namespace dstori
