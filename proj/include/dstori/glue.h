#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dstori/desitter.h"
#include "dstori/hiet.h"
#include "dstori/io.h"
#include "dstori/moebius.h"

namespace dstori {

enum class LeafKind { alpha, beta };  // alpha: constant y, beta: constant x

const char* to_string(LeafKind k);
LeafKind leaf_kind_from_string(const std::string& s);

struct Edge {
  LeafKind kind = LeafKind::alpha;
  DSPoint start, end;
  int orient = 1;  // +1 follows the positive orientation of the moving coordinate
};

/// map(bottom.start) = top.end and map(bottom.end) = top.start.
struct Pairing {
  size_t top = 0, bottom = 0;
  MoebiusMap map;
};

struct PolygonSpec {
  std::vector<Edge> edges;  // cyclic, positively oriented boundary
  std::vector<Pairing> pairings;
  std::string model = "dS";

  Json to_json() const;
  /// Throws InvalidSpec on malformed input.
  static PolygonSpec from_json(const Json& j);
};

/// Drops zero-length edges and pairings between two such edges.
PolygonSpec canonicalize(const PolygonSpec& spec, double tol = 1e-12);
/// Same edges up to a cyclic shift and the same pairings, maps within tol.
bool specs_equivalent(const PolygonSpec& a, const PolygonSpec& b, double tol = 1e-9);

/// Corner i is edges[i].start, between edges[i-1] and edges[i].
struct VertexOrbit {
  std::vector<size_t> corners;  // P0, P1, ..., Pd
};

std::vector<VertexOrbit> vertex_orbits(const PolygonSpec& spec);

/// Quadrants: 0 future spacelike, 1 future timelike, 2 past spacelike,
/// 3 past timelike (counterclockwise from the +x direction).
struct QuadrantReport {
  bool standard = false;
  std::vector<std::vector<int>> per_corner;
  std::vector<std::string> issues;
  Json to_json() const;
};

QuadrantReport quadrant_check(const PolygonSpec& spec, const VertexOrbit& orbit);

/// f_{P1} ... f_{Pd} f_{P0}; throws NonStandardQuadrants.
MoebiusMap vertex_holonomy(const PolygonSpec& spec, const VertexOrbit& orbit);

/// Sign convention, fixed once: kAngleSign * (contracting at base.x ? +1 : -1)
/// makes the singular vertex of T_{theta,x} report +theta.
constexpr int kAngleSign = 1;

/// Signed angle; throws EllipticHolonomy or NotFixingBase (tol 1e-8).
double angle_of_holonomy(const MoebiusMap& m, const DSPoint& base);

double polygon_area(const PolygonSpec& spec);

/// Straight-line image of the polygon in a bounded affine chart.
struct ChartGeometry {
  MoebiusMap chart;                             // RP^1 -> chart, infinity outside
  std::vector<std::array<double, 2>> corners;   // chart coordinates
  std::vector<int> dir;                         // 0 +x, 1 +y, 2 -x, 3 -y
};

/// Section: contiguous entry edges of one flow, alpha edges for the beta flow
/// and beta edges for the alpha flow.
struct Section {
  LeafKind flow = LeafKind::beta;
  std::vector<size_t> edges;
};

struct GluedSurface {
  PolygonSpec spec;
  std::vector<VertexOrbit> vertex_orbits;
  std::vector<QuadrantReport> quadrant_reports;
  std::vector<MoebiusMap> holonomies;
  std::vector<double> angles;
  double area = 0;
  int euler_characteristic = 0;
  ChartGeometry geometry;
  std::vector<size_t> partner;     // edge -> paired edge
  std::vector<size_t> pairing_of;  // edge -> pairing index
  std::map<std::string, Section> sections;

  Json report() const;
};

/// Validates the spec and computes everything. Throws InvalidSpec,
/// InconsistentPairing, NonStandardQuadrants, ChartFailure.
GluedSurface build_surface(const PolygonSpec& spec);

double gauss_bonnet_check(const GluedSurface& s);

PolygonSpec spec_T_theta_x(double theta, const ProjectivePoint& x);
PolygonSpec spec_T_theta_xy(double theta, const ProjectivePoint& x, double y);
/// Sections "bottom" (beta flow) and "left" (alpha flow) are registered.
GluedSurface build_T_theta_x(double theta, const ProjectivePoint& x);
GluedSurface build_T_theta_xy(double theta, const ProjectivePoint& x, double y);

enum class CornerPolicy { stop, pass_through };

struct LeafSegment {
  DSPoint start, end;
  std::array<double, 2> cs{}, ce{};  // chart coordinates
};

struct LeafJump {
  size_t after_segment = 0;
  size_t edge = 0;     // exit edge
  size_t pairing = 0;
  MoebiusMap map;
  bool through_corner = false;
};

struct LeafTrace {
  LeafKind kind = LeafKind::alpha;
  std::vector<LeafSegment> segments;
  std::vector<LeafJump> jumps;
  std::vector<long> crossing_counts;  // per pairing: +1 out through top, -1 through bottom
  bool closed = false;
  bool corner_hit = false;
  std::optional<size_t> corner;
  bool returned = false;  // stopped on a requested edge
  std::optional<DSPoint> landing;  // position after the last jump
  std::string csv() const;
  Json to_json() const;
};

struct TraceOptions {
  int max_jumps = 100;
  CornerPolicy corner_policy = CornerPolicy::stop;
  std::vector<size_t> stop_edges;  // stop after a jump lands on one of these
};

LeafTrace trace_leaf(const GluedSurface& s, const DSPoint& start, LeafKind kind,
                     const TraceOptions& opt = {});

std::string svg(const GluedSurface& s, const std::vector<LeafTrace>& traces);

/// Interval of the section in RP^1 (positive arc).
std::pair<ProjectivePoint, ProjectivePoint> section_interval(const GluedSurface& s,
                                                             const Section& sec);
/// Point of the section at transverse coordinate t.
DSPoint section_point(const GluedSurface& s, const Section& sec, const ProjectivePoint& t);

/// Piecewise Moebius return map found by propagating intervals. Throws NoReturn.
Hiet first_return_hiet(const GluedSurface& s, const Section& sec, int max_jumps = 64);
CircleMap first_return(const GluedSurface& s, const Section& sec, int max_jumps = 64);

}  // namespace dstori
