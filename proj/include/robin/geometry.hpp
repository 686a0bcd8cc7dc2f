#ifndef ROBIN_GEOMETRY_HPP
#define ROBIN_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace robin {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Concentric disc-in-disc setup: the inner disc (radius inner_radius) is
/// bounded by the interface, whose n equal arcs carry one Robin coefficient
/// each; m equally spaced electrodes sit on the outer circle.
struct GeometryConfig {
  double outer_radius = 1.0;
  double inner_radius = 0.5;
  int n = 2;
  int m = 4;
  // Fraction of the outer perimeter covered by all electrodes together.
  double electrode_coverage = 0.5;
  // Angle at which the first interface arc starts.
  double partition_phase = 0.0;
  // Angle of the first electrode center.
  double electrode_phase = 0.0;
};

/// Angular arc [start, start + width] on a circle. Half-open arcs exclude
/// their end angle.
struct Arc {
  double start = 0.0;
  double width = 0.0;
  bool closed = false;

  double end() const { return start + width; }
  double center() const { return start + 0.5 * width; }
  bool contains(double angle, double tol = 1e-12) const;
};

// Wraps an angle into [0, 2*pi).
double wrap_angle(double angle);

struct Geometry {
  GeometryConfig config;
  std::vector<Arc> partition;   // n half-open arcs covering the interface
  std::vector<Arc> electrodes;  // m closed, pairwise disjoint arcs

  // Index of the interface arc containing the angle (always defined).
  int partition_of(double angle) const;
  // Index of the electrode containing the angle, or -1.
  int electrode_of(double angle, double tol = 1e-12) const;
};

Geometry build_geometry(const GeometryConfig& config);

enum class Region : std::uint8_t { inner = 1, outer = 2 };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Triangle {
  std::array<int, 3> nodes{};
  Region region = Region::inner;
};

inline constexpr int kInsulated = -1;

// Edge between two nodes; tag is the interface arc index for interface
// edges and the electrode index (or kInsulated) for boundary edges.
struct TaggedEdge {
  int a = 0;
  int b = 0;
  int tag = kInsulated;
};

/// Conforming P1 triangulation of the disc. Node 0 is the center; the
/// remaining nodes are stored ring by ring from the center outwards.
struct Mesh {
  std::vector<Point> nodes;
  std::vector<Triangle> triangles;
  std::vector<TaggedEdge> interface_edges;
  std::vector<TaggedEdge> boundary_edges;
  int refinement = 1;
  double outer_radius = 1.0;
  double inner_radius = 0.5;
  int sectors = 0;
  int rings = 0;
};

// Angular spacing target and ring counts at a refinement level. Each level
// halves both spacings.
double angular_step(int refinement);
int rings_per_region(int refinement);

Mesh generate_mesh(const Geometry& geometry, int refinement);

double triangle_area(const Mesh& mesh, const Triangle& tri);
double mesh_area(const Mesh& mesh);

struct MeshIssue {
  std::string kind;
  long index = -1;
  std::string detail;
};

// Empty result iff every mesh invariant holds.
std::vector<MeshIssue> validate_mesh(const Mesh& mesh);
// Also checks that the arc endpoints of the geometry are mesh nodes and
// that edge tags agree with the arcs containing their midpoints.
std::vector<MeshIssue> validate_mesh(const Mesh& mesh, const Geometry& geometry);

// Plain-text export: node, triangle and tagged edge tables.
void write_mesh(std::ostream& out, const Mesh& mesh);

}  // namespace robin

#endif  // ROBIN_GEOMETRY_HPP
