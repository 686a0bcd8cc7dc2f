#include "robin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "robin/errors.hpp"

namespace robin {

double wrap_angle(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

bool Arc::contains(double angle, double tol) const {
  const double rel = wrap_angle(angle - start);
  if (closed) return rel <= width + tol || rel >= kTwoPi - tol;
  return rel < width || rel >= kTwoPi - tol;
}

int Geometry::partition_of(double angle) const {
  const double step = kTwoPi / config.n;
  const double rel = wrap_angle(angle - config.partition_phase);
  int j = static_cast<int>(std::floor(rel / step));
  return std::clamp(j, 0, config.n - 1);
}

int Geometry::electrode_of(double angle, double tol) const {
  for (std::size_t k = 0; k < electrodes.size(); ++k) {
    if (electrodes[k].contains(angle, tol)) return static_cast<int>(k);
  }
  return -1;
}

Geometry build_geometry(const GeometryConfig& config) {
  auto fail = [](const std::string& what) { throw ConfigError("geometry: " + what); };
  if (!(config.inner_radius > 0.0) || !(config.outer_radius > config.inner_radius) ||
      !std::isfinite(config.outer_radius)) {
    fail("radii must satisfy 0 < inner_radius < outer_radius");
  }
  if (config.n < 2) fail("n must be at least 2");
  if (config.m < 2) fail("m must be at least 2");
  if (!(config.electrode_coverage > 0.0) || !(config.electrode_coverage < 1.0)) {
    fail("electrode_coverage must lie in (0, 1)");
  }
  if (!std::isfinite(config.partition_phase) || !std::isfinite(config.electrode_phase)) {
    fail("phases must be finite");
  }

  Geometry g;
  g.config = config;

  const double part_width = kTwoPi / config.n;
  for (int j = 0; j < config.n; ++j) {
    g.partition.push_back(
        Arc{wrap_angle(config.partition_phase + j * part_width), part_width, false});
  }

  const double spacing = kTwoPi / config.m;
  const double width = config.electrode_coverage * spacing;
  for (int k = 0; k < config.m; ++k) {
    const double center = config.electrode_phase + k * spacing;
    g.electrodes.push_back(Arc{wrap_angle(center - 0.5 * width), width, true});
  }

  // Closed arcs of equal width are disjoint iff their centers are further
  // apart than one width along the circle.
  for (int k = 0; k < config.m; ++k) {
    for (int l = k + 1; l < config.m; ++l) {
      double d = wrap_angle(g.electrodes[l].center() - g.electrodes[k].center());
      d = std::min(d, kTwoPi - d);
      if (d - width <= 1e-12) {
        std::ostringstream msg;
        msg << "electrodes " << k + 1 << " and " << l + 1 << " overlap";
        fail(msg.str());
      }
    }
  }
  return g;
}

double angular_step(int refinement) { return kTwoPi / (16.0 * std::ldexp(1.0, refinement - 1)); }

int rings_per_region(int refinement) { return 3 * (1 << (refinement - 1)); }

namespace {

// Sorted, deduplicated angles in [0, 2*pi) that must be mesh nodes.
std::vector<double> breakpoints(const Geometry& g) {
  std::vector<double> pts;
  for (const Arc& arc : g.partition) pts.push_back(wrap_angle(arc.start));
  for (const Arc& arc : g.electrodes) {
    pts.push_back(wrap_angle(arc.start));
    pts.push_back(wrap_angle(arc.end()));
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> unique;
  for (double p : pts) {
    if (unique.empty() || p - unique.back() > 1e-12) unique.push_back(p);
  }
  if (unique.size() > 1 && unique.front() + kTwoPi - unique.back() <= 1e-12) unique.pop_back();
  return unique;
}

}  // namespace

Mesh generate_mesh(const Geometry& geometry, int refinement) {
  if (refinement < 1) throw MeshError("refinement must be at least 1");
  if (refinement > 12) throw MeshError("refinement above 12 is not supported");

  const double h = angular_step(refinement);
  const std::vector<double> cuts = breakpoints(geometry);

  std::vector<double> angles;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = (i + 1 < cuts.size()) ? cuts[i + 1] : cuts.front() + kTwoPi;
    const double gap = hi - lo;
    if (gap < 1e-3 * h) {
      std::ostringstream msg;
      msg << "refinement " << refinement << " too coarse to separate arc endpoints at angles "
          << lo << " and " << wrap_angle(hi);
      throw MeshError(msg.str());
    }
    const int pieces = std::max(1, static_cast<int>(std::ceil(gap / h - 1e-9)));
    for (int p = 0; p < pieces; ++p) angles.push_back(lo + gap * p / pieces);
  }

  const auto& cfg = geometry.config;
  const int per_region = rings_per_region(refinement);
  std::vector<double> radii;
  for (int k = 1; k <= per_region; ++k) radii.push_back(cfg.inner_radius * k / per_region);
  for (int k = 1; k <= per_region; ++k) {
    radii.push_back(cfg.inner_radius + (cfg.outer_radius - cfg.inner_radius) * k / per_region);
  }
  radii[per_region - 1] = cfg.inner_radius;
  radii.back() = cfg.outer_radius;

  Mesh mesh;
  mesh.refinement = refinement;
  mesh.outer_radius = cfg.outer_radius;
  mesh.inner_radius = cfg.inner_radius;
  const int sectors = static_cast<int>(angles.size());
  const int rings = static_cast<int>(radii.size());
  mesh.sectors = sectors;
  mesh.rings = rings;

  mesh.nodes.reserve(1 + static_cast<std::size_t>(sectors) * rings);
  mesh.nodes.push_back(Point{0.0, 0.0});
  for (double r : radii) {
    for (double th : angles) mesh.nodes.push_back(Point{r * std::cos(th), r * std::sin(th)});
  }
  auto node = [sectors](int ring, int s) { return 1 + ring * sectors + (s % sectors); };

  auto add_triangle = [&mesh](int a, int b, int c, Region region) {
    Triangle t{{a, b, c}, region};
    if (triangle_area(mesh, t) < 0.0) std::swap(t.nodes[1], t.nodes[2]);
    mesh.triangles.push_back(t);
  };

  for (int s = 0; s < sectors; ++s) add_triangle(0, node(0, s), node(0, s + 1), Region::inner);
  for (int ring = 0; ring + 1 < rings; ++ring) {
    const Region region = (ring + 1 < per_region) ? Region::inner : Region::outer;
    for (int s = 0; s < sectors; ++s) {
      const int a = node(ring, s);
      const int b = node(ring, s + 1);
      const int c = node(ring + 1, s + 1);
      const int d = node(ring + 1, s);
      add_triangle(a, b, c, region);
      add_triangle(a, c, d, region);
    }
  }

  auto mid_angle = [&angles, sectors](int s) {
    const double lo = angles[s];
    const double hi = (s + 1 < sectors) ? angles[s + 1] : angles.front() + kTwoPi;
    return 0.5 * (lo + hi);
  };
  const int interface_ring = per_region - 1;
  for (int s = 0; s < sectors; ++s) {
    mesh.interface_edges.push_back(TaggedEdge{node(interface_ring, s), node(interface_ring, s + 1),
                                              geometry.partition_of(mid_angle(s))});
  }
  const int outer_ring = rings - 1;
  for (int s = 0; s < sectors; ++s) {
    const int k = geometry.electrode_of(mid_angle(s));
    mesh.boundary_edges.push_back(
        TaggedEdge{node(outer_ring, s), node(outer_ring, s + 1), k < 0 ? kInsulated : k});
  }
  return mesh;
}

double triangle_area(const Mesh& mesh, const Triangle& tri) {
  const Point& p = mesh.nodes[tri.nodes[0]];
  const Point& q = mesh.nodes[tri.nodes[1]];
  const Point& r = mesh.nodes[tri.nodes[2]];
  return 0.5 * ((q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y));
}

double mesh_area(const Mesh& mesh) {
  double total = 0.0;
  for (const Triangle& t : mesh.triangles) total += triangle_area(mesh, t);
  return total;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::string describe_edge(const TaggedEdge& e) {
  std::ostringstream s;
  s << "nodes " << e.a << "-" << e.b;
  return s.str();
}

}  // namespace

std::vector<MeshIssue> validate_mesh(const Mesh& mesh) {
  std::vector<MeshIssue> issues;
  const double scale = mesh.outer_radius;
  const double radial_tol = 1e-12 * scale;
  const double area_tol = 1e-14 * scale * scale;
  const long node_count = static_cast<long>(mesh.nodes.size());

  std::map<EdgeKey, std::vector<int>> edge_owners;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    bool indices_ok = true;
    for (int v : tri.nodes) indices_ok = indices_ok && v >= 0 && v < node_count;
    if (!indices_ok) {
      issues.push_back({"bad_node_index", static_cast<long>(t), "triangle references missing node"});
      continue;
    }
    const double area = triangle_area(mesh, tri);
    if (area < -area_tol) {
      issues.push_back({"negative_orientation", static_cast<long>(t),
                        "triangle " + std::to_string(t) + " is clockwise"});
    } else if (area <= area_tol) {
      issues.push_back({"degenerate_triangle", static_cast<long>(t),
                        "triangle " + std::to_string(t) + " has zero area"});
    }
    for (int i = 0; i < 3; ++i) {
      edge_owners[edge_key(tri.nodes[i], tri.nodes[(i + 1) % 3])].push_back(static_cast<int>(t));
    }
  }

  for (const auto& [key, owners] : edge_owners) {
    if (owners.size() > 2) {
      issues.push_back({"nonconforming_edge", owners.front(),
                        "edge " + std::to_string(key.first) + "-" + std::to_string(key.second) +
                            " shared by " + std::to_string(owners.size()) + " triangles"});
    }
  }

  auto radius = [&mesh](int v) { return std::hypot(mesh.nodes[v].x, mesh.nodes[v].y); };

  for (std::size_t e = 0; e < mesh.interface_edges.size(); ++e) {
    const TaggedEdge& edge = mesh.interface_edges[e];
    if (edge.a < 0 || edge.a >= node_count || edge.b < 0 || edge.b >= node_count) {
      issues.push_back({"bad_node_index", static_cast<long>(e), "interface edge references missing node"});
      continue;
    }
    if (std::abs(radius(edge.a) - mesh.inner_radius) > radial_tol ||
        std::abs(radius(edge.b) - mesh.inner_radius) > radial_tol) {
      issues.push_back({"interface_radius", static_cast<long>(e),
                        "interface edge " + std::to_string(e) + " (" + describe_edge(edge) +
                            ") is off the interface circle"});
    }
    bool has_inner = false;
    bool has_outer = false;
    auto it = edge_owners.find(edge_key(edge.a, edge.b));
    if (it != edge_owners.end()) {
      for (int t : it->second) {
        has_inner = has_inner || mesh.triangles[t].region == Region::inner;
        has_outer = has_outer || mesh.triangles[t].region == Region::outer;
      }
    }
    if (!has_inner || !has_outer) {
      issues.push_back({"interface_adjacency", static_cast<long>(e),
                        "interface edge " + std::to_string(e) + " (" + describe_edge(edge) +
                            ") lacks its " + (has_inner ? "outer" : "inner") + "-side triangle"});
    }
  }

  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const TaggedEdge& edge = mesh.boundary_edges[e];
    if (edge.a < 0 || edge.a >= node_count || edge.b < 0 || edge.b >= node_count) {
      issues.push_back({"bad_node_index", static_cast<long>(e), "boundary edge references missing node"});
      continue;
    }
    if (std::abs(radius(edge.a) - mesh.outer_radius) > radial_tol ||
        std::abs(radius(edge.b) - mesh.outer_radius) > radial_tol) {
      issues.push_back({"boundary_radius", static_cast<long>(e),
                        "boundary edge " + std::to_string(e) + " is off the outer circle"});
    }
    auto it = edge_owners.find(edge_key(edge.a, edge.b));
    if (it == edge_owners.end() || it->second.size() != 1) {
      issues.push_back({"boundary_adjacency", static_cast<long>(e),
                        "boundary edge " + std::to_string(e) + " must belong to exactly one triangle"});
    }
  }

  const double disc = kPi * mesh.outer_radius * mesh.outer_radius;
  const double area = mesh_area(mesh);
  if (area < 0.95 * disc || area > disc * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "total area " << area << " outside [0.95, 1] * pi R^2";
    issues.push_back({"area", -1, msg.str()});
  }
  return issues;
}

std::vector<MeshIssue> validate_mesh(const Mesh& mesh, const Geometry& geometry) {
  std::vector<MeshIssue> issues = validate_mesh(mesh);
  const double tol = 1e-10 * mesh.outer_radius;

  auto has_node_at = [&mesh, tol](double r, double angle) {
    const double x = r * std::cos(angle);
    const double y = r * std::sin(angle);
    return std::any_of(mesh.nodes.begin(), mesh.nodes.end(), [&](const Point& p) {
      return std::hypot(p.x - x, p.y - y) <= tol;
    });
  };

  for (std::size_t j = 0; j < geometry.partition.size(); ++j) {
    if (!has_node_at(mesh.inner_radius, geometry.partition[j].start)) {
      issues.push_back({"missing_endpoint", static_cast<long>(j),
                        "interface arc " + std::to_string(j + 1) + " start is not a node"});
    }
  }
  for (std::size_t k = 0; k < geometry.electrodes.size(); ++k) {
    const Arc& arc = geometry.electrodes[k];
    if (!has_node_at(mesh.outer_radius, arc.start) || !has_node_at(mesh.outer_radius, arc.end())) {
      issues.push_back({"missing_endpoint", static_cast<long>(k),
                        "electrode " + std::to_string(k + 1) + " endpoint is not a node"});
    }
  }

  auto midpoint_angle = [&mesh](const TaggedEdge& e) {
    const Point& p = mesh.nodes[e.a];
    const Point& q = mesh.nodes[e.b];
    return std::atan2(p.y + q.y, p.x + q.x);
  };
  for (std::size_t e = 0; e < mesh.interface_edges.size(); ++e) {
    const TaggedEdge& edge = mesh.interface_edges[e];
    if (edge.tag != geometry.partition_of(midpoint_angle(edge))) {
      issues.push_back({"interface_tag", static_cast<long>(e), "interface edge tag disagrees with arc"});
    }
  }
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const TaggedEdge& edge = mesh.boundary_edges[e];
    const int k = geometry.electrode_of(midpoint_angle(edge));
    if (edge.tag != (k < 0 ? kInsulated : k)) {
      issues.push_back({"boundary_tag", static_cast<long>(e), "boundary edge tag disagrees with electrode"});
    }
  }
  return issues;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  auto old_precision = out.precision(17);
  out << "# robin-mesh v1\n";
  out << "refinement " << mesh.refinement << "\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    out << i << " " << mesh.nodes[i].x << " " << mesh.nodes[i].y << "\n";
  }
  out << "triangles " << mesh.triangles.size() << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    out << t << " " << tri.nodes[0] << " " << tri.nodes[1] << " " << tri.nodes[2] << " "
        << static_cast<int>(tri.region) << "\n";
  }
  out << "interface_edges " << mesh.interface_edges.size() << "\n";
  for (std::size_t e = 0; e < mesh.interface_edges.size(); ++e) {
    const TaggedEdge& edge = mesh.interface_edges[e];
    out << e << " " << edge.a << " " << edge.b << " " << edge.tag + 1 << "\n";
  }
  out << "boundary_edges " << mesh.boundary_edges.size() << "\n";
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const TaggedEdge& edge = mesh.boundary_edges[e];
    out << e << " " << edge.a << " " << edge.b << " ";
    if (edge.tag == kInsulated) {
      out << "insulated\n";
    } else {
      out << edge.tag + 1 << "\n";
    }
  }
  out.precision(old_precision);
}

}  // namespace robin
