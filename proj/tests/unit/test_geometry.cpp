#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "robin/errors.hpp"
#include "robin/geometry.hpp"
#include "support/oracles.hpp"

using namespace robin;

TEST_SUITE("geometry") {
  TEST_CASE("default configuration builds n half-open arcs and m closed electrodes") {
    const Geometry g = build_geometry(GeometryConfig{});
    REQUIRE(g.partition.size() == 2);
    REQUIRE(g.electrodes.size() == 4);
    for (const Arc& arc : g.partition) {
      CHECK_FALSE(arc.closed);
      CHECK(arc.width == doctest::Approx(kPi));
    }
    for (const Arc& e : g.electrodes) {
      CHECK(e.closed);
      CHECK(e.width == doctest::Approx(0.5 * kTwoPi / 4));
    }
    CHECK(std::sin(g.electrodes[0].center()) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::cos(g.electrodes[0].center()) == doctest::Approx(1.0));
  }

  TEST_CASE("invalid configurations are rejected") {
    GeometryConfig c;
    c.n = 1;
    CHECK_THROWS_AS(build_geometry(c), ConfigError);
    c = GeometryConfig{};
    c.m = 1;
    CHECK_THROWS_AS(build_geometry(c), ConfigError);
    c = GeometryConfig{};
    c.inner_radius = 1.2;
    CHECK_THROWS_AS(build_geometry(c), ConfigError);
    c = GeometryConfig{};
    c.electrode_coverage = 1.0;
    CHECK_THROWS_AS(build_geometry(c), ConfigError);
    c = GeometryConfig{};
    c.electrode_coverage = 0.0;
    CHECK_THROWS_AS(build_geometry(c), ConfigError);
    c = GeometryConfig{};
    c.partition_phase = std::nan("");
    CHECK_THROWS_AS(build_geometry(c), ConfigError);
  }

  TEST_CASE("partition covers the interface exactly once") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> count(2, 24);
    std::uniform_real_distribution<double> phase(-10.0, 10.0);
    for (int trial = 0; trial < 5; ++trial) {
      GeometryConfig c;
      c.n = count(rng);
      c.partition_phase = phase(rng);
      const Geometry g = build_geometry(c);
      const auto [lo, hi] = oracle::coverage_counts(g.partition, 1000000);
      CHECK(lo == 1);
      CHECK(hi == 1);
    }
  }

  TEST_CASE("electrodes are pairwise disjoint and cover the configured fraction") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> count(2, 40);
    std::uniform_real_distribution<double> cover(0.05, 0.95);
    for (int trial = 0; trial < 10; ++trial) {
      GeometryConfig c;
      c.m = count(rng);
      c.electrode_coverage = cover(rng);
      c.electrode_phase = cover(rng) * 7.0;
      const Geometry g = build_geometry(c);
      const int samples = 200000;
      const auto [lo, hi] = oracle::coverage_counts(g.electrodes, samples);
      CHECK(lo == 0);
      CHECK(hi == 1);
      int covered = 0;
      for (int s = 0; s < samples; ++s) covered += g.electrode_of(kTwoPi * (s + 0.5) / samples, 0.0) >= 0 ? 1 : 0;
      CHECK(static_cast<double>(covered) / samples == doctest::Approx(c.electrode_coverage).epsilon(1e-3));
    }
  }

  TEST_CASE("partition_of and electrode_of agree with arc membership") {
    GeometryConfig c;
    c.n = 5;
    c.m = 7;
    c.partition_phase = 0.3;
    const Geometry g = build_geometry(c);
    for (int s = 0; s < 1000; ++s) {
      const double angle = kTwoPi * s / 1000.0;
      const int j = g.partition_of(angle);
      CHECK(g.partition[j].contains(angle));
    }
    CHECK(g.partition_of(0.3) == 0);
    CHECK(g.partition_of(0.3 + kTwoPi / 5) == 1);
    CHECK(g.electrode_of(g.electrodes[3].start) == 3);
    CHECK(g.electrode_of(g.electrodes[3].end()) == 3);
    CHECK(g.electrode_of(g.electrodes[3].end() + 0.01) == -1);
  }

  TEST_CASE("wrap_angle maps into [0, 2 pi)") {
    CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
    CHECK(wrap_angle(kTwoPi) == doctest::Approx(0.0));
    CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - kTwoPi));
  }

  TEST_CASE("generated meshes pass validation") {
    const int layouts[][3] = {{2, 4, 1}, {2, 4, 3}, {3, 5, 2}, {5, 12, 1}, {20, 30, 2}, {7, 9, 2}};
    for (const auto& l : layouts) {
      GeometryConfig c;
      c.n = l[0];
      c.m = l[1];
      c.partition_phase = 0.1 * l[0];
      c.electrode_phase = 0.05 * l[1];
      const Geometry g = build_geometry(c);
      const Mesh mesh = generate_mesh(g, l[2]);
      const auto issues = validate_mesh(mesh, g);
      for (const auto& issue : issues) MESSAGE(issue.kind << ": " << issue.detail);
      CHECK(issues.empty());
      CHECK(mesh.interface_edges.size() == static_cast<std::size_t>(mesh.sectors));
      CHECK(mesh.boundary_edges.size() == static_cast<std::size_t>(mesh.sectors));
    }
  }

  TEST_CASE("mesh area converges to the disc area") {
    const Geometry g = build_geometry(GeometryConfig{});
    double previous = 1.0;
    for (int r = 1; r <= 4; ++r) {
      const double err = kPi - mesh_area(generate_mesh(g, r));
      CHECK(err > 0.0);
      CHECK(err < previous);
      previous = err;
    }
    CHECK(previous < 1e-2);
  }

  TEST_CASE("refinement halves the angular step and doubles the ring count") {
    for (int r = 1; r < 6; ++r) {
      CHECK(angular_step(r + 1) == doctest::Approx(0.5 * angular_step(r)));
      CHECK(rings_per_region(r + 1) == 2 * rings_per_region(r));
    }
    CHECK_THROWS_AS(generate_mesh(build_geometry(GeometryConfig{}), 0), MeshError);
  }

  TEST_CASE("validation detects a corrupted mesh") {
    const Geometry g = build_geometry(GeometryConfig{});
    Mesh mesh = generate_mesh(g, 1);
    std::swap(mesh.triangles[5].nodes[1], mesh.triangles[5].nodes[2]);
    bool orientation = false;
    for (const auto& issue : validate_mesh(mesh)) orientation |= issue.kind == "negative_orientation";
    CHECK(orientation);

    Mesh tags = generate_mesh(g, 1);
    tags.interface_edges[0].tag = 1 - tags.interface_edges[0].tag;
    bool tag = false;
    for (const auto& issue : validate_mesh(tags, g)) tag |= issue.kind == "interface_tag";
    CHECK(tag);
  }

  TEST_CASE("arc endpoints closer than the resolution are rejected") {
    GeometryConfig c;
    c.m = 4;
    c.electrode_coverage = 0.5;
    // first partition arc starts 1e-9 rad after the end of electrode 1
    c.partition_phase = 0.25 * kTwoPi / 4 + 1e-9;
    CHECK_THROWS_AS(generate_mesh(build_geometry(c), 1), MeshError);
  }

  TEST_CASE("mesh export lists node, triangle and edge tables") {
    const Geometry g = build_geometry(GeometryConfig{});
    const Mesh mesh = generate_mesh(g, 1);
    std::ostringstream out;
    write_mesh(out, mesh);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# robin-mesh v1");
    const std::string text = out.str();
    CHECK(text.find("nodes " + std::to_string(mesh.nodes.size())) != std::string::npos);
    CHECK(text.find("triangles " + std::to_string(mesh.triangles.size())) != std::string::npos);
    CHECK(text.find("interface_edges " + std::to_string(mesh.interface_edges.size())) != std::string::npos);
    CHECK(text.find("boundary_edges " + std::to_string(mesh.boundary_edges.size())) != std::string::npos);
    CHECK(text.find("insulated") != std::string::npos);
  }
}
