#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "egocorridor/elevation.hpp"
#include "egocorridor/error.hpp"
#include "support.hpp"

using namespace egocorridor;
using namespace testing_support;

TEST(HeightMapBuild, ConstantField) {
  std::vector<HeightSample> s;
  for (int k = 0; k < 50; ++k) s.push_back({{k * 0.7, std::sin(k) * 5}, 5.0});
  const HeightMap m = build_height_map(s, 1.0);
  int valid = 0;
  for (int j = 0; j < m.height; ++j)
    for (int i = 0; i < m.width; ++i)
      if (m.valid(i, j)) {
        ++valid;
        EXPECT_DOUBLE_EQ(m.value(i, j), 5.0);
      }
  EXPECT_GT(valid, 0);
  EXPECT_DOUBLE_EQ(query_height(m, {10.2, 1.0}, -1.0), 5.0);
}

TEST(HeightMapBuild, MeanOfSamplesInOneCell) {
  const std::vector<HeightSample> s{{{0.2, 0.3}, 0.0}, {{0.7, 0.6}, 2.0}};
  const HeightMap m = build_height_map(s, 1.0);
  const int i = static_cast<int>(std::floor((0.5 - m.origin.x) / m.resolution));
  const int j = static_cast<int>(std::floor((0.5 - m.origin.y) / m.resolution));
  ASSERT_TRUE(m.valid(i, j));
  EXPECT_DOUBLE_EQ(m.value(i, j), 1.0);
  EXPECT_EQ(m.count[static_cast<std::size_t>(j) * m.width + i], 2);
}

TEST(HeightMapBuild, MarginAroundSpan) {
  const std::vector<HeightSample> s{{{0.0, 0.0}, 1.0}, {{100.0, 0.0}, 1.0}};
  const HeightMap m = build_height_map(s, 1.0);
  EXPECT_GE(m.width, 102);
  EXPECT_LE(m.origin.x, -1.0);
  EXPECT_GE(m.origin.x + m.width * m.resolution, 101.0);
}

TEST(HeightMapBuild, EmptyThrows) {
  try {
    build_height_map(std::vector<HeightSample>{}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySamples);
  }
}

TEST(HeightQuery, MidwayBetweenTwoCells) {
  const std::vector<HeightSample> s{{{0.5, 0.5}, 0.0}, {{1.5, 0.5}, 2.0}};
  const HeightMap m = build_height_map(s, 1.0);
  EXPECT_DOUBLE_EQ(query_height(m, {1.0, 0.5}, -7.0), 1.0);
}

TEST(HeightQuery, FarOutsideUsesFallback) {
  const std::vector<HeightSample> s{{{0.5, 0.5}, 3.0}};
  const HeightMap m = build_height_map(s, 1.0);
  EXPECT_DOUBLE_EQ(query_height(m, {500.0, -800.0}, -7.0), -7.0);
  // No valid cell within reach of the query either.
  EXPECT_DOUBLE_EQ(query_height(m, {6.0, 0.5}, -7.0), -7.0);
  // Nearest valid cell within three cells.
  EXPECT_DOUBLE_EQ(query_height(m, {2.9, 0.5}, -7.0), 3.0);
}

TEST(HeightProperty, PlanesReproducedAtCellCentres) {
  Gen g(201);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = g.uniform(-0.3, 0.3), b = g.uniform(-0.3, 0.3), c = g.uniform(-100, 100);
    const double res = g.uniform(0.5, 2.0);
    std::vector<HeightSample> s;
    for (int j = 0; j < 20; ++j)
      for (int i = 0; i < 20; ++i) {
        const Point2 p{(i + 0.5) * res, (j + 0.5) * res};
        s.push_back({p, a * p.x + b * p.y + c});
      }
    const HeightMap m = build_height_map(s, res);
    for (int j = 0; j < m.height; ++j)
      for (int i = 0; i < m.width; ++i) {
        if (!m.valid(i, j)) continue;
        const Point2 p = m.cell_center(i, j);
        EXPECT_NEAR(query_height(m, p, 0.0), a * p.x + b * p.y + c, 1e-9);
      }
    // Between centres, inside the sampled block, the error stays within res * |(a, b)|.
    for (int k = 0; k < 200; ++k) {
      const Point2 p{g.uniform(0.5 * res, 19.5 * res), g.uniform(0.5 * res, 19.5 * res)};
      EXPECT_LE(std::abs(query_height(m, p, 0.0) - (a * p.x + b * p.y + c)), res * std::hypot(a, b) + 1e-9);
    }
  }
}

TEST(HeightProperty, OutputWithinContributingRange) {
  Gen g(203);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<HeightSample> s;
    double lo = INFINITY, hi = -INFINITY;
    for (int k = 0; k < 60; ++k) {
      const double z = g.uniform(-20, 20);
      lo = std::min(lo, z);
      hi = std::max(hi, z);
      s.push_back({{g.uniform(0, 10), g.uniform(0, 10)}, z});
    }
    const HeightMap m = build_height_map(s, 1.0);
    for (int k = 0; k < 500; ++k) {
      const double z = query_height(m, {g.uniform(-1, 11), g.uniform(-1, 11)}, 0.5 * (lo + hi));
      EXPECT_GE(z, lo - 1e-12);
      EXPECT_LE(z, hi + 1e-12);
    }
  }
}

TEST(Lift, FlatRampAndPlanform) {
  std::vector<HeightSample> flat, ramp;
  for (int j = -5; j < 5; ++j)
    for (int i = -5; i < 25; ++i) {
      const Point2 p{i + 0.5, j + 0.5};
      flat.push_back({p, 0.0});
      ramp.push_back({p, 0.1 * p.x});
    }
  const Polygon2 poly = densify(rect(0, -2, 20, 2), 1.0);
  const Polygon3 a = lift_polygon(poly, build_height_map(flat, 1.0), 9.0);
  for (Point3 p : a.vertices) EXPECT_DOUBLE_EQ(p.z, 0.0);
  const HeightMap rm = build_height_map(ramp, 1.0);
  const Polygon3 b = lift_polygon(poly, rm, 9.0);
  ASSERT_EQ(b.vertices.size(), poly.vertices.size());
  for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
    EXPECT_EQ(b.vertices[k].x, poly.vertices[k].x);
    EXPECT_EQ(b.vertices[k].y, poly.vertices[k].y);
    if (poly.vertices[k].x == 10.0) EXPECT_NEAR(b.vertices[k].z, 1.0, 1.0 * 0.1);
  }
  const Polygon3 c = lift_polygon(rect(500, 500, 510, 510), rm, 9.0);
  for (Point3 p : c.vertices) EXPECT_DOUBLE_EQ(p.z, 9.0);
}

TEST(GroundSample, RemovesMountHeightAlongBodyAxis) {
  const HeightSample level = ground_sample_from_reference({{3, 4, 12}, 0, 0, 1.0}, 2.0);
  EXPECT_DOUBLE_EQ(level.position.x, 3);
  EXPECT_DOUBLE_EQ(level.position.y, 4);
  EXPECT_DOUBLE_EQ(level.altitude, 10);
  // Nose down by 30 degrees with yaw 0: the body z axis leans forward.
  const double p = std::numbers::pi / 6;
  const HeightSample pitched = ground_sample_from_reference({{0, 0, 2}, 0, p, 0}, 2.0);
  EXPECT_NEAR(pitched.position.x, -2 * std::sin(p), 1e-12);
  EXPECT_NEAR(pitched.altitude, 2 - 2 * std::cos(p), 1e-12);
}

TEST(HeightMapFile, RoundTrip) {
  Gen g(207);
  std::vector<HeightSample> s;
  for (int k = 0; k < 300; ++k) s.push_back({{g.uniform(-30, 30), g.uniform(-10, 10)}, g.uniform(-3, 3)});
  const HeightMap m = build_height_map(s, 0.7);
  const auto path = std::filesystem::temp_directory_path() / "egocorridor_roundtrip.hmap";
  save_height_map(m, path);
  const HeightMap r = load_height_map(path);
  std::filesystem::remove(path);
  EXPECT_EQ(r.width, m.width);
  EXPECT_EQ(r.height, m.height);
  EXPECT_EQ(r.origin, m.origin);
  EXPECT_EQ(r.resolution, m.resolution);
  EXPECT_EQ(r.count, m.count);
  EXPECT_EQ(r.mean, m.mean);
}
