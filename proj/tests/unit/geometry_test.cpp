#include <gtest/gtest.h>

#include <numbers>

#include "egocorridor/geometry.hpp"
#include "support.hpp"

using namespace egocorridor;
using namespace testing_support;

namespace {

void expect_points(const std::vector<Point2>& got, const std::vector<Point2>& want, double tol = 1e-12) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].x, want[i].x, tol) << "vertex " << i;
    EXPECT_NEAR(got[i].y, want[i].y, tol) << "vertex " << i;
  }
}

}  // namespace

TEST(Resample, SegmentAtFiveMetres) {
  const Polyline2 line{{{0, 0}, {10, 0}}};
  expect_points(resample_polyline(line, 5.0).vertices, {{0, 0}, {5, 0}, {10, 0}});
}

TEST(Resample, StepLongerThanLineKeepsEndpoints) {
  const Polyline2 line{{{0, 0}, {1, 1}, {3, 0}}};
  expect_points(resample_polyline(line, 100.0).vertices, {{0, 0}, {3, 0}});
  expect_points(resample_polyline(line, polyline_length(line.vertices)).vertices, {{0, 0}, {3, 0}});
}

TEST(Resample, LShapeAtTwoMetres) {
  const Polyline2 line{{{0, 0}, {4, 0}, {4, 4}}};
  // Arc lengths 0, 2, 4, 6, 8.
  expect_points(resample_polyline(line, 2.0).vertices, {{0, 0}, {2, 0}, {4, 0}, {4, 2}, {4, 4}});
}

TEST(Resample, SamplesLieOnLineAtStepMultiples) {
  Gen g(7);
  for (int trial = 0; trial < 200; ++trial) {
    Polyline2 line;
    Point2 p{0, 0};
    for (int k = 0, n = g.integer(2, 10); k < n; ++k) {
      line.vertices.push_back(p);
      p = p + Point2{g.uniform(0.1, 5), g.uniform(-5, 5)};
    }
    const double step = g.uniform(0.1, 3.0);
    const auto out = resample_polyline(line, step).vertices;
    const double total = polyline_length(line.vertices);
    ASSERT_GE(out.size(), 2u);
    EXPECT_EQ(out.front(), line.vertices.front());
    EXPECT_EQ(out.back(), line.vertices.back());
    // Interior samples sit at k*step along the line, so consecutive chords are at most one step.
    for (std::size_t i = 1; i + 1 < out.size(); ++i) {
      double best = INFINITY;
      for (std::size_t s = 1; s < line.vertices.size(); ++s)
        best = std::min(best, segment_distance(out[i], line.vertices[s - 1], line.vertices[s]));
      EXPECT_LT(best, 1e-9);
      EXPECT_LE(distance(out[i - 1], out[i]), step + 1e-9);
    }
    if (total >= step) EXPECT_EQ(out.size(), static_cast<std::size_t>(std::ceil(total / step - 1e-9)) + 1);
  }
}

TEST(Clip, RectangleKeepLeftOfTwenty) {
  const Polygon2 r = rect(0, -2, 50, 2);
  const auto out = clip_polygon_halfplane(r, {{20, 0}, {-1, 0}});
  ASSERT_TRUE(out);
  EXPECT_NEAR(polygon_area(*out), 80.0, 1e-12);
  const Bounds2 bb = bounding_box(out->vertices);
  EXPECT_NEAR(bb.min.x, 0, 1e-12);
  EXPECT_NEAR(bb.max.x, 20, 1e-12);
  EXPECT_NEAR(bb.min.y, -2, 1e-12);
  EXPECT_NEAR(bb.max.y, 2, 1e-12);
  EXPECT_EQ(out->vertices.size(), 4u);
}

TEST(Clip, FullyInsideIsIdentity) {
  const Polygon2 r = rect(0, -2, 50, 2);
  const auto out = clip_polygon_halfplane(r, {{60, 0}, {-1, 0}});
  ASSERT_TRUE(out);
  expect_points(out->vertices, r.vertices, 0.0);
}

TEST(Clip, FullyOutsideIsEmpty) {
  EXPECT_FALSE(clip_polygon_halfplane(rect(0, -2, 50, 2), {{-1, 0}, {-1, 0}}));
}

TEST(ClipProperty, IdempotentMonotoneAndAgreesWithMembership) {
  Gen g(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Polygon2 poly = random_star(g);
    ASSERT_TRUE(is_valid(poly));
    const double a = g.uniform(0, 2 * std::numbers::pi);
    const HalfPlane hp{{g.uniform(-6, 6), g.uniform(-6, 6)}, {std::cos(a), std::sin(a)}};
    const auto once = clip_polygon_halfplane(poly, hp);
    if (!once) {
      for (Point2 v : poly.vertices) EXPECT_LT(hp.signed_distance(v), 1e-9);
      continue;
    }
    // With two boundary crossings the kept part is one piece and must be simple; more crossings leave
    // several pieces joined by zero-width bridges along the line, which only membership can judge.
    int crossings = 0;
    for (std::size_t i = 0, j = poly.vertices.size() - 1; i < poly.vertices.size(); j = i++)
      crossings += (hp.signed_distance(poly.vertices[i]) >= 0) != (hp.signed_distance(poly.vertices[j]) >= 0);
    if (crossings <= 2) EXPECT_TRUE(is_valid(*once)) << "trial " << trial;
    for (Point2 v : once->vertices) EXPECT_GE(hp.signed_distance(v), -1e-9);
    EXPECT_LE(polygon_area(*once), polygon_area(poly) + 1e-9);

    const auto twice = clip_polygon_halfplane(*once, hp);
    ASSERT_TRUE(twice);
    expect_points(twice->vertices, once->vertices, 1e-9);

    for (int k = 0; k < 10000; ++k) {
      const Point2 p{g.uniform(-11, 11), g.uniform(-11, 11)};
      if (boundary_distance(p, poly) < 1e-6 || boundary_distance(p, *once) < 1e-6 ||
          std::abs(hp.signed_distance(p)) < 1e-6)
        continue;
      const bool want = winding(p, poly) != 0 && hp.signed_distance(p) >= 0;
      ASSERT_EQ(point_in_polygon(p, *once), want) << "trial " << trial << " point " << p.x << "," << p.y;
    }
  }
}

TEST(PointInPolygon, Examples) {
  Gen g(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Polygon2 c = random_star(g, {0, 0}, 2.0, 2.0);  // regular-ish, convex when all radii equal
    Point2 centroid{};
    for (Point2 v : c.vertices) centroid = centroid + v;
    centroid = (1.0 / static_cast<double>(c.vertices.size())) * centroid;
    EXPECT_TRUE(point_in_polygon(centroid, c));
    EXPECT_FALSE(point_in_polygon({1000.0 + 2.0, 0.0}, c));
  }
}

TEST(PointInPolygon, EdgePointsAreInsideAndInteriorMatchesWinding) {
  Gen g(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon2 poly = random_star(g);
    const auto& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point2 on = lerp(v[i], v[(i + 1) % v.size()], g.uniform(0, 1));
      EXPECT_TRUE(point_in_polygon(on, poly));
      EXPECT_TRUE(point_in_polygon(v[i], poly));
    }
    for (int k = 0; k < 200; ++k) {
      const Point2 p{g.uniform(-11, 11), g.uniform(-11, 11)};
      if (boundary_distance(p, poly) < 1e-6) continue;
      EXPECT_EQ(point_in_polygon(p, poly), winding(p, poly) != 0);
    }
  }
}

TEST(Area, Examples) {
  EXPECT_DOUBLE_EQ(polygon_area(rect(0, 0, 1, 1)), 1.0);
  EXPECT_DOUBLE_EQ(polygon_area(rect(0, -2, 50, 2)), 200.0);
}

TEST(Area, MatchesMonteCarlo) {
  Gen g(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Polygon2 poly = random_star(g, {0, 0}, 3.0, 10.0);
    const Bounds2 bb = bounding_box(poly.vertices);
    const int n = 1000000;
    int hits = 0;
    for (int k = 0; k < n; ++k)
      hits += winding({g.uniform(bb.min.x, bb.max.x), g.uniform(bb.min.y, bb.max.y)}, poly) != 0;
    const double mc = hits * (bb.max.x - bb.min.x) * (bb.max.y - bb.min.y) / n;
    EXPECT_NEAR(polygon_area(poly), mc, 0.01 * mc);
  }
}

TEST(Frames, Examples) {
  const Pose pose{{10, -4, 3}, 0.1, -0.05, 0.0};
  const Point3 o = map_to_leveled_vehicle(pose, pose.position);
  EXPECT_NEAR(o.x, 0, 1e-12);
  EXPECT_NEAR(o.y, 0, 1e-12);
  EXPECT_NEAR(o.z, 0, 1e-12);
  const Point3 fwd = map_to_leveled_vehicle(pose, pose.position + Point3{1, 0, 0});
  EXPECT_NEAR(fwd.x, 1, 1e-12);
  EXPECT_NEAR(fwd.y, 0, 1e-12);
  Pose turned = pose;
  turned.yaw = std::numbers::pi / 2;
  const Point3 left = map_to_leveled_vehicle(turned, pose.position + Point3{0, 1, 0});
  EXPECT_NEAR(left.x, 1, 1e-12);
  EXPECT_NEAR(left.y, 0, 1e-12);
  EXPECT_NEAR(left.z, 0, 1e-12);
}

TEST(Frames, RoundTrip) {
  Gen g(13);
  for (int k = 0; k < 10000; ++k) {
    const Pose pose{{g.uniform(-1e4, 1e4), g.uniform(-1e4, 1e4), g.uniform(-100, 100)},
                    g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-std::numbers::pi, std::numbers::pi)};
    const Point3 p{pose.position.x + g.uniform(-200, 200), pose.position.y + g.uniform(-200, 200), g.uniform(-50, 50)};
    const Point3 back = leveled_vehicle_to_map(pose, map_to_leveled_vehicle(pose, p));
    EXPECT_LT(std::hypot(back.x - p.x, back.y - p.y, back.z - p.z), 1e-9);
  }
}

TEST(Angles, NormalizeIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(normalize_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(normalize_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(normalize_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(normalize_angle(0.25), 0.25, 1e-15);
}

TEST(Densify, EdgesBoundedAndShapeKept) {
  const Polygon2 r = rect(0, 0, 10, 3);
  const Polygon2 d = densify(r, 1.0);
  for (std::size_t i = 0; i < d.vertices.size(); ++i)
    EXPECT_LE(distance(d.vertices[i], d.vertices[(i + 1) % d.vertices.size()]), 1.0 + 1e-12);
  EXPECT_NEAR(polygon_area(d), 30.0, 1e-9);
}

TEST(Validity, RejectsBowtieAndClockwise) {
  EXPECT_FALSE(is_valid(Polygon2{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}));
  EXPECT_FALSE(is_valid(Polygon2{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}}));
  EXPECT_TRUE(is_valid(rect(0, 0, 1, 1)));
}
