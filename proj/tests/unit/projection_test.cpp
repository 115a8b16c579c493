#include <gtest/gtest.h>

#include <numbers>

#include <Eigen/Geometry>

#include "egocorridor/error.hpp"
#include "egocorridor/projection.hpp"
#include "support.hpp"

using namespace egocorridor;
using namespace testing_support;

namespace {

const CameraIntrinsics kIntr{500, 500, 320, 240, 640, 480};

ImagePolygon square(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

std::size_t brute_count(const std::vector<ImagePolygon>& add, const std::vector<ImagePolygon>& sub, int w, int h,
                        std::vector<std::uint8_t>* bits = nullptr) {
  auto inside = [](const ImagePolygon& p, double x, double y) {
    bool in = false;
    for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++)
      if ((p[i].v > y) != (p[j].v > y) && x < p[j].u + (y - p[j].v) * (p[i].u - p[j].u) / (p[i].v - p[j].v)) in = !in;
    return in;
  };
  std::size_t n = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      bool on = false;
      for (const auto& p : add) on = on || inside(p, c + 0.5, r + 0.5);
      for (const auto& p : sub) on = on && !inside(p, c + 0.5, r + 0.5);
      n += on;
      if (bits) bits->push_back(on);
    }
  return n;
}

}  // namespace

TEST(Tilt, CompensationExamples) {
  const Point3 p{1.5, -2.0, 0.3};
  EXPECT_EQ(compensate_tilt(p, {0, 0}), p);
  const Point3 q = compensate_tilt({1, 0, 0}, {0, std::numbers::pi / 2});
  EXPECT_NEAR(q.x, 0, 1e-15);
  EXPECT_NEAR(q.y, 0, 1e-15);
  EXPECT_NEAR(q.z, 1, 1e-15);
  Gen g(301);
  for (int k = 0; k < 1000; ++k) {
    const TiltState t{g.uniform(-0.7, 0.7), g.uniform(-0.7, 0.7)};
    const Point3 a{g.uniform(-50, 50), g.uniform(-50, 50), g.uniform(-5, 5)};
    const Point3 b = compensate_tilt(a, t);
    const Eigen::Vector3d back = body_to_leveled(t) * Eigen::Vector3d(b.x, b.y, b.z);
    EXPECT_NEAR(back.x(), a.x, 1e-12);
    EXPECT_NEAR(back.y(), a.y, 1e-12);
    EXPECT_NEAR(back.z(), a.z, 1e-12);
  }
}

TEST(Tilt, RollThenPitchOrder) {
  // R = Rx(roll) * Ry(pitch) built independently from Eigen angle-axis products.
  const TiltState t{0.2, -0.1};
  const Eigen::Matrix3d want =
      (Eigen::AngleAxisd(0.2, Eigen::Vector3d::UnitX()) * Eigen::AngleAxisd(-0.1, Eigen::Vector3d::UnitY()))
          .toRotationMatrix();
  EXPECT_LT((body_to_leveled(t) - want).norm(), 1e-15);
}

TEST(Project, PointExamples) {
  const ImagePoint a = project_point(kIntr, {0, 0, 10});
  EXPECT_DOUBLE_EQ(a.u, 320);
  EXPECT_DOUBLE_EQ(a.v, 240);
  const ImagePoint b = project_point(kIntr, {1, 0, 10});
  EXPECT_DOUBLE_EQ(b.u, 370);
  EXPECT_DOUBLE_EQ(b.v, 240);
  try {
    project_point(kIntr, {0, 0, -1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BehindCamera);
  }
}

TEST(ProjectProperty, ScaleInvariance) {
  Gen g(303);
  for (int k = 0; k < 10000; ++k) {
    const Point3 p{g.uniform(-10, 10), g.uniform(-10, 10), g.uniform(0.5, 80)};
    const double s = g.uniform(1.0, 50.0);
    const ImagePoint a = project_point(kIntr, p), b = project_point(kIntr, s * p);
    EXPECT_NEAR(a.u, b.u, 1e-9);
    EXPECT_NEAR(a.v, b.v, 1e-9);
  }
}

TEST(NearPlane, Examples) {
  const Polygon3 front{{{-1, 0, 5}, {1, 0, 5}, {1, 1, 8}}};
  const auto kept = clip_near_plane(front, 0.1);
  ASSERT_TRUE(kept);
  EXPECT_EQ(kept->vertices, front.vertices);
  EXPECT_FALSE(clip_near_plane(Polygon3{{{-1, 0, -5}, {1, 0, -5}, {1, 1, 0.05}}}, 0.1));
  // Edge from z = -1 to z = 3 crosses z_near = 0.1 at t = 1.1 / 4.
  const auto cut = clip_near_plane(Polygon3{{{0, 0, -1}, {4, 0, 3}, {0, 4, 3}}}, 0.1);
  ASSERT_TRUE(cut);
  bool found = false;
  for (Point3 p : cut->vertices) {
    EXPECT_GE(p.z, 0.1);
    if (std::abs(p.x - 4 * 1.1 / 4) < 1e-12 && p.y == 0) {
      found = true;
      EXPECT_EQ(p.z, 0.1);
    }
  }
  EXPECT_TRUE(found);
}

TEST(ProjectPolygon, LevelCameraSeesSymmetricTrapezoid) {
  const CameraExtrinsics e = CameraExtrinsics::from_mount({0, 0, 1.5}, 0, 0, 0);
  ASSERT_TRUE(is_valid(e));
  const Polygon3 ground{{{5, -2, 0}, {30, -2, 0}, {30, 2, 0}, {5, 2, 0}}};
  const auto img = project_polygon(ground, e, kIntr, {});
  ASSERT_TRUE(img);
  ASSERT_EQ(img->size(), 4u);
  const auto& q = *img;
  // Mirror pairs about u = cx; near edge lower in the image than the far edge.
  EXPECT_NEAR(q[0].u - 320, 320 - q[3].u, 1e-9);
  EXPECT_NEAR(q[1].u - 320, 320 - q[2].u, 1e-9);
  EXPECT_NEAR(q[0].v, q[3].v, 1e-9);
  EXPECT_NEAR(q[1].v, q[2].v, 1e-9);
  EXPECT_GT(q[0].v, q[1].v);
  EXPECT_NEAR(q[0].v, 240 + 500 * 1.5 / 5, 1e-9);
  for (const ImagePoint& p : q) EXPECT_GT(p.v, 240);  // below the horizon
}

TEST(ProjectPolygon, CorridorFromBehindStartsAtNearPlane) {
  const CameraExtrinsics e = CameraExtrinsics::from_mount({1.5, 0, 1.4}, 0, 0.1, 0);
  const Polygon3 ground{{{0.5, -2, 0}, {40, -2, 0}, {40, 2, 0}, {0.5, 2, 0}}};  // starts 1 m behind the camera
  Polygon3 cam;
  for (Point3 p : ground.vertices) cam.vertices.push_back(leveled_to_optical(p, e, {}, true));
  const auto clipped = clip_near_plane(cam, 0.1);
  ASSERT_TRUE(clipped);
  double zmin = INFINITY;
  for (Point3 p : clipped->vertices) zmin = std::min(zmin, p.z);
  EXPECT_EQ(zmin, 0.1);
  const auto img = project_polygon(ground, e, kIntr, {});
  ASSERT_TRUE(img);
  for (const ImagePoint& p : *img) EXPECT_TRUE(std::isfinite(p.u) && std::isfinite(p.v));
}

TEST(ProjectPolygonProperty, CompensationCancelsBodyTilt) {
  Gen g(305);
  for (int trial = 0; trial < 500; ++trial) {
    const CameraExtrinsics e = CameraExtrinsics::from_mount({g.uniform(1, 2), g.uniform(-0.3, 0.3), g.uniform(1, 2)},
                                                            g.uniform(-0.02, 0.02), g.uniform(0.0, 0.15),
                                                            g.uniform(-0.05, 0.05));
    const TiltState t{g.uniform(-0.087, 0.087), g.uniform(-0.087, 0.087)};
    Polygon3 world;
    for (int k = 0; k < 8; ++k) world.vertices.push_back({g.uniform(4, 60), g.uniform(-6, 6), g.uniform(-0.5, 0.5)});
    // A body tilted by t sees the world rotated by R(t); compensation must undo it.
    Polygon3 tilted;
    const Eigen::Matrix3d r = body_to_leveled(t);
    for (Point3 p : world.vertices) {
      const Eigen::Vector3d q = r * Eigen::Vector3d(p.x, p.y, p.z);
      tilted.vertices.push_back({q.x(), q.y(), q.z()});
    }
    const auto a = project_polygon(world, e, kIntr, {});
    const auto b = project_polygon(tilted, e, kIntr, t);
    ASSERT_TRUE(a && b);
    ASSERT_EQ(a->size(), b->size());
    for (std::size_t k = 0; k < a->size(); ++k) {
      EXPECT_LT(std::abs((*a)[k].u - (*b)[k].u), 1e-6);
      EXPECT_LT(std::abs((*a)[k].v - (*b)[k].v), 1e-6);
    }
  }
}

TEST(Raster, Examples) {
  const CameraIntrinsics small{100, 100, 32, 24, 64, 48};
  const std::vector<ImagePolygon> full{square(0, 0, 64, 48)};
  EXPECT_EQ(rasterize_mask(full, {}, small).count(), 64u * 48u);
  const std::vector<ImagePolygon> sq{square(10, 10, 20, 20)};
  const Mask m = rasterize_mask(sq, {}, small);
  EXPECT_EQ(m.count(), 100u);
  for (int y = 10; y < 20; ++y)
    for (int x = 10; x < 20; ++x) EXPECT_EQ(m.at(x, y), 1);
  EXPECT_EQ(rasterize_mask(sq, sq, small).count(), 0u);
  // Out-of-bounds parts are silently dropped.
  const std::vector<ImagePolygon> huge{square(-100, -100, 1000, 1000)};
  EXPECT_EQ(rasterize_mask(huge, {}, small).count(), 64u * 48u);
}

TEST(RasterProperty, ParallelSerialAndBruteForceAgree) {
  Gen g(307);
  const CameraIntrinsics intr{100, 100, 40, 30, 80, 60};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ImagePolygon> add, sub;
    for (int k = 0, n = g.integer(1, 3); k < n; ++k) {
      ImagePolygon p;
      for (int v = 0, m = g.integer(3, 9); v < m; ++v) p.push_back({g.uniform(-20, 100), g.uniform(-20, 80)});
      add.push_back(p);
    }
    for (int k = 0, n = g.integer(0, 4); k < n; ++k) {
      const double x = g.uniform(-5, 80), y = g.uniform(-5, 60);
      sub.push_back(square(x, y, x + g.uniform(0.2, 20), y + g.uniform(0.2, 20)));
    }
    // Integer and half-integer vertices hit pixel centres and row lines exactly.
    if (trial % 3 == 0)
      for (auto& p : add)
        for (auto& v : p) v = {std::round(2 * v.u) / 2, std::round(2 * v.v) / 2};
    const Mask par = rasterize_mask(add, sub, intr);
    const Mask ser = rasterize_mask_serial(add, sub, intr);
    EXPECT_EQ(par, ser) << "trial " << trial;
    std::vector<std::uint8_t> bits;
    EXPECT_EQ(ser.count(), brute_count(add, sub, intr.width, intr.height, &bits));
    EXPECT_EQ(ser.bits, bits) << "trial " << trial;
    EXPECT_LE(par.count(), rasterize_mask(add, {}, intr).count());
  }
}

TEST(Extrinsics, MountRotationIsProper) {
  Gen g(309);
  for (int k = 0; k < 100; ++k) {
    const CameraExtrinsics e = CameraExtrinsics::from_mount({0, 0, 0}, g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-3, 3));
    EXPECT_TRUE(is_valid(e));
  }
  const CameraExtrinsics level = CameraExtrinsics::from_mount({0, 0, 1}, 0, 0, 0);
  const Point3 ahead = leveled_to_optical({10, 0, 1}, level, {}, true);
  EXPECT_NEAR(ahead.x, 0, 1e-12);
  EXPECT_NEAR(ahead.y, 0, 1e-12);
  EXPECT_NEAR(ahead.z, 10, 1e-12);
  const Point3 left = leveled_to_optical({10, 1, 1}, level, {}, true);
  EXPECT_LT(left.x, 0);  // vehicle-left is image-left
  const Point3 below = leveled_to_optical({10, 0, 0}, level, {}, true);
  EXPECT_GT(below.y, 0);  // ground is image-down
  CameraExtrinsics bad = level;
  bad.rotation(0, 0) = 2;
  EXPECT_FALSE(is_valid(bad));
}
