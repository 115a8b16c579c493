#include <gtest/gtest.h>

#include <cstdint>

#include "egocorridor/error.hpp"
#include "egocorridor/occlusion.hpp"
#include "support.hpp"

using namespace egocorridor;
using namespace testing_support;

namespace {

OccupancyGrid empty_grid(int w, int h, double res = 1.0, Point2 origin = {}) {
  return {origin, res, w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0)};
}

void set_obstacle(OccupancyGrid& g, int i, int j) { g.cells[static_cast<std::size_t>(j) * g.width + i] = 1; }

// Exact brute force in quarter-cell integer units: the closed segment from the
// sensor to the target centre touches the closed square of an obstacle cell.
bool touches(std::int64_t px, std::int64_t py, std::int64_t qx, std::int64_t qy, int ci, int cj) {
  const std::int64_t x0 = 4 * ci, y0 = 4 * cj, x1 = x0 + 4, y1 = y0 + 4;
  if (std::max(px, qx) < x0 || std::min(px, qx) > x1 || std::max(py, qy) < y0 || std::min(py, qy) > y1) return false;
  int pos = 0, neg = 0;
  for (auto [cx, cy] : {std::pair{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}) {
    const std::int64_t o = (qx - px) * (cy - py) - (qy - py) * (cx - px);
    pos += o > 0;
    neg += o < 0;
  }
  return pos != 4 && neg != 4;
}

std::vector<CellState> brute_force(const OccupancyGrid& g, std::int64_t sx4, std::int64_t sy4) {
  std::vector<CellState> out(g.cells.size(), CellState::Visible);
  for (int j = 0; j < g.height; ++j)
    for (int i = 0; i < g.width; ++i) {
      auto& c = out[static_cast<std::size_t>(j) * g.width + i];
      if (g.obstacle(i, j)) {
        c = CellState::Obstacle;
        continue;
      }
      for (int b = 0; b < g.height && c == CellState::Visible; ++b)
        for (int a = 0; a < g.width; ++a)
          if (g.obstacle(a, b) && touches(sx4, sy4, 4 * i + 2, 4 * j + 2, a, b)) {
            c = CellState::Occluded;
            break;
          }
    }
  return out;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Visibility, EmptyGridAllVisible) {
  const auto vis = visibility_from(empty_grid(20, 15, 0.2, {-2, -1.5}), {0.1, 0.05});
  for (CellState c : vis.cells) EXPECT_EQ(c, CellState::Visible);
}

TEST(Visibility, ShadowBehindSingleObstacleOnAxis) {
  OccupancyGrid g = empty_grid(16, 8);
  set_obstacle(g, 5, 0);
  const auto vis = visibility_from(g, {0.5, 0.5});
  EXPECT_EQ(vis.at(5, 0), CellState::Obstacle);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(vis.at(i, 0), CellState::Visible);
  for (int i = 6; i < 16; ++i) EXPECT_EQ(vis.at(i, 0), CellState::Occluded) << i;
  EXPECT_EQ(vis.at(0, 0), CellState::Visible);
}

TEST(Visibility, AdjacentObstacleShadowsEverythingCollinear) {
  OccupancyGrid g = empty_grid(20, 20);
  set_obstacle(g, 11, 11);
  const auto vis = visibility_from(g, {10.5, 10.5});
  for (int k = 12; k < 20; ++k) EXPECT_EQ(vis.at(k, k), CellState::Occluded) << k;
  const auto ref = brute_force(g, 42, 42);
  EXPECT_EQ(vis.cells, ref);
}

TEST(Visibility, Errors) {
  OccupancyGrid g = empty_grid(4, 4);
  set_obstacle(g, 1, 1);
  EXPECT_EQ(kind_of([&] { visibility_from(g, {-0.1, 0.5}); }), ErrorKind::SensorOutOfGrid);
  EXPECT_EQ(kind_of([&] { visibility_from(g, {4.0, 0.5}); }), ErrorKind::SensorOutOfGrid);
  EXPECT_EQ(kind_of([&] { visibility_from(g, {1.5, 1.5}); }), ErrorKind::SensorInsideObstacle);
}

TEST(VisibilityProperty, MatchesBruteForceOnRandomGrids) {
  Gen gen(101);
  for (int trial = 0; trial < 150; ++trial) {
    OccupancyGrid g = empty_grid(32, 32, 1.0);
    for (int k = 0, n = gen.integer(0, 10); k < n; ++k) set_obstacle(g, gen.integer(0, 31), gen.integer(0, 31));
    std::int64_t sx4, sy4;
    do {
      sx4 = gen.integer(0, 127);
      sy4 = gen.integer(0, 127);
    } while (g.obstacle(static_cast<int>(sx4 / 4), static_cast<int>(sy4 / 4)));
    const Point2 sensor{sx4 / 4.0, sy4 / 4.0};
    const auto vis = visibility_from(g, sensor);
    const auto ser = visibility_from_serial(g, sensor);
    EXPECT_EQ(vis.cells, ser.cells);
    EXPECT_EQ(vis.cells, brute_force(g, sx4, sy4)) << "trial " << trial;
  }
}

TEST(VisibilityProperty, SerialAndParallelAgreeOnScaledGrids) {
  Gen gen(103);
  for (int trial = 0; trial < 20; ++trial) {
    OccupancyGrid g = empty_grid(120, 90, 0.2, {gen.uniform(-20, 0), gen.uniform(-10, 0)});
    for (auto& c : g.cells) c = gen.chance(0.03);
    const Point2 s{g.origin.x + gen.uniform(1, 23), g.origin.y + gen.uniform(1, 17)};
    const int si = static_cast<int>((s.x - g.origin.x) / 0.2), sj = static_cast<int>((s.y - g.origin.y) / 0.2);
    g.cells[static_cast<std::size_t>(sj) * g.width + si] = 0;
    const CellWindow w{gen.integer(0, 50), gen.integer(0, 40), gen.integer(60, 120), gen.integer(50, 90)};
    EXPECT_EQ(visibility_from(g, s).cells, visibility_from_serial(g, s).cells);
    EXPECT_EQ(visibility_from(g, s, w).cells, visibility_from_serial(g, s, w).cells);
  }
}

TEST(VisibilityProperty, MonotoneInObstacles) {
  Gen gen(107);
  for (int trial = 0; trial < 100; ++trial) {
    OccupancyGrid g = empty_grid(40, 40);
    for (int k = 0; k < 15; ++k) set_obstacle(g, gen.integer(0, 39), gen.integer(0, 39));
    const Point2 s{20.5, 20.5};
    g.cells[20 * 40 + 20] = 0;
    const auto before = visibility_from(g, s);
    int ai, aj;
    do {
      ai = gen.integer(0, 39);
      aj = gen.integer(0, 39);
    } while (ai == 20 && aj == 20);
    set_obstacle(g, ai, aj);
    const auto after = visibility_from(g, s);
    for (std::size_t k = 0; k < before.cells.size(); ++k)
      if (before.cells[k] != CellState::Visible) EXPECT_NE(after.cells[k], CellState::Visible);
    // Every cell carries exactly one state; the sensor cell is visible; obstacles mirror the input.
    EXPECT_EQ(after.at(20, 20), CellState::Visible);
    for (std::size_t k = 0; k < g.cells.size(); ++k) EXPECT_EQ(after.cells[k] == CellState::Obstacle, g.cells[k] != 0);
  }
}

TEST(OccludedPolygons, Examples) {
  VisibilityGrid vis{{-3, 2}, 0.5, 6, 4, std::vector<CellState>(24, CellState::Visible)};
  EXPECT_TRUE(occluded_polygons(vis).empty());

  vis.cells[2 * 6 + 3] = CellState::Occluded;
  auto polys = occluded_polygons(vis);
  ASSERT_EQ(polys.size(), 1u);
  const Bounds2 bb = bounding_box(polys[0].vertices);
  EXPECT_DOUBLE_EQ(bb.min.x, -3 + 3 * 0.5);
  EXPECT_DOUBLE_EQ(bb.min.y, 2 + 2 * 0.5);
  EXPECT_DOUBLE_EQ(bb.max.x, -3 + 4 * 0.5);
  EXPECT_DOUBLE_EQ(bb.max.y, 2 + 3 * 0.5);

  vis.cells[2 * 6 + 4] = CellState::Obstacle;
  polys = occluded_polygons(vis);
  double area = 0;
  for (const auto& p : polys) area += polygon_area(p);
  EXPECT_NEAR(area, 2 * 0.25, 1e-12);
}

TEST(OccludedPolygonsProperty, CoverExactlyTheHiddenCells) {
  Gen gen(109);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = gen.integer(1, 30), h = gen.integer(1, 30);
    VisibilityGrid vis{{gen.uniform(-5, 5), gen.uniform(-5, 5)}, 0.2, w, h,
                       std::vector<CellState>(static_cast<std::size_t>(w) * h)};
    std::size_t hidden = 0;
    for (auto& c : vis.cells) {
      c = static_cast<CellState>(gen.integer(0, 2));
      hidden += c != CellState::Visible;
    }
    const auto polys = occluded_polygons(vis);
    double area = 0;
    for (const auto& p : polys) {
      EXPECT_TRUE(is_valid(p));
      area += polygon_area(p);
    }
    EXPECT_NEAR(area, hidden * 0.04, 1e-9);
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i) {
        const Point2 c{vis.origin.x + (i + 0.5) * 0.2, vis.origin.y + (j + 0.5) * 0.2};
        int inside = 0;
        for (const auto& p : polys) inside += point_in_polygon(c, p);
        EXPECT_EQ(inside, vis.at(i, j) != CellState::Visible ? 1 : 0);
      }
  }
}
