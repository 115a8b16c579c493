#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "egocorridor/geometry.hpp"

namespace testing_support {

using egocorridor::Point2;
using egocorridor::Polygon2;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Star-shaped ring around `c`: sorted angles, random radii. Always simple and CCW.
inline Polygon2 random_star(Gen& g, Point2 c = {}, double rmin = 1.0, double rmax = 10.0) {
  const int n = g.integer(3, 24);
  std::vector<double> ang(static_cast<std::size_t>(n));
  for (double& a : ang) a = g.uniform(0.0, 2.0 * std::numbers::pi);
  std::sort(ang.begin(), ang.end());
  Polygon2 p;
  for (std::size_t i = 0; i < ang.size(); ++i) {
    if (i > 0 && ang[i] - ang[i - 1] < 1e-3) continue;
    const double r = g.uniform(rmin, rmax);
    p.vertices.push_back({c.x + r * std::cos(ang[i]), c.y + r * std::sin(ang[i])});
  }
  // The centre must be strictly inside the angular fan, so no gap may reach pi.
  double gap = 2.0 * std::numbers::pi - (ang.back() - ang.front());
  for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  if (p.vertices.size() < 3 || gap >= 0.95 * std::numbers::pi) return random_star(g, c, rmin, rmax);
  return p;
}

inline double segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double l2 = egocorridor::dot(d, d);
  const double t = l2 > 0 ? std::clamp(egocorridor::dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
  return egocorridor::distance(p, a + t * d);
}

inline double boundary_distance(Point2 p, const Polygon2& poly) {
  double best = INFINITY;
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) best = std::min(best, segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return best;
}

/// Winding number; test-side membership reference.
inline int winding(Point2 p, const Polygon2& poly) {
  int w = 0;
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    const double o = egocorridor::cross(b - a, p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && o > 0) ++w;
    } else if (b.y <= p.y && o < 0) {
      --w;
    }
  }
  return w;
}

inline Polygon2 rect(double x0, double y0, double x1, double y1) { return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}}; }

}  // namespace testing_support
