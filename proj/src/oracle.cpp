#include "egocorridor/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <Eigen/Geometry>

#include "egocorridor/error.hpp"

namespace egocorridor {

// Everything in this file deliberately re-derives the geometry instead of
// calling the pipeline operations.
namespace {

// --- polyline handling --------------------------------------------------

std::vector<double> cumulative_arc(const std::vector<Point2>& v) {
  std::vector<double> cum(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) cum[i] = cum[i - 1] + std::hypot(v[i].x - v[i - 1].x, v[i].y - v[i - 1].y);
  return cum;
}

Point2 point_at_arc(const std::vector<Point2>& v, const std::vector<double>& cum, double s) {
  const auto it = std::lower_bound(cum.begin(), cum.end(), s);
  if (it == cum.begin()) return v.front();
  if (it == cum.end()) return v.back();
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  const double len = cum[i] - cum[i - 1];
  const double t = len > 0.0 ? std::clamp((s - cum[i - 1]) / len, 0.0, 1.0) : 0.0;
  return {v[i - 1].x + t * (v[i].x - v[i - 1].x), v[i - 1].y + t * (v[i].y - v[i - 1].y)};
}

std::vector<Point2> sample_every(const std::vector<Point2>& v, double step) {
  const auto cum = cumulative_arc(v);
  const double total = cum.back();
  std::vector<Point2> out{v.front()};
  if (total >= step)
    for (std::size_t k = 1; static_cast<double>(k) * step < total - 1e-9; ++k)
      out.push_back(point_at_arc(v, cum, static_cast<double>(k) * step));
  out.push_back(v.back());
  return out;
}

std::vector<Point2> cut_at(const std::vector<Point2>& v, double max_len) {
  const auto cum = cumulative_arc(v);
  std::vector<Point2> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (cum[i] >= max_len - 1e-9) {
      const Point2 end = point_at_arc(v, cum, std::min(max_len, cum.back()));
      if (out.empty() || std::hypot(end.x - out.back().x, end.y - out.back().y) > 1e-9) out.push_back(end);
      return out;
    }
    out.push_back(v[i]);
  }
  return out;
}

double knot_value(const std::vector<OffsetKnot>& knots, double s) {
  if (knots.empty()) return 0.0;
  if (s <= knots.front().arc_length) return knots.front().offset;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (s <= knots[i].arc_length) {
      const double w = (s - knots[i - 1].arc_length) / (knots[i].arc_length - knots[i - 1].arc_length);
      return (1.0 - w) * knots[i - 1].offset + w * knots[i].offset;
    }
  }
  return knots.back().offset;
}

std::vector<Point2> shifted(const std::vector<Point2>& v, const std::vector<OffsetKnot>& knots) {
  if (knots.empty()) return v;
  const auto cum = cumulative_arc(v);
  std::vector<Point2> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i == 0 ? 0 : i - 1];
    const Point2 b = v[std::min(i + 1, v.size() - 1)];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double off = knot_value(knots, cum[i]);
    out[i] = len > 0.0 ? Point2{v[i].x - off * (b.y - a.y) / len, v[i].y + off * (b.x - a.x) / len} : v[i];
  }
  return out;
}

// --- ring predicates ----------------------------------------------------

double ring_area2(const std::vector<Point2>& r) {
  double a = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Point2 p = r[i], q = r[(i + 1) % r.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return a;
}

double orient(Point2 a, Point2 b, Point2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool proper_or_touching(Point2 a, Point2 b, Point2 c, Point2 d) {
  // Parametric solve; collinear pairs fall back to interval overlap.
  const double den = (b.x - a.x) * (d.y - c.y) - (b.y - a.y) * (d.x - c.x);
  if (den == 0.0) {
    if (orient(a, b, c) != 0.0) return false;
    const bool use_x = std::abs(b.x - a.x) >= std::abs(b.y - a.y);
    auto key = [&](Point2 p) { return use_x ? p.x : p.y; };
    const double lo1 = std::min(key(a), key(b)), hi1 = std::max(key(a), key(b));
    const double lo2 = std::min(key(c), key(d)), hi2 = std::max(key(c), key(d));
    return std::max(lo1, lo2) <= std::min(hi1, hi2);
  }
  const double t = ((c.x - a.x) * (d.y - c.y) - (c.y - a.y) * (d.x - c.x)) / den;
  const double u = ((c.x - a.x) * (b.y - a.y) - (c.y - a.y) * (b.x - a.x)) / den;
  return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

bool ring_self_intersects(const std::vector<Point2>& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (proper_or_touching(r[i], r[(i + 1) % n], r[j], r[(j + 1) % n])) return true;
    }
  return false;
}

bool near_edge(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double l2 = dx * dx + dy * dy;
  const double t = l2 > 0.0 ? std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / l2, 0.0, 1.0) : 0.0;
  return std::hypot(p.x - a.x - t * dx, p.y - a.y - t * dy) <= 1e-9;
}

/// Winding-number membership, boundary counts as inside.
bool in_ring(const std::vector<Point2>& r, Point2 p) {
  int winding = 0;
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = r[i], b = r[(i + 1) % n];
    if (near_edge(p, a, b)) return true;
    if (a.y <= p.y) {
      if (b.y > p.y && orient(a, b, p) > 0.0) ++winding;
    } else if (b.y <= p.y && orient(a, b, p) < 0.0) {
      --winding;
    }
  }
  return winding != 0;
}

// --- objects ------------------------------------------------------------

struct Box {
  Point2 center;
  Point2 along;   // unit heading
  Point2 across;  // unit left
  double half_len;
  double half_wid;
};

Box box_of(const TrackedObject& o) {
  const Point2 h{std::cos(o.yaw), std::sin(o.yaw)};
  return {o.center, h, {-h.y, h.x}, 0.5 * o.length, 0.5 * o.width};
}

Point2 to_box(const Box& b, Point2 p) {
  const double dx = p.x - b.center.x, dy = p.y - b.center.y;
  return {dx * b.along.x + dy * b.along.y, dx * b.across.x + dy * b.across.y};
}

/// Liang-Barsky: does segment pq (world) touch the closed box?
bool segment_hits_box(const Box& b, Point2 p, Point2 q) {
  const Point2 a = to_box(b, p), c = to_box(b, q);
  double t0 = 0.0, t1 = 1.0;
  const double dx = c.x - a.x, dy = c.y - a.y;
  const std::array<double, 4> pp{-dx, dx, -dy, dy};
  const std::array<double, 4> qq{a.x + b.half_len, b.half_len - a.x, a.y + b.half_wid, b.half_wid - a.y};
  for (std::size_t k = 0; k < 4; ++k) {
    if (pp[k] == 0.0) {
      if (qq[k] < 0.0) return false;
      continue;
    }
    const double r = qq[k] / pp[k];
    if (pp[k] < 0.0) t0 = std::max(t0, r);
    else t1 = std::min(t1, r);
    if (t0 > t1) return false;
  }
  return true;
}

bool box_meets_ring(const Box& b, const std::vector<Point2>& ring) {
  const std::array<Point2, 4> corners{
      Point2{b.center.x + b.half_len * b.along.x + b.half_wid * b.across.x,
             b.center.y + b.half_len * b.along.y + b.half_wid * b.across.y},
      Point2{b.center.x + b.half_len * b.along.x - b.half_wid * b.across.x,
             b.center.y + b.half_len * b.along.y - b.half_wid * b.across.y},
      Point2{b.center.x - b.half_len * b.along.x + b.half_wid * b.across.x,
             b.center.y - b.half_len * b.along.y + b.half_wid * b.across.y},
      Point2{b.center.x - b.half_len * b.along.x - b.half_wid * b.across.x,
             b.center.y - b.half_len * b.along.y - b.half_wid * b.across.y}};
  for (Point2 c : corners)
    if (in_ring(ring, c)) return true;
  for (std::size_t i = 0; i < ring.size(); ++i)
    if (segment_hits_box(b, ring[i], ring[(i + 1) % ring.size()])) return true;
  return false;
}

struct CutLine {
  Point2 anchor;
  Point2 keep;  // points into the kept side
};

CutLine cut_line_for(const TrackedObject& o, const std::vector<Point2>& left, const std::vector<Point2>& right,
                     const std::vector<Point2>& ring, double threshold_rad) {
  const Box b = box_of(o);
  bool ahead = o.object_class == ObjectClass::Cone || o.object_class == ObjectClass::Bollard;
  if (!ahead) {
    double best = std::numeric_limits<double>::infinity();
    double tangent = 0.0;
    for (const auto* chain : {&left, &right}) {
      for (std::size_t i = 1; i < chain->size(); ++i) {
        const Point2 a = (*chain)[i - 1], c = (*chain)[i];
        const double dx = c.x - a.x, dy = c.y - a.y;
        const double l2 = dx * dx + dy * dy;
        if (l2 == 0.0) continue;
        const double t = std::clamp(((o.center.x - a.x) * dx + (o.center.y - a.y) * dy) / l2, 0.0, 1.0);
        const double d = std::hypot(o.center.x - a.x - t * dx, o.center.y - a.y - t * dy);
        if (d < best) {
          best = d;
          tangent = std::atan2(dy, dx);
        }
      }
    }
    // Acute angle between the two undirected lines.
    double diff = std::fmod(std::abs(o.yaw - tangent), std::numbers::pi);
    diff = std::min(diff, std::numbers::pi - diff);
    ahead = diff <= threshold_rad + 1e-12;
  }
  const Point2 axis = ahead ? b.along : b.across;
  const double half = ahead ? b.half_len : b.half_wid;
  const Point2 p1{b.center.x + half * axis.x, b.center.y + half * axis.y};
  const Point2 p2{b.center.x - half * axis.x, b.center.y - half * axis.y};
  const bool first = std::hypot(p1.x, p1.y) < std::hypot(p2.x, p2.y);
  const Point2 anchor = first ? p1 : p2;
  // Ego sits at the origin of the leveled frame.
  double side = -(anchor.x * axis.x + anchor.y * axis.y);
  if (std::abs(side) <= 1e-9 && !ring.empty()) {
    const Point2 nearest = *std::min_element(ring.begin(), ring.end(), [](Point2 a, Point2 c) {
      return std::hypot(a.x, a.y) < std::hypot(c.x, c.y);
    });
    side = (nearest.x - anchor.x) * axis.x + (nearest.y - anchor.y) * axis.y;
  }
  Point2 keep = axis;
  if (side < 0.0 || (side == 0.0 && !first)) keep = {-axis.x, -axis.y};
  return {anchor, keep};
}

// --- terrain ------------------------------------------------------------

struct Terrain {
  const HeightMap* map = nullptr;
  double fallback = 0.0;   // map-frame altitude used off the map
  double ego_z = 0.0;
  Pose ego;
  double cos_yaw = 1.0;
  double sin_yaw = 0.0;
  double zmin = 0.0;       // leveled-frame bounds of the surface
  double zmax = 0.0;
  // Slope bound of the surface inside the corridor box, or +inf when that
  // region touches empty cells (nearest-cell and fallback lookups jump).
  double lipschitz = std::numeric_limits<double>::infinity();

  double cell(int i, int j, bool& ok) const {
    ok = i >= 0 && j >= 0 && i < map->width && j < map->height && map->count[static_cast<std::size_t>(j) * map->width + i] > 0;
    return ok ? map->mean[static_cast<std::size_t>(j) * map->width + i] : 0.0;
  }

  double altitude(double mx, double my) const {
    const double gx = (mx - map->origin.x) / map->resolution - 0.5;
    const double gy = (my - map->origin.y) / map->resolution - 0.5;
    const double fi = std::floor(gx), fj = std::floor(gy);
    if (!(fi >= -5.0 && fj >= -5.0 && fi <= map->width + 5.0 && fj <= map->height + 5.0)) return fallback;
    const int i = static_cast<int>(fi), j = static_cast<int>(fj);
    const double tx = gx - fi, ty = gy - fj;
    double num = 0.0, den = 0.0;
    bool ok = false;
    const double w00 = (1 - tx) * (1 - ty), w10 = tx * (1 - ty), w01 = (1 - tx) * ty, w11 = tx * ty;
    double v = cell(i, j, ok);
    if (ok) num += w00 * v, den += w00;
    v = cell(i + 1, j, ok);
    if (ok) num += w10 * v, den += w10;
    v = cell(i, j + 1, ok);
    if (ok) num += w01 * v, den += w01;
    v = cell(i + 1, j + 1, ok);
    if (ok) num += w11 * v, den += w11;
    if (den > 1e-12) return num / den;
    const int ci = static_cast<int>(std::floor(gx + 0.5)), cj = static_cast<int>(std::floor(gy + 0.5));
    double best = std::numeric_limits<double>::infinity(), out = fallback;
    for (int b = cj - 3; b <= cj + 3; ++b)
      for (int a = ci - 3; a <= ci + 3; ++a) {
        v = cell(a, b, ok);
        if (!ok) continue;
        const double cx = map->origin.x + (a + 0.5) * map->resolution;
        const double cy = map->origin.y + (b + 0.5) * map->resolution;
        const double d = std::hypot(cx - mx, cy - my);
        if (d < best) best = d, out = v;
      }
    return out;
  }

  /// Surface height in the leveled frame at leveled (x, y).
  double height(double x, double y) const {
    if (map == nullptr) return 0.0;
    return altitude(ego.position.x + cos_yaw * x - sin_yaw * y, ego.position.y + sin_yaw * x + cos_yaw * y) - ego_z;
  }

  /// Bilinear patches are Lipschitz with the largest neighbour difference
  /// per axis; sqrt(2) covers both axes at once.
  void bound_slope(double x0, double y0, double x1, double y1) {
    double mx0 = INFINITY, my0 = INFINITY, mx1 = -INFINITY, my1 = -INFINITY;
    for (double x : {x0, x1})
      for (double y : {y0, y1}) {
        const double mx = ego.position.x + cos_yaw * x - sin_yaw * y;
        const double my = ego.position.y + sin_yaw * x + cos_yaw * y;
        mx0 = std::min(mx0, mx), my0 = std::min(my0, my), mx1 = std::max(mx1, mx), my1 = std::max(my1, my);
      }
    const int i0 = static_cast<int>(std::floor((mx0 - map->origin.x) / map->resolution - 0.5)) - 1;
    const int j0 = static_cast<int>(std::floor((my0 - map->origin.y) / map->resolution - 0.5)) - 1;
    const int i1 = static_cast<int>(std::floor((mx1 - map->origin.x) / map->resolution - 0.5)) + 2;
    const int j1 = static_cast<int>(std::floor((my1 - map->origin.y) / map->resolution - 0.5)) + 2;
    double steepest = 0.0;
    bool ok = false, ok2 = false;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const double v = cell(i, j, ok);
        if (!ok) return;
        if (i < i1) steepest = std::max(steepest, std::abs(cell(i + 1, j, ok2) - v));
        if (j < j1) steepest = std::max(steepest, std::abs(cell(i, j + 1, ok2) - v));
      }
    lipschitz = std::sqrt(2.0) * steepest / map->resolution * (1.0 + 1e-9) + 1e-12;
  }
};

/// Parameter interval in which the ray's ground track stays inside the box.
std::pair<double, double> box_span(const Eigen::Vector3d& o, const Eigen::Vector3d& d, double x0, double y0, double x1,
                                   double y1) {
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 2; ++axis) {
    const double a = axis == 0 ? x0 : y0, b = axis == 0 ? x1 : y1;
    if (d[axis] == 0.0) {
      if (o[axis] < a || o[axis] > b) return {1.0, 0.0};
      continue;
    }
    double ta = (a - o[axis]) / d[axis], tb = (b - o[axis]) / d[axis];
    if (ta > tb) std::swap(ta, tb);
    lo = std::max(lo, ta);
    hi = std::min(hi, tb);
  }
  return {lo, hi};
}

/// First terrain intersection, sampled every kOracleMarchStep along the ray.
/// Samples are skipped only where the slope bound proves the ray stays above
/// the surface, so the result equals that of the plain march. Hits beyond
/// `t_stop` are not needed by the caller and are not searched.
std::optional<Eigen::Vector3d> first_hit(const Terrain& terrain, const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                                         double t_box_in, double t_stop) {
  if (terrain.map == nullptr) {
    if (!(d.z() < 0.0)) return std::nullopt;
    const double t = -o.z() / d.z();
    if (!(t > 0.0)) return std::nullopt;
    return Eigen::Vector3d(o + t * d);
  }
  double t0 = 0.0;
  if (o.z() > terrain.zmax) {
    if (!(d.z() < 0.0)) return std::nullopt;
    t0 = (terrain.zmax - o.z()) / d.z();
  }
  auto gap = [&](double s) {
    const Eigen::Vector3d p = o + s * d;
    return p.z() - terrain.height(p.x(), p.y());
  };
  const double rate = std::abs(d.z()) + terrain.lipschitz * std::hypot(d.x(), d.y());
  const double step = kOracleMarchStep;
  double prev_t = t0;
  double prev_gap = gap(t0);
  if (prev_gap <= 0.0) return Eigen::Vector3d(o + t0 * d);
  long n = 1;
  while (true) {
    double t = t0 + static_cast<double>(n) * step;
    if (prev_t > t_stop) return std::nullopt;
    if (std::isfinite(rate) && prev_t >= t_box_in) {
      // The gap cannot reach zero before prev_t + prev_gap / rate.
      const long skip = static_cast<long>(std::floor(prev_gap / (rate * step))) - 1;
      if (skip > 1) {
        const long limit = static_cast<long>(std::floor((t_stop - t0) / step));
        n = std::min(n + skip - 1, std::max(n, limit));
        t = t0 + static_cast<double>(n) * step;
      }
    }
    const double g = gap(t);
    if (g <= 0.0) {
      // One bisection, then linear interpolation inside the remaining bracket.
      double lo = prev_t, hi = t, glo = prev_gap, ghi = g;
      const double mid = 0.5 * (lo + hi);
      const double gm = gap(mid);
      if (gm <= 0.0) hi = mid, ghi = gm;
      else lo = mid, glo = gm;
      const double th = ghi == glo ? hi : lo + (hi - lo) * glo / (glo - ghi);
      return Eigen::Vector3d(o + th * d);
    }
    if (o.z() + t * d.z() < terrain.zmin - 1.0 && d.z() <= 0.0) return std::nullopt;
    prev_t = t;
    prev_gap = g;
    ++n;
  }
}

// --- visibility ---------------------------------------------------------

/// Closed segment vs closed axis-aligned box, in grid cell units.
bool segment_touches_cell(Point2 p, Point2 q, double x0, double y0, double x1, double y1) {
  if (std::max(p.x, q.x) < x0 || std::min(p.x, q.x) > x1 || std::max(p.y, q.y) < y0 || std::min(p.y, q.y) > y1)
    return false;
  const std::array<double, 4> s{orient(p, q, {x0, y0}), orient(p, q, {x1, y0}), orient(p, q, {x1, y1}),
                                orient(p, q, {x0, y1})};
  const bool all_pos = std::all_of(s.begin(), s.end(), [](double v) { return v > 0.0; });
  const bool all_neg = std::all_of(s.begin(), s.end(), [](double v) { return v < 0.0; });
  return !all_pos && !all_neg;
}

}  // namespace

Mask render_reference(const SceneFrame& scene, const HeightMap* terrain_map, const PipelineConfig& config) {
  const double step = config.resample_step;
  const auto& lb = scene.bounds.left.vertices;
  const auto& rb = scene.bounds.right.vertices;
  if (lb.size() < 2 || rb.size() < 2 || cumulative_arc(lb).back() < 2.0 * step || cumulative_arc(rb).back() < 2.0 * step)
    throw Error(ErrorKind::InsufficientBoundary, "boundary shorter than two resampling steps");

  // Corridor ring in the map frame.
  std::vector<OffsetKnot> kl, kr;
  if (config.enable_shift)
    for (const ShiftKnot& k : scene.shift.knots) {
      kl.push_back({k.arc_length, k.shift_left});
      kr.push_back({k.arc_length, k.shift_right});
    }
  std::vector<Point2> left = sample_every(cut_at(shifted(sample_every(lb, step), kl), config.max_range), step);
  std::vector<Point2> right = sample_every(cut_at(shifted(sample_every(rb, step), kr), config.max_range), step);
  std::vector<Point2> ring = left;
  ring.insert(ring.end(), right.rbegin(), right.rend());
  if (std::hypot(ring.front().x - ring.back().x, ring.front().y - ring.back().y) <= 1e-9) ring.pop_back();
  for (std::size_t i = 1; i < ring.size(); ++i)
    if (std::hypot(ring[i].x - ring[i - 1].x, ring[i].y - ring[i - 1].y) <= 1e-9) {
      ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  if (ring_area2(ring) < 0.0) std::reverse(ring.begin(), ring.end());
  if (ring.size() < 3 || ring_self_intersects(ring))
    throw Error(ErrorKind::BoundaryCrossing, "left and right boundaries intersect within range");

  // Everything below works in the leveled frame.
  const double cy = std::cos(scene.ego.yaw), sy = std::sin(scene.ego.yaw);
  auto level = [&](Point2 p) {
    const double dx = p.x - scene.ego.position.x, dy = p.y - scene.ego.position.y;
    return Point2{cy * dx + sy * dy, -sy * dx + cy * dy};
  };
  for (auto* v : {&ring, &left, &right})
    for (Point2& p : *v) p = level(p);

  double rx0 = INFINITY, ry0 = INFINITY, rx1 = -INFINITY, ry1 = -INFINITY;
  for (Point2 p : ring) {
    rx0 = std::min(rx0, p.x), ry0 = std::min(ry0, p.y);
    rx1 = std::max(rx1, p.x), ry1 = std::max(ry1, p.y);
  }

  std::vector<CutLine> cuts;
  if (config.enable_objects) {
    const double thr = config.ahead_angle_threshold * std::numbers::pi / 180.0;
    for (const TrackedObject& o : scene.objects)
      if (box_meets_ring(box_of(o), ring)) cuts.push_back(cut_line_for(o, left, right, ring, thr));
  }

  // Camera in the leveled frame.
  const Eigen::Matrix3d tilt =
      config.enable_tilt ? Eigen::Matrix3d((Eigen::AngleAxisd(scene.ego.roll, Eigen::Vector3d::UnitX()) *
                                            Eigen::AngleAxisd(scene.ego.pitch, Eigen::Vector3d::UnitY()))
                                               .toRotationMatrix())
                         : Eigen::Matrix3d::Identity();
  const CameraExtrinsics extr = scene.extrinsics();
  const Eigen::Vector3d origin = tilt * extr.translation;
  const Eigen::Matrix3d ray_rot = tilt * extr.rotation;

  // Visibility per grid cell, precomputed over the corridor's footprint.
  const OccupancyGrid* grid = config.enable_occlusion && scene.grid ? &*scene.grid : nullptr;
  std::vector<std::uint8_t> hidden;
  int wi0 = 0, wj0 = 0, wi1 = 0, wj1 = 0;
  if (grid != nullptr) {
    const double res = grid->resolution;
    const Point2 sensor{(origin.x() - grid->origin.x) / res, (origin.y() - grid->origin.y) / res};
    if (!(sensor.x >= 0 && sensor.y >= 0 && sensor.x < grid->width && sensor.y < grid->height))
      throw Error(ErrorKind::SensorOutOfGrid, "camera ground position lies outside the occupancy grid");
    if (grid->obstacle(static_cast<int>(sensor.x), static_cast<int>(sensor.y)))
      throw Error(ErrorKind::SensorInsideObstacle, "camera ground position lies in an obstacle cell");
    wi0 = std::clamp(static_cast<int>(std::floor((rx0 - grid->origin.x) / res)) - 1, 0, grid->width);
    wj0 = std::clamp(static_cast<int>(std::floor((ry0 - grid->origin.y) / res)) - 1, 0, grid->height);
    wi1 = std::clamp(static_cast<int>(std::floor((rx1 - grid->origin.x) / res)) + 2, 0, grid->width);
    wj1 = std::clamp(static_cast<int>(std::floor((ry1 - grid->origin.y) / res)) + 2, 0, grid->height);
    std::vector<std::pair<int, int>> obstacles;
    for (int j = 0; j < grid->height; ++j)
      for (int i = 0; i < grid->width; ++i)
        if (grid->obstacle(i, j)) obstacles.emplace_back(i, j);
    const int ww = std::max(wi1 - wi0, 0);
    hidden.assign(static_cast<std::size_t>(ww) * std::max(wj1 - wj0, 0), 0);
#pragma omp parallel for schedule(dynamic, 2)
    for (int j = wj0; j < wj1; ++j)
      for (int i = wi0; i < wi1; ++i) {
        std::uint8_t h = grid->obstacle(i, j) ? 1 : 0;
        const Point2 target{i + 0.5, j + 0.5};
        for (std::size_t k = 0; k < obstacles.size() && !h; ++k) {
          const auto [oi, oj] = obstacles[k];
          if (oi == i && oj == j) continue;
          if (segment_touches_cell(sensor, target, oi, oj, oi + 1.0, oj + 1.0)) h = 1;
        }
        hidden[static_cast<std::size_t>(j - wj0) * ww + (i - wi0)] = h;
      }
  }

  Terrain terrain;
  if (config.enable_elevation && terrain_map != nullptr && terrain_map->width > 0) {
    terrain.map = terrain_map;
    terrain.ego = scene.ego;
    terrain.ego_z = scene.ego.position.z;
    terrain.fallback = scene.ego.position.z;
    double lo = terrain.fallback, hi = terrain.fallback;
    for (std::size_t k = 0; k < terrain_map->mean.size(); ++k)
      if (terrain_map->count[k] > 0) lo = std::min(lo, terrain_map->mean[k]), hi = std::max(hi, terrain_map->mean[k]);
    terrain.zmin = lo - terrain.ego_z;
    terrain.zmax = hi - terrain.ego_z;
    terrain.cos_yaw = std::cos(scene.ego.yaw);
    terrain.sin_yaw = std::sin(scene.ego.yaw);
    terrain.bound_slope(rx0, ry0, rx1, ry1);
  }
  const double t_max = 1.5 * config.max_range + 20.0;

  const CameraIntrinsics& in = scene.intr;
  Mask mask(in.width, in.height);
#pragma omp parallel for schedule(dynamic, 2)
  for (int v = 0; v < in.height; ++v) {
    for (int u = 0; u < in.width; ++u) {
      const Eigen::Vector3d ray =
          (ray_rot * Eigen::Vector3d((u + 0.5 - in.cx) / in.fx, (v + 0.5 - in.cy) / in.fy, 1.0)).normalized();
      // Hits outside the corridor's box leave the pixel unset, so the march
      // may stop where the ground track leaves it.
      const auto [t_in, t_out] = box_span(origin, ray, rx0, ry0, rx1, ry1);
      if (t_in > t_out) continue;
      const auto hit = first_hit(terrain, origin, ray, t_in, std::min(t_out, t_max));
      if (!hit || !hit->allFinite()) continue;
      const Point2 p{hit->x(), hit->y()};
      if (p.x < rx0 - 1e-9 || p.x > rx1 + 1e-9 || p.y < ry0 - 1e-9 || p.y > ry1 + 1e-9) continue;
      if (!in_ring(ring, p)) continue;
      bool kept = true;
      for (const CutLine& c : cuts)
        if ((p.x - c.anchor.x) * c.keep.x + (p.y - c.anchor.y) * c.keep.y < -1e-12) {
          kept = false;
          break;
        }
      if (!kept) continue;
      if (grid != nullptr) {
        const int i = static_cast<int>(std::floor((p.x - grid->origin.x) / grid->resolution));
        const int j = static_cast<int>(std::floor((p.y - grid->origin.y) / grid->resolution));
        if (i >= wi0 && j >= wj0 && i < wi1 && j < wj1 &&
            hidden[static_cast<std::size_t>(j - wj0) * (wi1 - wi0) + (i - wi0)])
          continue;
      }
      mask.bits[static_cast<std::size_t>(v) * in.width + u] = 1;
    }
  }
  return mask;
}

}  // namespace egocorridor
