#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "egocorridor/projection.hpp"

namespace egocorridor {

namespace {

// Both rasterizers share these two expressions so their results agree bit for bit.
inline bool crosses_row(ImagePoint a, ImagePoint b, double y) { return (b.v > y) != (a.v > y); }
inline double crossing_u(ImagePoint a, ImagePoint b, double y) { return a.u + (y - a.v) * (b.u - a.u) / (b.v - a.v); }

bool even_odd_inside(const ImagePolygon& poly, double x, double y) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    if (crosses_row(poly[j], poly[i], y) && x < crossing_u(poly[j], poly[i], y)) inside = !inside;
  return inside;
}

struct Extent {
  double umin, umax, vmin, vmax;
};

Extent extent_of(const ImagePolygon& poly) {
  Extent e{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const ImagePoint& p : poly) {
    e.umin = std::min(e.umin, p.u);
    e.umax = std::max(e.umax, p.u);
    e.vmin = std::min(e.vmin, p.v);
    e.vmax = std::max(e.vmax, p.v);
  }
  return e;
}

/// Smallest column whose centre is >= x, clamped to [0, width].
int first_column_at_or_after(double x, int width) {
  if (!(x > 0.5)) return 0;
  if (x > width - 0.5) return width;
  int c = static_cast<int>(std::ceil(x - 0.5));
  while (c > 0 && c - 1 + 0.5 >= x) --c;
  while (c + 0.5 < x) ++c;
  return c;
}

/// Row buckets: for every image row, the polygons that may cross it.
std::vector<std::vector<std::uint32_t>> bucket_rows(std::span<const ImagePolygon> polys, int height) {
  std::vector<std::vector<std::uint32_t>> rows(static_cast<std::size_t>(height));
  for (std::size_t k = 0; k < polys.size(); ++k) {
    if (polys[k].size() < 3) continue;
    const Extent e = extent_of(polys[k]);
    if (!(e.vmax >= 0.0) || !(e.vmin <= height)) continue;
    const int r0 = std::max(0, static_cast<int>(std::floor(std::max(e.vmin, -1.0) - 0.5)));
    const int r1 = std::min(height - 1, static_cast<int>(std::ceil(std::min(e.vmax, height + 1.0))));
    for (int r = r0; r <= r1; ++r) rows[static_cast<std::size_t>(r)].push_back(static_cast<std::uint32_t>(k));
  }
  return rows;
}

void fill_row(const ImagePolygon& poly, double y, int width, std::uint8_t value, std::vector<double>& xs,
              std::uint8_t* row) {
  xs.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    if (crosses_row(poly[j], poly[i], y)) xs.push_back(crossing_u(poly[j], poly[i], y));
  std::sort(xs.begin(), xs.end());
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
    const int c0 = first_column_at_or_after(xs[k], width);
    const int c1 = first_column_at_or_after(xs[k + 1], width);
    for (int c = c0; c < c1; ++c) row[c] = value;
  }
}

}  // namespace

Mask rasterize_mask(std::span<const ImagePolygon> add, std::span<const ImagePolygon> subtract,
                    const CameraIntrinsics& intr) {
  Mask mask(intr.width, intr.height);
  const auto add_rows = bucket_rows(add, intr.height);
  const auto sub_rows = bucket_rows(subtract, intr.height);

#pragma omp parallel
  {
    std::vector<double> xs;
#pragma omp for schedule(dynamic, 8)
    for (int r = 0; r < intr.height; ++r) {
      std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(r) * intr.width;
      const double y = r + 0.5;
      for (std::uint32_t k : add_rows[static_cast<std::size_t>(r)]) fill_row(add[k], y, intr.width, 1, xs, row);
      for (std::uint32_t k : sub_rows[static_cast<std::size_t>(r)]) fill_row(subtract[k], y, intr.width, 0, xs, row);
    }
  }
  return mask;
}

Mask rasterize_mask_serial(std::span<const ImagePolygon> add, std::span<const ImagePolygon> subtract,
                           const CameraIntrinsics& intr) {
  Mask mask(intr.width, intr.height);
  std::vector<Extent> add_ext, sub_ext;
  for (const auto& p : add) add_ext.push_back(extent_of(p));
  for (const auto& p : subtract) sub_ext.push_back(extent_of(p));
  auto covered = [](std::span<const ImagePolygon> polys, const std::vector<Extent>& ext, double x, double y) {
    for (std::size_t k = 0; k < polys.size(); ++k) {
      if (polys[k].size() < 3 || x < ext[k].umin || x > ext[k].umax || y < ext[k].vmin || y > ext[k].vmax) continue;
      if (even_odd_inside(polys[k], x, y)) return true;
    }
    return false;
  };
  for (int r = 0; r < intr.height; ++r) {
    for (int c = 0; c < intr.width; ++c) {
      const double x = c + 0.5;
      const double y = r + 0.5;
      if (covered(add, add_ext, x, y) && !covered(subtract, sub_ext, x, y))
        mask.bits[static_cast<std::size_t>(r) * intr.width + c] = 1;
    }
  }
  return mask;
}

}  // namespace egocorridor
