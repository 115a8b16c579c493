#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "egocorridor/projection.hpp"

namespace egocorridor {

/// Interleaved 8-bit image with 1 (gray) or 3 (RGB) channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;
};

/// Binary PGM (P5), 255 = corridor.
std::string encode_pgm(const Mask& mask);
void write_pgm(const Mask& mask, const std::filesystem::path& path);
void write_mask_png(const Mask& mask, const std::filesystem::path& path);

/// PGM or PNG; any non-zero value is corridor.
Mask read_mask(const std::filesystem::path& path);

/// P5, P6 or PNG (gray, RGB; alpha dropped, 16-bit stripped).
Image read_image(const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);

/// Corridor pixels become round((1 - alpha) * src + alpha * tint) per
/// channel; the result is always RGB. Throws ShapeMismatch on size mismatch.
Image overlay(const Image& image, const Mask& mask, double alpha,
              std::array<std::uint8_t, 3> tint = {0, 255, 0});

}  // namespace egocorridor
