#include "egocorridor/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <png.h>

#include "egocorridor/error.hpp"

namespace egocorridor {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_png(const std::string& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0;
}

// Netpbm header: magic, width, height, maxval, with '#' comments.
Image parse_pnm(const std::string& bytes, const std::filesystem::path& path) {
  std::size_t pos = 2;
  auto next_int = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    long v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos++] - '0');
      any = true;
      if (v > 1 << 20) break;
    }
    if (!any) throw Error(ErrorKind::IoError, "malformed netpbm header in " + path.string());
    return static_cast<int>(v);
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw Error(ErrorKind::IoError, "unsupported image format: " + path.string());
  Image img;
  img.channels = bytes[1] == '5' ? 1 : 3;
  img.width = next_int();
  img.height = next_int();
  const int maxval = next_int();
  if (maxval != 255 || img.width <= 0 || img.height <= 0)
    throw Error(ErrorKind::IoError, "only 8-bit netpbm images are supported: " + path.string());
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (bytes.size() < pos + n) throw Error(ErrorKind::IoError, "truncated image " + path.string());
  img.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

struct PngReadCtx {
  const std::string* bytes;
  std::size_t pos;
};

void png_read_fn(png_structp png, png_bytep out, png_size_t len) {
  auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
  if (ctx->pos + len > ctx->bytes->size()) png_error(png, "truncated PNG");
  std::copy_n(ctx->bytes->data() + ctx->pos, len, out);
  ctx->pos += len;
}

void png_error_fn(png_structp, png_const_charp msg) { throw Error(ErrorKind::IoError, std::string("libpng: ") + msg); }
void png_warning_fn(png_structp, png_const_charp) {}

Image parse_png(const std::string& bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};
  PngReadCtx ctx{&bytes, 0};
  png_set_read_fn(png, &ctx, png_read_fn);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  Image img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int r = 0; r < img.height; ++r) rows[r] = img.data.data() + static_cast<std::size_t>(r) * img.width * img.channels;
  png_read_image(png, rows.data());
  return img;
}

Image mask_image(const Mask& mask) {
  Image img{mask.width, mask.height, 1, {}};
  img.data.resize(mask.bits.size());
  for (std::size_t k = 0; k < mask.bits.size(); ++k) img.data[k] = mask.bits[k] ? 255 : 0;
  return img;
}

}  // namespace

std::string encode_pgm(const Mask& mask) {
  std::string out = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + mask.bits.size());
  for (std::size_t k = 0; k < mask.bits.size(); ++k) out[header + k] = static_cast<char>(mask.bits[k] ? 255 : 0);
  return out;
}

void write_pgm(const Mask& mask, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  const std::string bytes = encode_pgm(mask);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_mask_png(const Mask& mask, const std::filesystem::path& path) { write_png(mask_image(mask), path); }

Mask read_mask(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  const Image img = is_png(bytes) ? parse_png(bytes) : parse_pnm(bytes, path);
  if (img.channels != 1) throw Error(ErrorKind::IoError, "mask must be single-channel: " + path.string());
  Mask m(img.width, img.height);
  for (std::size_t k = 0; k < img.data.size(); ++k) m.bits[k] = img.data[k] != 0;
  return m;
}

Image read_image(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  return is_png(bytes) ? parse_png(bytes) : parse_pnm(bytes, path);
}

void write_png(const Image& image, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), std::fclose);
  if (!fp) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.height; ++r)
    png_write_row(png, image.data.data() + static_cast<std::size_t>(r) * image.width * image.channels);
  png_write_end(png, nullptr);
}

Image overlay(const Image& image, const Mask& mask, double alpha, std::array<std::uint8_t, 3> tint) {
  if (image.width != mask.width || image.height != mask.height)
    throw Error(ErrorKind::ShapeMismatch, "image and mask dimensions differ");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  Image out{image.width, image.height, 3, {}};
  out.data.resize(static_cast<std::size_t>(image.width) * image.height * 3);
  for (std::size_t k = 0; k < mask.bits.size(); ++k) {
    for (int c = 0; c < 3; ++c) {
      const std::uint8_t src = image.data[k * image.channels + (image.channels == 1 ? 0 : c)];
      out.data[k * 3 + c] =
          mask.bits[k] ? static_cast<std::uint8_t>(std::lround((1.0 - alpha) * src + alpha * tint[c])) : src;
    }
  }
  return out;
}

}  // namespace egocorridor
