#include "flamegrad/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

namespace flamegrad {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

RgbBuffer read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open PNG for reading: " + path);

  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw std::runtime_error("not a PNG file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }

  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("PNG decode error: " + path);
  }

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);

  // Normalize everything to 8-bit RGBA, then composite over white below.
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
  png_read_update_info(png, info);

  pixels.resize(static_cast<size_t>(width) * height * 4);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y)
    rows[y] = pixels.data() + static_cast<size_t>(y) * width * 4;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  RgbBuffer out;
  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  out.data.resize(static_cast<Eigen::Index>(width) * height, 3);
  for (size_t i = 0; i < static_cast<size_t>(width) * height; ++i) {
    const double a = pixels[i * 4 + 3] / 255.0;
    for (int c = 0; c < 3; ++c) {
      const double v = pixels[i * 4 + c] / 255.0;
      out.data(static_cast<Eigen::Index>(i), c) = a * v + (1.0 - a);  // over white
    }
  }
  return out;
}

void write_png(const std::string& path, const RgbBuffer& image) {
  if (image.width <= 0 || image.height <= 0)
    throw std::invalid_argument("write_png: empty image");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot open PNG for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }

  std::vector<png_byte> pixels(static_cast<size_t>(image.width) * image.height * 3);
  std::vector<png_bytep> rows(image.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG encode error: " + path);
  }

  for (Eigen::Index i = 0; i < image.data.rows(); ++i)
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(image.data(i, c), 0.0, 1.0);
      pixels[static_cast<size_t>(i) * 3 + c] =
          static_cast<png_byte>(std::lround(v * 255.0));
    }
  for (int y = 0; y < image.height; ++y)
    rows[y] = pixels.data() + static_cast<size_t>(y) * image.width * 3;

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RgbBuffer resample(const RgbBuffer& image, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("resample: empty target");
  if (width == image.width && height == image.height) return image;

  RgbBuffer out;
  out.width = width;
  out.height = height;
  out.data.setZero(static_cast<Eigen::Index>(width) * height, 3);

  const double sx = static_cast<double>(image.width) / width;
  const double sy = static_cast<double>(image.height) / height;
  for (int oy = 0; oy < height; ++oy) {
    const double y0 = oy * sy, y1 = (oy + 1) * sy;
    const int iy0 = static_cast<int>(std::floor(y0));
    const int iy1 = std::min(static_cast<int>(std::ceil(y1)), image.height);
    for (int ox = 0; ox < width; ++ox) {
      const double x0 = ox * sx, x1 = (ox + 1) * sx;
      const int ix0 = static_cast<int>(std::floor(x0));
      const int ix1 = std::min(static_cast<int>(std::ceil(x1)), image.width);
      Vec3 acc = Vec3::Zero();
      double total = 0.0;
      for (int iy = iy0; iy < iy1; ++iy) {
        const double wy = std::min<double>(iy + 1, y1) - std::max<double>(iy, y0);
        for (int ix = ix0; ix < ix1; ++ix) {
          const double wx = std::min<double>(ix + 1, x1) - std::max<double>(ix, x0);
          const double w = wx * wy;
          acc += w * image.data.row(static_cast<Eigen::Index>(iy) * image.width + ix).transpose();
          total += w;
        }
      }
      out.data.row(static_cast<Eigen::Index>(oy) * width + ox) = (acc / total).transpose();
    }
  }
  return out;
}

RgbBuffer three_discs(int width, int height) {
  RgbBuffer out;
  out.width = width;
  out.height = height;
  out.data.resize(static_cast<Eigen::Index>(width) * height, 3);

  struct Disc {
    double cx, cy, r;
    Vec3 color;
  };
  const Disc discs[3] = {
      {0.32, 0.35, 0.22, Vec3(0.85, 0.15, 0.10)},
      {0.68, 0.35, 0.22, Vec3(0.10, 0.75, 0.20)},
      {0.50, 0.68, 0.22, Vec3(0.15, 0.25, 0.90)},
  };
  const Vec3 bg(0.05, 0.05, 0.08);
  const double edge = 0.03;  // soft edge width in normalized units

  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double u = (x + 0.5) / width;
      const double v = (y + 0.5) / height;
      Vec3 px = bg;
      for (const auto& d : discs) {
        const double dist = std::hypot(u - d.cx, v - d.cy);
        // 1 inside, 0 outside, smoothstep across the edge band.
        double t = std::clamp((d.r - dist) / edge, 0.0, 1.0);
        t = t * t * (3.0 - 2.0 * t);
        px = t * d.color + (1.0 - t) * px;
      }
      out.data.row(static_cast<Eigen::Index>(y) * width + x) = px.transpose();
    }
  return out;
}

}  // namespace flamegrad
