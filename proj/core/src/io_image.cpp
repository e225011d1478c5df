#include "cltci/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace cltci {
namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                    [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

// ---------------- PGM (binary P5) ----------------

int pgm_next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {  // comment to end of line
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch)) {
    tok.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  return tok.empty() ? EOF : 0;
}

struct PgmHeader {
  int height = 0, width = 0, maxval = 0;
};

PgmHeader read_pgm_header(std::istream& in, const std::string& path) {
  std::string tok;
  if (pgm_next_token(in, tok) == EOF || tok != "P5")
    throw std::runtime_error("not a binary PGM (P5): " + path);
  PgmHeader h;
  auto next_int = [&](int& out) {
    if (pgm_next_token(in, tok) == EOF) throw std::runtime_error("truncated PGM header: " + path);
    out = std::stoi(tok);
  };
  next_int(h.width);
  next_int(h.height);
  next_int(h.maxval);
  if (h.width <= 0 || h.height <= 0 || h.maxval <= 0 || h.maxval > 65535)
    throw std::runtime_error("invalid PGM header: " + path);
  return h;
}

std::vector<std::uint16_t> read_pgm_pixels(const std::string& path, int& height, int& width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path);
  PgmHeader h = read_pgm_header(in, path);
  height = h.height;
  width = h.width;
  std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  std::vector<std::uint16_t> px(n);
  if (h.maxval < 256) {
    std::vector<std::uint8_t> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("truncated PGM payload: " + path);
    for (std::size_t i = 0; i < n; ++i) px[i] = raw[i];
  } else {
    // two-byte samples are big-endian in binary PGM
    std::vector<std::uint8_t> raw(n * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 2));
    if (!in) throw std::runtime_error("truncated PGM payload: " + path);
    for (std::size_t i = 0; i < n; ++i)
      px[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  }
  return px;
}

void write_pgm(const std::string& path, int height, int width, int maxval,
               const std::vector<std::uint16_t>& px) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path);
  out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
  if (maxval < 256) {
    std::vector<std::uint8_t> raw(px.size());
    for (std::size_t i = 0; i < px.size(); ++i) raw[i] = static_cast<std::uint8_t>(px[i]);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  } else {
    std::vector<std::uint8_t> raw(px.size() * 2);
    for (std::size_t i = 0; i < px.size(); ++i) {
      raw[2 * i] = static_cast<std::uint8_t>(px[i] >> 8);
      raw[2 * i + 1] = static_cast<std::uint8_t>(px[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  }
  if (!out) throw std::runtime_error("short write: " + path);
}

// ---------------- PNG (grayscale via libpng) ----------------

struct PngReadCtx {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngReadCtx() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

// Returns 16-bit samples regardless of bit depth; bit_depth reports the source.
std::vector<std::uint16_t> read_png_gray(const std::string& path, int& height, int& width,
                                         int& bit_depth) {
  PngReadCtx ctx;
  ctx.fp = std::fopen(path.c_str(), "rb");
  if (!ctx.fp) throw std::runtime_error("cannot open image: " + path);
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.png || !ctx.info) throw std::runtime_error("libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("failed to decode PNG: " + path);
  png_init_io(ctx.png, ctx.fp);
  png_read_info(ctx.png, ctx.info);

  width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  bit_depth = png_get_bit_depth(ctx.png, ctx.info);
  int color = png_get_color_type(ctx.png, ctx.info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(ctx.png, 1, -1, -1);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(ctx.png);
  if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
  png_read_update_info(ctx.png, ctx.info);
  bit_depth = png_get_bit_depth(ctx.png, ctx.info);

  std::size_t rowbytes = png_get_rowbytes(ctx.png, ctx.info);
  std::vector<std::uint8_t> raw(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (int r = 0; r < height; ++r) rows[r] = raw.data() + rowbytes * r;
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);

  std::vector<std::uint16_t> px(static_cast<std::size_t>(width) * height);
  if (bit_depth == 16) {
    for (std::size_t i = 0; i < px.size(); ++i)
      px[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  } else {
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = raw[i];
  }
  return px;
}

struct PngWriteCtx {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngWriteCtx() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};

void write_png_gray(const std::string& path, int height, int width, int bit_depth,
                    const std::vector<std::uint16_t>& px) {
  PngWriteCtx ctx;
  ctx.fp = std::fopen(path.c_str(), "wb");
  if (!ctx.fp) throw std::runtime_error("cannot write image: " + path);
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.png || !ctx.info) throw std::runtime_error("libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("failed to encode PNG: " + path);
  png_init_io(ctx.png, ctx.fp);
  png_set_IHDR(ctx.png, ctx.info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);

  std::size_t n = static_cast<std::size_t>(width) * height;
  if (bit_depth == 16) {
    std::vector<std::uint8_t> raw(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
      raw[2 * i] = static_cast<std::uint8_t>(px[i] >> 8);
      raw[2 * i + 1] = static_cast<std::uint8_t>(px[i] & 0xff);
    }
    std::vector<png_bytep> rows(height);
    for (int r = 0; r < height; ++r) rows[r] = raw.data() + static_cast<std::size_t>(r) * width * 2;
    png_write_image(ctx.png, rows.data());
  } else {
    std::vector<std::uint8_t> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = static_cast<std::uint8_t>(px[i]);
    std::vector<png_bytep> rows(height);
    for (int r = 0; r < height; ++r) rows[r] = raw.data() + static_cast<std::size_t>(r) * width;
    png_write_image(ctx.png, rows.data());
  }
  png_write_end(ctx.png, nullptr);
}

std::vector<std::uint16_t> read_gray_any(const std::string& path, int& height, int& width) {
  if (has_suffix(path, ".png")) {
    int depth = 0;
    return read_png_gray(path, height, width, depth);
  }
  if (has_suffix(path, ".pgm")) return read_pgm_pixels(path, height, width);
  throw std::runtime_error("unsupported image format (want .png or .pgm): " + path);
}

}  // namespace

ImageF read_image(const std::string& path) {
  int h = 0, w = 0;
  auto px = read_gray_any(path, h, w);
  ImageF img(h, w);
  for (std::size_t i = 0; i < px.size(); ++i) img.data[i] = static_cast<float>(px[i]);
  return img;
}

MaskImage read_mask(const std::string& path) {
  int h = 0, w = 0;
  auto px = read_gray_any(path, h, w);
  MaskImage mask(h, w);
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (px[i] > 255) throw std::runtime_error("mask has non-8-bit values: " + path);
    mask.data[i] = static_cast<std::uint8_t>(px[i]);
  }
  return mask;
}

void write_image_u8(const std::string& path, const ImageF& img) {
  std::vector<std::uint16_t> px(img.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    float v = std::round(std::clamp(img.data[i], 0.0f, 255.0f));
    px[i] = static_cast<std::uint16_t>(v);
  }
  if (has_suffix(path, ".png"))
    write_png_gray(path, img.height, img.width, 8, px);
  else
    write_pgm(path, img.height, img.width, 255, px);
}

void write_image_u16(const std::string& path, const ImageF& img) {
  std::vector<std::uint16_t> px(img.size());
  for (std::size_t i = 0; i < px.size(); ++i) {
    float v = std::round(std::clamp(img.data[i], 0.0f, 65535.0f));
    px[i] = static_cast<std::uint16_t>(v);
  }
  if (has_suffix(path, ".png"))
    write_png_gray(path, img.height, img.width, 16, px);
  else
    write_pgm(path, img.height, img.width, 65535, px);
}

void write_mask(const std::string& path, const MaskImage& mask) {
  std::vector<std::uint16_t> px(mask.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = mask.data[i];
  if (has_suffix(path, ".png"))
    write_png_gray(path, mask.height, mask.width, 8, px);
  else
    write_pgm(path, mask.height, mask.width, 255, px);
}

void write_png_rgb(const std::string& path, const RgbImage& img) {
  PngWriteCtx ctx;
  ctx.fp = std::fopen(path.c_str(), "wb");
  if (!ctx.fp) throw std::runtime_error("cannot write image: " + path);
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.png || !ctx.info) throw std::runtime_error("libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw std::runtime_error("failed to encode PNG: " + path);
  png_init_io(ctx.png, ctx.fp);
  png_set_IHDR(ctx.png, ctx.info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r)
    rows[r] = const_cast<png_bytep>(img.data.data() + static_cast<std::size_t>(r) * img.width * 3);
  png_write_image(ctx.png, rows.data());
  png_write_end(ctx.png, nullptr);
}

}  // namespace cltci
