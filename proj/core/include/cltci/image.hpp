#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cltci {

// Single-channel float image, row-major.
struct ImageF {
  int height = 0;
  int width = 0;
  std::vector<float> data;

  ImageF() = default;
  ImageF(int h, int w, float fill = 0.0f)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {
    if (h <= 0 || w <= 0) throw std::invalid_argument("ImageF: non-positive shape");
  }

  float& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
  float at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
};

// Label mask, values are raw class ids.
struct MaskImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  MaskImage() = default;
  MaskImage(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {
    if (h <= 0 || w <= 0) throw std::invalid_argument("MaskImage: non-positive shape");
  }

  std::uint8_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
  std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
};

// --- grayscale image IO (8/16-bit PGM and PNG, chosen by extension) ---

ImageF read_image(const std::string& path);
MaskImage read_mask(const std::string& path);

// Values are clamped to [0, 255] / [0, 65535] and rounded on write.
void write_image_u8(const std::string& path, const ImageF& img);
void write_image_u16(const std::string& path, const ImageF& img);
void write_mask(const std::string& path, const MaskImage& mask);

// RGB canvas used by the plot writer.
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;  // 3 bytes per pixel

  RgbImage() = default;
  RgbImage(int h, int w, std::uint8_t r = 255, std::uint8_t g = 255, std::uint8_t b = 255)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3) {
    for (std::size_t i = 0; i < data.size(); i += 3) {
      data[i] = r;
      data[i + 1] = g;
      data[i + 2] = b;
    }
  }

  void set(int r, int c, std::uint8_t red, std::uint8_t green, std::uint8_t blue) {
    if (r < 0 || r >= height || c < 0 || c >= width) return;
    std::size_t i = (static_cast<std::size_t>(r) * width + c) * 3;
    data[i] = red;
    data[i + 1] = green;
    data[i + 2] = blue;
  }
};

void write_png_rgb(const std::string& path, const RgbImage& img);

}  // namespace cltci
