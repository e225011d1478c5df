#include "cltci/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cltci {

PadAmounts square_pad_amounts(int height, int width) {
  PadAmounts p;
  if (height < width) {
    int deficit = width - height;
    p.top = deficit / 2;
    p.bottom = deficit - p.top;  // odd deficit: extra pixel trails
  } else if (width < height) {
    int deficit = height - width;
    p.left = deficit / 2;
    p.right = deficit - p.left;
  }
  return p;
}

ImageF pad_to_square(const ImageF& img, float pad_value) {
  if (img.empty()) throw std::invalid_argument("pad_to_square: empty image");
  PadAmounts p = square_pad_amounts(img.height, img.width);
  if (p.top == 0 && p.left == 0 && p.bottom == 0 && p.right == 0) return img;
  const int side = std::max(img.height, img.width);
  ImageF out(side, side, pad_value);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) out.at(r + p.top, c + p.left) = img.at(r, c);
  return out;
}

MaskImage pad_to_square(const MaskImage& mask) {
  if (mask.empty()) throw std::invalid_argument("pad_to_square: empty mask");
  PadAmounts p = square_pad_amounts(mask.height, mask.width);
  if (p.top == 0 && p.left == 0 && p.bottom == 0 && p.right == 0) return mask;
  const int side = std::max(mask.height, mask.width);
  MaskImage out(side, side, 0);
  for (int r = 0; r < mask.height; ++r)
    for (int c = 0; c < mask.width; ++c) out.at(r + p.top, c + p.left) = mask.at(r, c);
  return out;
}

// Half-pixel-center sampling; source coords clamp at the border.
ImageF resize_bilinear(const ImageF& img, int out_h, int out_w) {
  if (img.empty()) throw std::invalid_argument("resize_bilinear: empty image");
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("resize_bilinear: bad target size");
  if (out_h == img.height && out_w == img.width) return img;
  ImageF out(out_h, out_w);
  const double sy = static_cast<double>(img.height) / out_h;
  const double sx = static_cast<double>(img.width) / out_w;
  for (int r = 0; r < out_h; ++r) {
    double fy = (r + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int c = 0; c < out_w; ++c) {
      double fx = (c + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      const double v = (1 - wy) * ((1 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                       wy * ((1 - wx) * img.at(y1, x0) + wx * img.at(y1, x1));
      out.at(r, c) = static_cast<float>(v);
    }
  }
  return out;
}

MaskImage resize_nearest(const MaskImage& mask, int out_h, int out_w) {
  if (mask.empty()) throw std::invalid_argument("resize_nearest: empty mask");
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("resize_nearest: bad target size");
  if (out_h == mask.height && out_w == mask.width) return mask;
  MaskImage out(out_h, out_w);
  const double sy = static_cast<double>(mask.height) / out_h;
  const double sx = static_cast<double>(mask.width) / out_w;
  for (int r = 0; r < out_h; ++r) {
    int y = std::clamp(static_cast<int>(std::floor((r + 0.5) * sy)), 0, mask.height - 1);
    for (int c = 0; c < out_w; ++c) {
      int x = std::clamp(static_cast<int>(std::floor((c + 0.5) * sx)), 0, mask.width - 1);
      out.at(r, c) = mask.at(y, x);
    }
  }
  return out;
}

ImageF normalize_zscore(const ImageF& img) {
  double mean = 0.0;
  for (float v : img.data) mean += v;
  mean /= static_cast<double>(img.size());
  double var = 0.0;
  for (float v : img.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(img.size());
  const double sd = std::sqrt(var);
  ImageF out(img.height, img.width);
  if (sd < 1e-12) return out;  // constant image maps to zeros
  for (std::size_t i = 0; i < img.size(); ++i)
    out.data[i] = static_cast<float>((img.data[i] - mean) / sd);
  return out;
}

ImageF normalize_minmax(const ImageF& img) {
  const auto [lo_it, hi_it] = std::minmax_element(img.data.begin(), img.data.end());
  const double lo = *lo_it, hi = *hi_it;
  ImageF out(img.height, img.width);
  if (hi - lo < 1e-12) return out;
  for (std::size_t i = 0; i < img.size(); ++i)
    out.data[i] = static_cast<float>((img.data[i] - lo) / (hi - lo));
  return out;
}

ImageF preprocess(const ImageF& img, const PreprocessConfig& cfg) {
  if (img.empty()) throw std::invalid_argument("preprocess: empty image");
  if (cfg.target_size <= 0) throw std::invalid_argument("preprocess: target_size must be > 0");
  ImageF sq = pad_to_square(img, cfg.pad_value);
  ImageF resized = resize_bilinear(sq, cfg.target_size, cfg.target_size);
  return cfg.normalization == Normalization::ZScore ? normalize_zscore(resized)
                                                    : normalize_minmax(resized);
}

MaskImage preprocess_mask(const MaskImage& mask, const PreprocessConfig& cfg) {
  if (mask.empty()) throw std::invalid_argument("preprocess_mask: empty mask");
  if (cfg.target_size <= 0) throw std::invalid_argument("preprocess_mask: target_size must be > 0");
  MaskImage sq = pad_to_square(mask);
  return resize_nearest(sq, cfg.target_size, cfg.target_size);
}

}  // namespace cltci
