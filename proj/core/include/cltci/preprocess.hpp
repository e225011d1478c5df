#pragma once

#include "cltci/image.hpp"

namespace cltci {

enum class Normalization { ZScore, MinMax };

struct PreprocessConfig {
  int target_size = 256;
  float pad_value = 0.0f;
  Normalization normalization = Normalization::ZScore;
};

struct PadAmounts {
  int top = 0, bottom = 0, left = 0, right = 0;
};

// Symmetric pad of the shorter axis up to a square; an odd deficit puts the
// extra pixel on the trailing edge.
PadAmounts square_pad_amounts(int height, int width);
ImageF pad_to_square(const ImageF& img, float pad_value);
MaskImage pad_to_square(const MaskImage& mask);

ImageF resize_bilinear(const ImageF& img, int out_h, int out_w);
MaskImage resize_nearest(const MaskImage& mask, int out_h, int out_w);

ImageF normalize_zscore(const ImageF& img);
ImageF normalize_minmax(const ImageF& img);

// Pad to square, resize to target_size, then normalize.
ImageF preprocess(const ImageF& img, const PreprocessConfig& cfg);
// Masks: same geometry, nearest-neighbor resize, no normalization.
MaskImage preprocess_mask(const MaskImage& mask, const PreprocessConfig& cfg);

}  // namespace cltci
