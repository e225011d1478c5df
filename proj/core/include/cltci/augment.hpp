#pragma once

#include "cltci/image.hpp"
#include "cltci/rng.hpp"

namespace cltci {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct AugmentConfig {
  Range rotation_degrees{-10.0, 10.0};
  Range translation_fraction{-0.10, 0.10};  // of the image side, per axis
  Range scale{0.9, 1.1};
  double horizontal_flip_prob = 0.5;
  double intensity_jitter = 0.1;  // gain/bias half-range; 0 disables

  static AugmentConfig pretrain_defaults() { return AugmentConfig{}; }
  static AugmentConfig finetune_defaults() {
    AugmentConfig cfg;
    cfg.horizontal_flip_prob = 0.0;  // flips swap the left/right labels
    cfg.intensity_jitter = 0.0;
    return cfg;
  }
  static AugmentConfig identity() {
    return AugmentConfig{{0, 0}, {0, 0}, {1, 1}, 0.0, 0.0};
  }

  void validate() const;
};

// One concrete draw of the stochastic transform, exposed so tests can pin
// exact parameters.
struct AffineParams {
  double angle_rad = 0.0;
  double scale = 1.0;
  double tx = 0.0;  // pixels, +x = right
  double ty = 0.0;  // pixels, +y = down
  bool hflip = false;
  double gain = 1.0;
  double bias = 0.0;
};

AffineParams sample_affine(const AugmentConfig& cfg, int image_size, Rng& rng);

// Inverse-mapped warp about the image center; out-of-frame samples read as
// pad_value. Bilinear for images, nearest for masks.
ImageF warp_bilinear(const ImageF& img, const AffineParams& params, float pad_value = 0.0f);
MaskImage warp_nearest(const MaskImage& mask, const AffineParams& params);

// One random view for pretraining: affine + optional flip + intensity jitter.
ImageF augment_view(const ImageF& img, const AugmentConfig& cfg, Rng& rng);

// Identical geometry applied to image and mask; flips are never applied.
std::pair<ImageF, MaskImage> augment_pair(const ImageF& img, const MaskImage& mask,
                                          const AugmentConfig& cfg, Rng& rng);

}  // namespace cltci
