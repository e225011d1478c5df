#include "cltci/augment.hpp"

#include <cmath>
#include <stdexcept>

namespace cltci {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_range(const Range& r, const char* name) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi)) || r.lo > r.hi)
    throw std::invalid_argument(std::string("AugmentConfig: bad range for ") + name);
}
}  // namespace

void AugmentConfig::validate() const {
  check_range(rotation_degrees, "rotation_degrees");
  check_range(translation_fraction, "translation_fraction");
  check_range(scale, "scale");
  if (scale.lo <= 0.0) throw std::invalid_argument("AugmentConfig: scale must be positive");
  if (horizontal_flip_prob < 0.0 || horizontal_flip_prob > 1.0)
    throw std::invalid_argument("AugmentConfig: horizontal_flip_prob outside [0,1]");
  if (intensity_jitter < 0.0)
    throw std::invalid_argument("AugmentConfig: intensity_jitter must be >= 0");
}

AffineParams sample_affine(const AugmentConfig& cfg, int image_size, Rng& rng) {
  cfg.validate();
  AffineParams p;
  p.angle_rad = rng.uniform(cfg.rotation_degrees.lo, cfg.rotation_degrees.hi) * kPi / 180.0;
  p.scale = rng.uniform(cfg.scale.lo, cfg.scale.hi);
  p.tx = rng.uniform(cfg.translation_fraction.lo, cfg.translation_fraction.hi) * image_size;
  p.ty = rng.uniform(cfg.translation_fraction.lo, cfg.translation_fraction.hi) * image_size;
  p.hflip = cfg.horizontal_flip_prob > 0.0 && rng.bernoulli(cfg.horizontal_flip_prob);
  if (cfg.intensity_jitter > 0.0) {
    p.gain = 1.0 + rng.uniform(-cfg.intensity_jitter, cfg.intensity_jitter);
    p.bias = rng.uniform(-cfg.intensity_jitter, cfg.intensity_jitter);
  }
  return p;
}

namespace {

// Forward transform is flip -> rotate*scale about the center -> translate.
// Warping iterates output pixels and applies the inverse map.
struct InverseMap {
  double ca, sa, inv_scale, cx, cy, tx, ty;
  bool hflip;
  int width;

  InverseMap(const AffineParams& p, int h, int w)
      : ca(std::cos(p.angle_rad)),
        sa(std::sin(p.angle_rad)),
        inv_scale(1.0 / p.scale),
        cx((w - 1) * 0.5),
        cy((h - 1) * 0.5),
        tx(p.tx),
        ty(p.ty),
        hflip(p.hflip),
        width(w) {}

  void operator()(double xo, double yo, double& xi, double& yi) const {
    const double dx = xo - cx - tx;
    const double dy = yo - cy - ty;
    double xs = inv_scale * (ca * dx + sa * dy) + cx;
    const double ys = inv_scale * (-sa * dx + ca * dy) + cy;
    if (hflip) xs = (width - 1) - xs;
    xi = xs;
    yi = ys;
  }
};

}  // namespace

ImageF warp_bilinear(const ImageF& img, const AffineParams& params, float pad_value) {
  if (img.empty()) throw std::invalid_argument("warp_bilinear: empty image");
  const int h = img.height, w = img.width;
  ImageF out(h, w);
  const InverseMap inv(params, h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double xs, ys;
      inv(c, r, xs, ys);
      if (xs <= -1.0 || xs >= w || ys <= -1.0 || ys >= h) {
        out.at(r, c) = pad_value;  // fully outside: fill stays untouched by jitter
        continue;
      }
      const int x0 = static_cast<int>(std::floor(xs));
      const int y0 = static_cast<int>(std::floor(ys));
      const double wx = xs - x0, wy = ys - y0;
      auto sample = [&](int y, int x) -> double {
        if (x < 0 || x >= w || y < 0 || y >= h) return pad_value;
        return img.at(y, x);
      };
      const double v = (1 - wy) * ((1 - wx) * sample(y0, x0) + wx * sample(y0, x0 + 1)) +
                       wy * ((1 - wx) * sample(y0 + 1, x0) + wx * sample(y0 + 1, x0 + 1));
      out.at(r, c) = static_cast<float>(params.gain * v + params.bias);
    }
  }
  return out;
}

MaskImage warp_nearest(const MaskImage& mask, const AffineParams& params) {
  if (mask.empty()) throw std::invalid_argument("warp_nearest: empty mask");
  const int h = mask.height, w = mask.width;
  MaskImage out(h, w, 0);
  const InverseMap inv(params, h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double xs, ys;
      inv(c, r, xs, ys);
      const int x = static_cast<int>(std::lround(xs));
      const int y = static_cast<int>(std::lround(ys));
      if (x >= 0 && x < w && y >= 0 && y < h) out.at(r, c) = mask.at(y, x);
    }
  }
  return out;
}

ImageF augment_view(const ImageF& img, const AugmentConfig& cfg, Rng& rng) {
  if (img.height != img.width)
    throw std::invalid_argument("augment_view: expected a square image");
  AffineParams p = sample_affine(cfg, img.width, rng);
  return warp_bilinear(img, p, 0.0f);
}

std::pair<ImageF, MaskImage> augment_pair(const ImageF& img, const MaskImage& mask,
                                          const AugmentConfig& cfg, Rng& rng) {
  if (img.height != mask.height || img.width != mask.width)
    throw std::invalid_argument("augment_pair: image/mask shape mismatch");
  AffineParams p = sample_affine(cfg, img.width, rng);
  p.hflip = false;  // left/right labels are chirality-sensitive
  AffineParams geometry_only = p;
  geometry_only.gain = 1.0;
  geometry_only.bias = 0.0;
  ImageF wimg = warp_bilinear(img, p, 0.0f);
  MaskImage wmask = warp_nearest(mask, geometry_only);
  return {std::move(wimg), std::move(wmask)};
}

}  // namespace cltci
