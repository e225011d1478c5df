#include "cltci/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "cltci/image.hpp"
#include "cltci/rng.hpp"

namespace fs = std::filesystem;

namespace cltci {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Ellipse {
  double cx, cy;      // center, pixels
  double rx, ry;      // semi-axes, pixels
  double angle;       // radians
};

struct PatientTemplate {
  Ellipse left, right;
  double blob_level;  // base foreground intensity in [0,1]
};

// in-ellipse test after rotating into the ellipse frame
bool inside(const Ellipse& e, double x, double y, double& rnorm2) {
  const double dx = x - e.cx, dy = y - e.cy;
  const double ca = std::cos(e.angle), sa = std::sin(e.angle);
  const double u = (ca * dx + sa * dy) / e.rx;
  const double v = (-sa * dx + ca * dy) / e.ry;
  rnorm2 = u * u + v * v;
  return rnorm2 <= 1.0;
}

PatientTemplate make_template(int image_size, double variation, Rng& rng) {
  const double S = image_size;
  auto varied = [&](double base, double spread) { return base + rng.uniform(-1.0, 1.0) * variation * spread; };
  PatientTemplate t;
  // lateral centers stay separated so the blobs cannot overlap for any
  // variation <= 1 (0.30+0.045+0.143 < 0.655-0.143 at the default ranges)
  t.left.cx = varied(0.30, 0.15) * S;
  t.left.cy = varied(0.52, 0.30) * S;
  t.left.rx = varied(0.11, 0.11) * S;
  t.left.ry = varied(0.16, 0.16) * S;
  t.left.angle = varied(0.0, 25.0) * kPi / 180.0;
  t.right.cx = varied(0.70, 0.15) * S;
  t.right.cy = varied(0.48, 0.30) * S;
  t.right.rx = varied(0.11, 0.11) * S;
  t.right.ry = varied(0.16, 0.16) * S;
  t.right.angle = varied(0.0, 25.0) * kPi / 180.0;
  t.blob_level = varied(0.72, 0.10);
  return t;
}

Ellipse jittered(const Ellipse& e, double angle, double scale, double tx, double ty,
                 double cx0, double cy0) {
  // rotate+scale about the image center, then translate
  Ellipse out = e;
  const double ca = std::cos(angle), sa = std::sin(angle);
  const double dx = e.cx - cx0, dy = e.cy - cy0;
  out.cx = cx0 + scale * (ca * dx - sa * dy) + tx;
  out.cy = cy0 + scale * (sa * dx + ca * dy) + ty;
  out.rx = e.rx * scale;
  out.ry = e.ry * scale;
  out.angle = e.angle + angle;
  return out;
}

}  // namespace

Manifest generate_synthetic(const SyntheticConfig& cfg, const std::string& out_dir) {
  if (cfg.num_patients < 1 || cfg.images_per_patient < 1 || cfg.image_size < 8)
    throw std::invalid_argument("generate_synthetic: bad config");
  if (!(cfg.within_patient_jitter < cfg.across_patient_variation))
    throw std::invalid_argument(
        "generate_synthetic: within_patient_jitter must be < across_patient_variation");

  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "images", ec);
  fs::create_directories(fs::path(out_dir) / "masks", ec);
  if (!fs::is_directory(fs::path(out_dir) / "images") ||
      !fs::is_directory(fs::path(out_dir) / "masks"))
    throw std::runtime_error("generate_synthetic: cannot create output directory: " + out_dir);

  const int S = cfg.image_size;
  const double j = cfg.within_patient_jitter;
  std::vector<ImageRecord> records;

  for (int p = 0; p < cfg.num_patients; ++p) {
    Rng trng(hash_combine(cfg.patient_shape_seed, 1000003ull * (p + 1)));
    const PatientTemplate tpl = make_template(S, cfg.across_patient_variation, trng);

    for (int i = 0; i < cfg.images_per_patient; ++i) {
      Rng irng(hash_combine(cfg.patient_shape_seed,
                            hash_combine(static_cast<std::uint64_t>(p) + 1,
                                         static_cast<std::uint64_t>(i) + 1)));
      const double angle = irng.uniform(-1.0, 1.0) * j * (45.0 * kPi / 180.0);
      const double scale = 1.0 + irng.uniform(-1.0, 1.0) * j;
      const double tx = irng.uniform(-1.0, 1.0) * j * 0.3 * S;
      const double ty = irng.uniform(-1.0, 1.0) * j * 0.3 * S;
      const double c0 = 0.5 * S;
      const Ellipse left = jittered(tpl.left, angle, scale, tx, ty, c0, c0);
      const Ellipse right = jittered(tpl.right, angle, scale, tx, ty, c0, c0);

      const double bg = 0.15 + irng.uniform(-1.0, 1.0) * 0.02;
      const double fg = tpl.blob_level + irng.uniform(-1.0, 1.0) * 0.04;

      ImageF img(S, S);
      MaskImage mask(S, S);
      for (int r = 0; r < S; ++r) {
        for (int c = 0; c < S; ++c) {
          const double x = c + 0.5, y = r + 0.5;
          double rn2 = 0.0;
          double value = bg;
          if (inside(left, x, y, rn2)) {
            mask.at(r, c) = 1;
            value = fg * (1.0 - 0.25 * rn2);
          } else if (inside(right, x, y, rn2)) {
            mask.at(r, c) = 2;
            value = fg * (1.0 - 0.25 * rn2);
          }
          value += irng.normal(0.0, 0.03);
          img.at(r, c) = static_cast<float>(value * 255.0);
        }
      }

      char pid[16], stem[64];
      std::snprintf(pid, sizeof(pid), "p%02d", p);
      std::snprintf(stem, sizeof(stem), "p%02d_t%02d", p, i);
      const std::string img_rel = std::string("images/") + stem + ".pgm";
      const std::string mask_rel = std::string("masks/") + stem + "_mask.pgm";
      write_image_u8((fs::path(out_dir) / img_rel).string(), img);
      write_mask((fs::path(out_dir) / mask_rel).string(), mask);

      ImageRecord rec;
      rec.image_id = stem;
      rec.patient_id = pid;
      rec.image_path = (fs::path(out_dir) / img_rel).lexically_normal().string();
      rec.mask_path = (fs::path(out_dir) / mask_rel).lexically_normal().string();
      rec.timestamp_index = i;
      records.push_back(std::move(rec));
    }
  }

  Manifest manifest(std::move(records));
  save_manifest((fs::path(out_dir) / "manifest.tsv").string(), manifest);
  return manifest;
}

}  // namespace cltci
