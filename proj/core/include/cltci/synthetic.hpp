#pragma once

#include "cltci/manifest.hpp"

namespace cltci {

// Desk-scale stand-in for a temporally-correlated CXR archive: per patient, a
// fixed pair of elliptical "lung" blobs; per image, a small affine jitter of
// that template. Ground-truth three-class masks are written alongside.
struct SyntheticConfig {
  int num_patients = 8;
  int images_per_patient = 4;
  int image_size = 64;
  std::uint64_t patient_shape_seed = 7;
  double within_patient_jitter = 0.05;    // per-image geometry jitter, fraction
  double across_patient_variation = 0.30; // between-patient template variation, fraction
};

// Writes images/, masks/ and manifest.tsv under out_dir; returns the loaded manifest.
Manifest generate_synthetic(const SyntheticConfig& cfg, const std::string& out_dir);

}  // namespace cltci
