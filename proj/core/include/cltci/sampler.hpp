#pragma once

#include "cltci/manifest.hpp"
#include "cltci/rng.hpp"

namespace cltci {

// P patients per batch, K images per patient; batch size N = P*K.
struct SamplerConfig {
  int patients_per_batch = 8;
  int images_per_patient = 2;
  std::uint64_t seed = 0;

  int batch_images() const { return patients_per_batch * images_per_patient; }
};

// Draws records from exactly P distinct patients, K per patient. Patients with
// fewer than K images are sampled with replacement within the patient. The
// sampler owns its rng_state; callers hand it one explicitly per draw.
std::vector<ImageRecord> sample_batch(const Manifest& manifest, const SamplerConfig& cfg,
                                      Rng& rng);

}  // namespace cltci
