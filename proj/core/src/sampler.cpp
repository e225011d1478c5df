#include "cltci/sampler.hpp"

#include <stdexcept>

namespace cltci {

std::vector<ImageRecord> sample_batch(const Manifest& manifest, const SamplerConfig& cfg,
                                      Rng& rng) {
  if (cfg.patients_per_batch < 2)
    throw std::invalid_argument("sample_batch: patients_per_batch must be >= 2");
  if (cfg.images_per_patient < 1)
    throw std::invalid_argument("sample_batch: images_per_patient must be >= 1");
  const int P = cfg.patients_per_batch;
  const int K = cfg.images_per_patient;
  if (manifest.num_patients() < P)
    throw std::invalid_argument("sample_batch: manifest has " +
                                std::to_string(manifest.num_patients()) + " patients, need " +
                                std::to_string(P));

  // choose P distinct patients (partial Fisher-Yates over the sorted id list)
  std::vector<std::string> pool = manifest.patient_ids();
  std::vector<ImageRecord> batch;
  batch.reserve(static_cast<std::size_t>(P) * K);
  for (int p = 0; p < P; ++p) {
    std::size_t j = p + static_cast<std::size_t>(rng.uniform_index(pool.size() - p));
    std::swap(pool[p], pool[j]);
    const auto& recs = manifest.patient_records(pool[p]);
    if (static_cast<int>(recs.size()) >= K) {
      // K distinct images of this patient
      std::vector<std::size_t> idx(recs.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      for (int k = 0; k < K; ++k) {
        std::size_t j2 = k + static_cast<std::size_t>(rng.uniform_index(idx.size() - k));
        std::swap(idx[k], idx[j2]);
        batch.push_back(manifest.record(recs[idx[k]]));
      }
    } else {
      // with replacement when the patient has fewer than K images
      for (int k = 0; k < K; ++k)
        batch.push_back(manifest.record(recs[rng.uniform_index(recs.size())]));
    }
  }
  return batch;
}

}  // namespace cltci
