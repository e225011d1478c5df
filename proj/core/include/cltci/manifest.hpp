#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cltci {

// One image with its patient identity; the unit of sampling and pseudo-labeling.
struct ImageRecord {
  std::string image_id;
  std::string patient_id;
  std::string image_path;               // absolute, resolved at load time
  std::optional<std::string> mask_path;
  std::optional<int> timestamp_index;   // ordering within patient, >= 0
};

class Manifest {
 public:
  Manifest() = default;
  explicit Manifest(std::vector<ImageRecord> records);

  const std::vector<ImageRecord>& records() const { return records_; }
  const ImageRecord& record(std::size_t i) const { return records_.at(i); }
  std::size_t size() const { return records_.size(); }

  int num_patients() const { return static_cast<int>(by_patient_.size()); }
  const std::vector<std::string>& patient_ids() const { return patient_order_; }
  // record indices for one patient, in manifest order
  const std::vector<std::size_t>& patient_records(const std::string& patient_id) const;

  bool all_have_masks() const;

 private:
  std::vector<ImageRecord> records_;
  std::map<std::string, std::vector<std::size_t>> by_patient_;
  std::vector<std::string> patient_order_;  // sorted patient ids
};

// Text manifest, one record per line. The header line declares the columns and
// the separator (tab or comma). image_path/mask_path entries are resolved
// relative to the manifest file's directory. Missing image files and duplicate
// image_ids are validation errors.
Manifest load_manifest(const std::string& path);

// Writes a tab-separated manifest with paths relative to `path`'s directory.
void save_manifest(const std::string& path, const Manifest& manifest);

}  // namespace cltci
