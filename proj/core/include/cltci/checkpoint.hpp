#pragma once

#include <map>
#include <string>
#include <vector>

namespace cltci {

struct NamedArray {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

struct CheckpointMeta {
  std::string variant;      // encoder variant tag: "tiny-cnn" | "unet-encoder"
  std::string trained_by;   // producing run: pretrain variant, "finetune", or "none"
  int epoch = 0;
  std::string config_hash;
  std::string init_scheme = "fan_in_uniform";
  std::map<std::string, std::string> extra;
};

// The contract between pretraining and fine-tuning: named f32 weight arrays
// plus a UTF-8 metadata block with the shape table. On disk this is a single
// archive: magic, JSON metadata, then raw little-endian float payload.
struct Checkpoint {
  CheckpointMeta meta;
  std::vector<NamedArray> arrays;

  const NamedArray* find(const std::string& name) const;
  void validate() const;  // unique names, shapes consistent with data sizes
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace cltci
