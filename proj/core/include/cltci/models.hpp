#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cltci/checkpoint.hpp"
#include "cltci/nn.hpp"

namespace cltci {

enum class EncoderVariant { TinyCnn, UnetEncoder };

std::string to_string(EncoderVariant v);
EncoderVariant encoder_variant_from_string(const std::string& s);

struct EncoderSpec {
  EncoderVariant variant = EncoderVariant::TinyCnn;
  int input_size = 64;
  std::vector<int> stage_channels = {8, 16, 32, 64};

  int feature_dim() const { return stage_channels.back(); }
  int stages() const { return static_cast<int>(stage_channels.size()); }
  void validate() const;  // >=2 stages, input divisible by 2^(stages-1)

  static EncoderSpec tiny_cnn(int input_size = 64);
  static EncoderSpec unet_encoder(int input_size = 256);
};

struct ProjectionSpec {
  int hidden_dim = 0;    // 0 means "same as feature_dim"
  int output_dim = 128;
};

struct EncoderOutput {
  nn::RowMat features;            // B x feature_dim (global average pooled)
  std::vector<nn::Tensor> skips;  // per-stage outputs, shallow to deep
};

// Stack of two-conv stages with 2x max-pool between them; the final stage is
// globally average-pooled into the feature vector.
class Encoder {
 public:
  Encoder(const EncoderSpec& spec, Rng& rng, const std::string& prefix = "encoder");

  EncoderOutput forward(const nn::Tensor& x, bool cache);
  // Either source of upstream gradient may be null/empty; skip grads align
  // with EncoderOutput::skips.
  nn::Tensor backward(const nn::RowMat* gfeatures, std::vector<nn::Tensor>* gskips);
  std::vector<nn::ParamRef> params();
  const EncoderSpec& spec() const { return spec_; }

 private:
  struct Stage {
    nn::Conv2d conv0, conv1;
    nn::ReLU relu0, relu1;
  };
  EncoderSpec spec_;
  std::vector<Stage> stages_;
  std::vector<nn::MaxPool2> pools_;
  nn::GlobalAvgPool gap_;
};

// Two-layer non-linear MLP head; projected rows are unit-norm.
class ProjectionHead {
 public:
  ProjectionHead(int feature_dim, const ProjectionSpec& spec, Rng& rng,
                 const std::string& prefix = "proj");

  nn::RowMat forward_raw(const nn::RowMat& features, bool cache);  // pre-normalization
  nn::RowMat project(const nn::RowMat& features);                  // unit rows
  nn::RowMat backward(const nn::RowMat& graw);
  std::vector<nn::ParamRef> params();
  int output_dim() const { return spec_.output_dim; }

 private:
  ProjectionSpec spec_;
  nn::Linear fc0_, fc1_;
  nn::ReLU relu_;
};

nn::RowMat l2_normalize_rows(const nn::RowMat& m);

// U-Net: the Encoder above plus a nearest-upsample decoder with skip
// concatenation and a 1x1 class head.
class UNet {
 public:
  UNet(const EncoderSpec& spec, int num_classes, Rng& rng);

  nn::Tensor forward(const nn::Tensor& x, bool cache);  // B x classes x S x S scores
  nn::Tensor backward(const nn::Tensor& gscores);
  std::vector<nn::ParamRef> params();
  Encoder& encoder() { return encoder_; }
  int num_classes() const { return num_classes_; }

 private:
  struct UpBlock {
    nn::UpsampleNearest2 up;
    nn::Conv2d reduce;  // deeper channels -> skip channels
    nn::ReLU relu_a;
    nn::Conv2d fuse;    // concat channels -> skip channels
    nn::ReLU relu_b;
  };
  Encoder encoder_;
  std::vector<UpBlock> ups_;  // deepest merge first
  nn::Conv2d head_;
  int num_classes_;
};

// --- weight plumbing ---

std::vector<NamedArray> export_arrays(const std::vector<nn::ParamRef>& params);
// Every param must find its array, by name and shape.
void import_arrays(const std::vector<nn::ParamRef>& params,
                   const std::vector<NamedArray>& arrays);

struct TransferReport {
  std::vector<std::string> copied;
  std::vector<std::string> skipped;
};

// Copies encoder-named arrays from a pretraining checkpoint into the
// segmentation net; projection-head (and any other) arrays are skipped and the
// decoder keeps its fresh initialization. Zero matches is an error.
TransferReport transfer_encoder(const Checkpoint& ckpt, UNet& net);

// Spec round-trip through checkpoint metadata.
void encoder_spec_to_meta(const EncoderSpec& spec, CheckpointMeta& meta);
EncoderSpec encoder_spec_from_meta(const CheckpointMeta& meta);

}  // namespace cltci
