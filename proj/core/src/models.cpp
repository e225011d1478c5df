#include "cltci/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cltci {

std::string to_string(EncoderVariant v) {
  return v == EncoderVariant::TinyCnn ? "tiny-cnn" : "unet-encoder";
}

EncoderVariant encoder_variant_from_string(const std::string& s) {
  if (s == "tiny-cnn") return EncoderVariant::TinyCnn;
  if (s == "unet-encoder") return EncoderVariant::UnetEncoder;
  throw std::invalid_argument("unknown encoder variant: " + s);
}

void EncoderSpec::validate() const {
  if (stage_channels.size() < 2)
    throw std::invalid_argument("EncoderSpec: need at least 2 stages");
  for (int c : stage_channels)
    if (c < 1) throw std::invalid_argument("EncoderSpec: non-positive channel count");
  const int down = 1 << (stages() - 1);
  if (input_size < down || input_size % down != 0)
    throw std::invalid_argument("EncoderSpec: input_size must be divisible by 2^(stages-1)");
}

EncoderSpec EncoderSpec::tiny_cnn(int input_size) {
  EncoderSpec s;
  s.variant = EncoderVariant::TinyCnn;
  s.input_size = input_size;
  s.stage_channels = {8, 16, 32, 64};
  return s;
}

EncoderSpec EncoderSpec::unet_encoder(int input_size) {
  EncoderSpec s;
  s.variant = EncoderVariant::UnetEncoder;
  s.input_size = input_size;
  s.stage_channels = {64, 128, 256, 512};
  return s;
}

Encoder::Encoder(const EncoderSpec& spec, Rng& rng, const std::string& prefix) : spec_(spec) {
  spec_.validate();
  int cin = 1;
  for (int s = 0; s < spec_.stages(); ++s) {
    const int cout = spec_.stage_channels[s];
    const std::string base = prefix + ".stage" + std::to_string(s);
    stages_.push_back(Stage{nn::Conv2d(base + ".conv0", cin, cout, 3, rng),
                            nn::Conv2d(base + ".conv1", cout, cout, 3, rng),
                            nn::ReLU{}, nn::ReLU{}});
    cin = cout;
  }
  pools_.resize(spec_.stages() - 1);
}

EncoderOutput Encoder::forward(const nn::Tensor& x, bool cache) {
  if (x.c != 1 || x.h != spec_.input_size || x.w != spec_.input_size)
    throw std::invalid_argument("Encoder: expected Bx1x" + std::to_string(spec_.input_size) +
                                "x" + std::to_string(spec_.input_size) + " input");
  EncoderOutput out;
  nn::Tensor t = x;
  for (int s = 0; s < spec_.stages(); ++s) {
    t = stages_[s].relu0.forward(stages_[s].conv0.forward(t, cache), cache);
    t = stages_[s].relu1.forward(stages_[s].conv1.forward(t, cache), cache);
    out.skips.push_back(t);
    if (s + 1 < spec_.stages()) t = pools_[s].forward(t, cache);
  }
  out.features = gap_.forward(t, cache);
  return out;
}

nn::Tensor Encoder::backward(const nn::RowMat* gfeatures, std::vector<nn::Tensor>* gskips) {
  if (gskips && static_cast<int>(gskips->size()) != spec_.stages())
    throw std::invalid_argument("Encoder::backward: skip gradient count mismatch");
  nn::Tensor g;
  bool have = false;
  if (gfeatures) {
    g = gap_.backward(*gfeatures);
    have = true;
  }
  for (int s = spec_.stages() - 1; s >= 0; --s) {
    if (gskips && (*gskips)[s].size() > 0) {
      if (!have) {
        g = (*gskips)[s];
        have = true;
      } else {
        for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] += (*gskips)[s].v[i];
      }
    }
    if (!have) throw std::invalid_argument("Encoder::backward: no upstream gradient");
    g = stages_[s].conv0.backward(stages_[s].relu0.backward(
        stages_[s].conv1.backward(stages_[s].relu1.backward(g))));
    if (s > 0) g = pools_[s - 1].backward(g);
  }
  return g;
}

std::vector<nn::ParamRef> Encoder::params() {
  std::vector<nn::ParamRef> out;
  for (auto& s : stages_) {
    s.conv0.collect(out);
    s.conv1.collect(out);
  }
  return out;
}

ProjectionHead::ProjectionHead(int feature_dim, const ProjectionSpec& spec, Rng& rng,
                               const std::string& prefix)
    : spec_(spec),
      fc0_(prefix + ".fc0", feature_dim, spec.hidden_dim > 0 ? spec.hidden_dim : feature_dim,
           rng),
      fc1_(prefix + ".fc1", spec.hidden_dim > 0 ? spec.hidden_dim : feature_dim,
           spec.output_dim, rng) {
  if (spec.output_dim < 1) throw std::invalid_argument("ProjectionSpec: bad output_dim");
}

namespace {
nn::Tensor as_tensor(const nn::RowMat& m) {
  nn::Tensor t(static_cast<int>(m.rows()), static_cast<int>(m.cols()), 1, 1);
  std::copy(m.data(), m.data() + m.size(), t.v.data());
  return t;
}
nn::RowMat as_matrix(const nn::Tensor& t) {
  nn::RowMat m(t.n, t.c);
  std::copy(t.v.data(), t.v.data() + t.v.size(), m.data());
  return m;
}
}  // namespace

nn::RowMat ProjectionHead::forward_raw(const nn::RowMat& features, bool cache) {
  nn::RowMat h = fc0_.forward(features, cache);
  h = as_matrix(relu_.forward(as_tensor(h), cache));
  return fc1_.forward(h, cache);
}

nn::RowMat ProjectionHead::project(const nn::RowMat& features) {
  return l2_normalize_rows(forward_raw(features, /*cache=*/false));
}

nn::RowMat ProjectionHead::backward(const nn::RowMat& graw) {
  nn::RowMat g = fc1_.backward(graw);
  g = as_matrix(relu_.backward(as_tensor(g)));
  return fc0_.backward(g);
}

std::vector<nn::ParamRef> ProjectionHead::params() {
  std::vector<nn::ParamRef> out;
  fc0_.collect(out);
  fc1_.collect(out);
  return out;
}

nn::RowMat l2_normalize_rows(const nn::RowMat& m) {
  nn::RowMat out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const float norm = out.row(i).norm();
    if (norm < 1e-12f)
      throw std::invalid_argument("l2_normalize_rows: zero-norm row " + std::to_string(i));
    out.row(i) /= norm;
  }
  return out;
}

UNet::UNet(const EncoderSpec& spec, int num_classes, Rng& rng)
    : encoder_(spec, rng, "encoder"),
      head_("decoder.head", spec.stage_channels.front(), num_classes, 1, rng),
      num_classes_(num_classes) {
  if (num_classes < 2) throw std::invalid_argument("UNet: need >= 2 classes");
  const auto& ch = spec.stage_channels;
  for (int s = static_cast<int>(ch.size()) - 2; s >= 0; --s) {
    const std::string base = "decoder.up" + std::to_string(s);
    ups_.push_back(UpBlock{nn::UpsampleNearest2{},
                           nn::Conv2d(base + ".reduce", ch[s + 1], ch[s], 3, rng),
                           nn::ReLU{},
                           nn::Conv2d(base + ".fuse", 2 * ch[s], ch[s], 3, rng),
                           nn::ReLU{}});
  }
}

nn::Tensor UNet::forward(const nn::Tensor& x, bool cache) {
  EncoderOutput enc = encoder_.forward(x, cache);
  const auto& ch = encoder_.spec().stage_channels;
  nn::Tensor d = enc.skips.back();
  for (std::size_t u = 0; u < ups_.size(); ++u) {
    const int s = static_cast<int>(ch.size()) - 2 - static_cast<int>(u);
    UpBlock& blk = ups_[u];
    d = blk.up.forward(d);
    d = blk.relu_a.forward(blk.reduce.forward(d, cache), cache);
    d = nn::concat_channels(d, enc.skips[s]);
    d = blk.relu_b.forward(blk.fuse.forward(d, cache), cache);
  }
  return head_.forward(d, cache);
}

nn::Tensor UNet::backward(const nn::Tensor& gscores) {
  const auto& ch = encoder_.spec().stage_channels;
  std::vector<nn::Tensor> gskips(ch.size());
  nn::Tensor g = head_.backward(gscores);
  for (int u = static_cast<int>(ups_.size()) - 1; u >= 0; --u) {
    const int s = static_cast<int>(ch.size()) - 2 - u;
    UpBlock& blk = ups_[u];
    g = blk.fuse.backward(blk.relu_b.backward(g));
    nn::Tensor gd, gskip;
    nn::split_channels(g, ch[s], gd, gskip);
    gskips[s] = std::move(gskip);
    g = blk.up.backward(blk.reduce.backward(blk.relu_a.backward(gd)));
  }
  gskips.back() = std::move(g);
  return encoder_.backward(nullptr, &gskips);
}

std::vector<nn::ParamRef> UNet::params() {
  std::vector<nn::ParamRef> out = encoder_.params();
  for (auto& blk : ups_) {
    blk.reduce.collect(out);
    blk.fuse.collect(out);
  }
  head_.collect(out);
  return out;
}

std::vector<NamedArray> export_arrays(const std::vector<nn::ParamRef>& params) {
  std::vector<NamedArray> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back({p.name, p.shape, *p.value});
  return out;
}

void import_arrays(const std::vector<nn::ParamRef>& params,
                   const std::vector<NamedArray>& arrays) {
  for (const auto& p : params) {
    const NamedArray* a = nullptr;
    for (const auto& cand : arrays)
      if (cand.name == p.name) {
        a = &cand;
        break;
      }
    if (!a) throw std::invalid_argument("import_arrays: missing array '" + p.name + "'");
    if (a->shape != p.shape || a->data.size() != p.value->size())
      throw std::invalid_argument("import_arrays: shape mismatch for '" + p.name + "'");
    *p.value = a->data;
  }
}

TransferReport transfer_encoder(const Checkpoint& ckpt, UNet& net) {
  const std::string want = to_string(net.encoder().spec().variant);
  if (ckpt.meta.variant != want)
    throw std::invalid_argument("transfer_encoder: checkpoint variant '" + ckpt.meta.variant +
                                "' does not match network encoder '" + want + "'");
  auto params = net.params();
  TransferReport report;
  for (const auto& a : ckpt.arrays) {
    bool copied = false;
    if (a.name.rfind("encoder.", 0) == 0) {
      for (const auto& p : params) {
        if (p.name == a.name && p.shape == a.shape) {
          *p.value = a.data;
          copied = true;
          break;
        }
      }
    }
    (copied ? report.copied : report.skipped).push_back(a.name);
  }
  if (report.copied.empty())
    throw std::invalid_argument("transfer_encoder: no encoder arrays matched (wrong variant?)");
  return report;
}

void encoder_spec_to_meta(const EncoderSpec& spec, CheckpointMeta& meta) {
  meta.variant = to_string(spec.variant);
  meta.extra["input_size"] = std::to_string(spec.input_size);
  std::ostringstream ch;
  for (std::size_t i = 0; i < spec.stage_channels.size(); ++i) {
    if (i) ch << ',';
    ch << spec.stage_channels[i];
  }
  meta.extra["stage_channels"] = ch.str();
}

EncoderSpec encoder_spec_from_meta(const CheckpointMeta& meta) {
  EncoderSpec spec;
  spec.variant = encoder_variant_from_string(meta.variant);
  spec.input_size = std::stoi(meta.extra.at("input_size"));
  spec.stage_channels.clear();
  std::istringstream ch(meta.extra.at("stage_channels"));
  std::string tok;
  while (std::getline(ch, tok, ',')) spec.stage_channels.push_back(std::stoi(tok));
  spec.validate();
  return spec;
}

}  // namespace cltci
