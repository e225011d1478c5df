#include "cltci/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian; big-endian hosts are unsupported");

namespace cltci {

namespace {
constexpr char kMagic[8] = {'C', 'L', 'T', 'C', 'I', 'v', '1', '\n'};
}

const NamedArray* Checkpoint::find(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return &a;
  return nullptr;
}

void Checkpoint::validate() const {
  std::set<std::string> seen;
  for (const auto& a : arrays) {
    if (!seen.insert(a.name).second)
      throw std::invalid_argument("Checkpoint: duplicate array name '" + a.name + "'");
    std::size_t count = 1;
    for (int d : a.shape) {
      if (d <= 0) throw std::invalid_argument("Checkpoint: bad shape for '" + a.name + "'");
      count *= static_cast<std::size_t>(d);
    }
    if (count != a.data.size())
      throw std::invalid_argument("Checkpoint: shape/data mismatch for '" + a.name + "'");
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  ckpt.validate();
  nlohmann::json meta;
  meta["variant"] = ckpt.meta.variant;
  meta["trained_by"] = ckpt.meta.trained_by;
  meta["epoch"] = ckpt.meta.epoch;
  meta["config_hash"] = ckpt.meta.config_hash;
  meta["init_scheme"] = ckpt.meta.init_scheme;
  meta["extra"] = ckpt.meta.extra;

  nlohmann::json shapes = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& a : ckpt.arrays) {
    shapes.push_back({{"name", a.name},
                      {"shape", a.shape},
                      {"offset", offset},
                      {"count", a.data.size()}});
    offset += a.data.size() * sizeof(float);
  }
  meta["arrays"] = std::move(shapes);

  const std::string text = meta.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& a : ckpt.arrays)
    out.write(reinterpret_cast<const char*>(a.data.data()),
              static_cast<std::streamsize>(a.data.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("truncated checkpoint metadata: " + path);

  nlohmann::json meta = nlohmann::json::parse(text);
  Checkpoint ckpt;
  ckpt.meta.variant = meta.at("variant").get<std::string>();
  ckpt.meta.trained_by = meta.at("trained_by").get<std::string>();
  ckpt.meta.epoch = meta.at("epoch").get<int>();
  ckpt.meta.config_hash = meta.at("config_hash").get<std::string>();
  ckpt.meta.init_scheme = meta.at("init_scheme").get<std::string>();
  ckpt.meta.extra = meta.at("extra").get<std::map<std::string, std::string>>();

  for (const auto& entry : meta.at("arrays")) {
    NamedArray a;
    a.name = entry.at("name").get<std::string>();
    a.shape = entry.at("shape").get<std::vector<int>>();
    a.data.resize(entry.at("count").get<std::size_t>());
    ckpt.arrays.push_back(std::move(a));
  }
  for (auto& a : ckpt.arrays) {
    in.read(reinterpret_cast<char*>(a.data.data()),
            static_cast<std::streamsize>(a.data.size() * sizeof(float)));
    if (!in) throw std::runtime_error("truncated checkpoint payload: " + path);
  }
  ckpt.validate();
  return ckpt;
}

}  // namespace cltci
