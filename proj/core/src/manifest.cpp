#include "cltci/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace cltci {

Manifest::Manifest(std::vector<ImageRecord> records) : records_(std::move(records)) {
  std::set<std::string> seen;
  std::vector<std::string> dups;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.image_id.empty() || r.patient_id.empty() || r.image_path.empty())
      throw std::invalid_argument("manifest record " + std::to_string(i) +
                                  ": image_id, patient_id and image_path are required");
    if (r.timestamp_index && *r.timestamp_index < 0)
      throw std::invalid_argument("manifest record " + r.image_id + ": negative timestamp_index");
    if (!seen.insert(r.image_id).second) dups.push_back(r.image_id);
    by_patient_[r.patient_id].push_back(i);
  }
  if (!dups.empty()) {
    std::string msg = "duplicate image_id(s):";
    for (const auto& d : dups) msg += " " + d;
    throw std::invalid_argument(msg);
  }
  patient_order_.reserve(by_patient_.size());
  for (const auto& [pid, _] : by_patient_) patient_order_.push_back(pid);
}

const std::vector<std::size_t>& Manifest::patient_records(const std::string& patient_id) const {
  auto it = by_patient_.find(patient_id);
  if (it == by_patient_.end())
    throw std::out_of_range("unknown patient_id: " + patient_id);
  return it->second;
}

bool Manifest::all_have_masks() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const ImageRecord& r) { return r.mask_path.has_value(); });
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  const fs::path base = fs::path(path).parent_path();

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty manifest: " + path);
  header = strip(header);
  const char sep = header.find('\t') != std::string::npos ? '\t' : ',';

  auto columns = split(header, sep);
  for (auto& c : columns) c = strip(c);
  auto col = [&](const std::string& name) -> int {
    auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
  };
  const int c_id = col("image_id"), c_pid = col("patient_id"), c_img = col("image_path");
  const int c_mask = col("mask_path"), c_ts = col("timestamp_index");
  if (c_id < 0 || c_pid < 0 || c_img < 0)
    throw std::runtime_error("manifest header must declare image_id, patient_id, image_path: " +
                             path);

  std::vector<ImageRecord> records;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    auto fields = split(strip(line), sep);
    if (fields.size() < columns.size())
      throw std::runtime_error("manifest line " + std::to_string(lineno) + ": expected " +
                               std::to_string(columns.size()) + " fields");
    ImageRecord r;
    r.image_id = strip(fields[c_id]);
    r.patient_id = strip(fields[c_pid]);
    r.image_path = (base / strip(fields[c_img])).lexically_normal().string();
    if (c_mask >= 0) {
      std::string m = strip(fields[c_mask]);
      if (!m.empty()) r.mask_path = (base / m).lexically_normal().string();
    }
    if (c_ts >= 0) {
      std::string t = strip(fields[c_ts]);
      if (!t.empty()) r.timestamp_index = std::stoi(t);
    }
    records.push_back(std::move(r));
  }

  Manifest manifest(std::move(records));

  std::vector<std::string> missing;
  for (const auto& r : manifest.records()) {
    if (!fs::exists(r.image_path)) missing.push_back(r.image_path);
    if (r.mask_path && !fs::exists(*r.mask_path)) missing.push_back(*r.mask_path);
  }
  if (!missing.empty()) {
    std::string msg = "manifest references missing file(s):";
    for (const auto& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }
  return manifest;
}

void save_manifest(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  const fs::path base = fs::path(path).parent_path();
  auto relative = [&](const std::string& p) {
    if (base.empty()) return p;
    fs::path rel = fs::path(p).lexically_relative(base);
    return rel.empty() ? p : rel.generic_string();
  };
  out << "image_id\tpatient_id\timage_path\tmask_path\ttimestamp_index\n";
  for (const auto& r : manifest.records()) {
    out << r.image_id << '\t' << r.patient_id << '\t' << relative(r.image_path) << '\t';
    if (r.mask_path) out << relative(*r.mask_path);
    out << '\t';
    if (r.timestamp_index) out << *r.timestamp_index;
    out << '\n';
  }
  if (!out) throw std::runtime_error("short write: " + path);
}

}  // namespace cltci
