#pragma once

#include <deque>
#include <string>
#include <vector>

#include "cltci/checkpoint.hpp"
#include "cltci/contrastive.hpp"

namespace cltci {

struct MoCoConfig {
  double momentum = 0.999;
  int queue_capacity = 256;  // desk scale; 4096 at full scale

  void validate() const;
};

// Fixed-capacity FIFO dictionary of (unit vector, patient pseudo-label) pairs.
// Single-owner: the training loop mutates it between steps only.
class LabeledQueue {
 public:
  explicit LabeledQueue(int capacity, int dim);

  int capacity() const { return capacity_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(labels_.size()); }
  bool empty() const { return labels_.empty(); }

  // Appends keys oldest-to-newest; evicts from the front when full.
  // k > capacity or non-unit rows are errors.
  void enqueue(const Matrix& keys, const std::vector<std::string>& labels);

  // Snapshot in FIFO order (row 0 = oldest).
  Matrix vectors() const;
  const std::deque<std::string>& labels() const { return labels_; }

 private:
  int capacity_;
  int dim_;
  std::deque<Eigen::VectorXd> entries_;
  std::deque<std::string> labels_;
};

// key' = m*key + (1-m)*query, elementwise over name-aligned float arrays.
// The blend is evaluated in double and rounded once per element.
std::vector<NamedArray> momentum_update(const std::vector<NamedArray>& key_weights,
                                        const std::vector<NamedArray>& query_weights,
                                        double m);

// Candidate set for a MoCo step: each anchor sees its own sibling key plus the
// whole queue snapshot. Queue entries matching the anchor's pseudo-label are
// positive when match_labels is set; the sibling is always positive.
struct CandidateSet {
  Matrix candidates;                // (2N + queue size) x d
  std::vector<std::string> labels;  // aligned with candidate rows
  PositiveMask mask;
};

CandidateSet queue_candidates(const LabeledQueue& queue,
                              const std::vector<std::string>& anchor_labels,
                              const Matrix& sibling_keys, bool match_labels = true);

}  // namespace cltci
