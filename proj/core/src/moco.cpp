#include "cltci/moco.hpp"

#include <cmath>
#include <stdexcept>

namespace cltci {

void MoCoConfig::validate() const {
  if (momentum < 0.0 || momentum > 1.0)
    throw std::invalid_argument("MoCoConfig: momentum outside [0,1]");
  if (queue_capacity < 1) throw std::invalid_argument("MoCoConfig: queue_capacity must be >= 1");
}

LabeledQueue::LabeledQueue(int capacity, int dim) : capacity_(capacity), dim_(dim) {
  if (capacity < 1) throw std::invalid_argument("LabeledQueue: capacity must be >= 1");
  if (dim < 1) throw std::invalid_argument("LabeledQueue: dim must be >= 1");
}

void LabeledQueue::enqueue(const Matrix& keys, const std::vector<std::string>& labels) {
  if (keys.rows() != static_cast<Eigen::Index>(labels.size()))
    throw std::invalid_argument("LabeledQueue::enqueue: key/label count mismatch");
  if (keys.cols() != dim_) throw std::invalid_argument("LabeledQueue::enqueue: dim mismatch");
  if (keys.rows() > capacity_)
    throw std::invalid_argument("LabeledQueue::enqueue: more keys than capacity");
  for (Eigen::Index i = 0; i < keys.rows(); ++i)
    if (std::abs(keys.row(i).norm() - 1.0) > 1e-6)
      throw std::invalid_argument("LabeledQueue::enqueue: row " + std::to_string(i) +
                                  " is not unit-norm");
  for (Eigen::Index i = 0; i < keys.rows(); ++i) {
    if (size() == capacity_) {
      entries_.pop_front();
      labels_.pop_front();
    }
    entries_.push_back(keys.row(i).transpose());
    labels_.push_back(labels[i]);
  }
}

Matrix LabeledQueue::vectors() const {
  Matrix out(size(), dim_);
  for (int i = 0; i < size(); ++i) out.row(i) = entries_[i].transpose();
  return out;
}

std::vector<NamedArray> momentum_update(const std::vector<NamedArray>& key_weights,
                                        const std::vector<NamedArray>& query_weights,
                                        double m) {
  if (m < 0.0 || m > 1.0) throw std::invalid_argument("momentum_update: m outside [0,1]");
  if (key_weights.size() != query_weights.size())
    throw std::invalid_argument("momentum_update: array count mismatch");
  std::vector<NamedArray> out;
  out.reserve(key_weights.size());
  for (std::size_t a = 0; a < key_weights.size(); ++a) {
    const NamedArray& key = key_weights[a];
    const NamedArray& query = query_weights[a];
    if (key.name != query.name || key.shape != query.shape ||
        key.data.size() != query.data.size())
      throw std::invalid_argument("momentum_update: mismatch at array '" + key.name + "'");
    NamedArray blended = key;
    for (std::size_t i = 0; i < key.data.size(); ++i)
      blended.data[i] = static_cast<float>(m * static_cast<double>(key.data[i]) +
                                           (1.0 - m) * static_cast<double>(query.data[i]));
    out.push_back(std::move(blended));
  }
  return out;
}

CandidateSet queue_candidates(const LabeledQueue& queue,
                              const std::vector<std::string>& anchor_labels,
                              const Matrix& sibling_keys, bool match_labels) {
  const Eigen::Index n = sibling_keys.rows();
  if (static_cast<Eigen::Index>(anchor_labels.size()) != n)
    throw std::invalid_argument("queue_candidates: label/key count mismatch");
  if (!queue.empty() && queue.dim() != sibling_keys.cols())
    throw std::invalid_argument("queue_candidates: queue/key dim mismatch");

  const int q = queue.size();
  CandidateSet set;
  set.candidates.resize(n + q, sibling_keys.cols());
  set.candidates.topRows(n) = sibling_keys;
  if (q > 0) set.candidates.bottomRows(q) = queue.vectors();
  set.labels = anchor_labels;
  set.labels.insert(set.labels.end(), queue.labels().begin(), queue.labels().end());

  // anchor i sees only its own sibling key among the in-batch keys
  set.mask.positives = BoolMatrix::Constant(n, n + q, false);
  set.mask.valid = BoolMatrix::Constant(n, n + q, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    set.mask.valid(i, i) = true;
    set.mask.positives(i, i) = true;  // sibling guarantees |P_i| >= 1
    for (int k = 0; k < q; ++k) {
      set.mask.valid(i, n + k) = true;
      if (match_labels && set.labels[n + k] == anchor_labels[i])
        set.mask.positives(i, n + k) = true;
    }
  }
  return set;
}

}  // namespace cltci
