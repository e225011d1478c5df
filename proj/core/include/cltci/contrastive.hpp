#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace cltci {

using Matrix = Eigen::MatrixXd;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// 2N augmented views with per-view patient ids; rows are expected unit-norm
// (the loss renormalizes, which is idempotent).
struct RepresentationBatch {
  Matrix z;                              // 2N x d
  std::vector<std::string> patient_ids;  // length 2N
  std::vector<int> view_pair_index;      // sibling view of each row

  void validate() const;
};

// Realizes the per-anchor positive sets: mask(i,j) marks candidate j positive
// for anchor i, valid(i,j) marks it admitted to the denominator. mask is a
// subset of valid; every anchor must keep at least one positive.
struct PositiveMask {
  BoolMatrix positives;
  BoolMatrix valid;

  Eigen::Index anchors() const { return positives.rows(); }
  Eigen::Index candidates() const { return positives.cols(); }
  void validate() const;
};

enum class Reduction { Sum, Mean };

struct LossConfig {
  double temperature = 0.1;
  Reduction reduction = Reduction::Mean;
};

struct LossResult {
  double total = 0.0;
  Eigen::VectorXd per_anchor;
};

// Gradients of the scalar loss w.r.t. the raw (pre-normalization) inputs.
struct LossGradient {
  Matrix anchors;
  Matrix candidates;
};

// Entry (i,j) = <A_i, B_j> / (|A_i||B_j|). Zero-norm rows are an error naming
// the row.
Matrix cosine_similarity_matrix(const Matrix& a, const Matrix& b);

// In-batch mask: candidate j positive for anchor i iff same id and i != j;
// valid excludes only the self comparison. sibling_of, when given, is checked
// to be contained in the positives.
PositiveMask build_positive_mask(const std::vector<std::string>& anchor_ids,
                                 const std::vector<std::string>& candidate_ids,
                                 const std::vector<int>* sibling_of = nullptr);

// Positives are exactly the sibling view (the single-positive baselines).
PositiveMask build_sibling_mask(const std::vector<int>& sibling_of);

// Multi-positive temperature-scaled loss:
//   L_i = -(1/|P_i|) sum_{j in P_i} log( exp(s_ij/tau) / sum_{k in V_i} exp(s_ik/tau) )
// with log-sum-exp max-subtraction. `tied` means candidates are physically the
// anchor rows (the in-batch case); gradients then accumulate both roles.
LossResult contrastive_loss(const Matrix& anchors, const Matrix& candidates,
                            const PositiveMask& mask, const LossConfig& cfg);
LossGradient contrastive_loss_gradient(const Matrix& anchors, const Matrix& candidates,
                                       const PositiveMask& mask, const LossConfig& cfg);

// In-batch (tied) forms over the 2N views.
LossResult contrastive_loss(const Matrix& views, const PositiveMask& mask,
                            const LossConfig& cfg);
Matrix contrastive_loss_gradient(const Matrix& views, const PositiveMask& mask,
                                 const LossConfig& cfg);

// Convenience: patient-matched in-batch loss over a RepresentationBatch.
LossResult contrastive_loss(const RepresentationBatch& batch, const LossConfig& cfg);

}  // namespace cltci
