#include "cltci/contrastive.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cltci {

namespace {

constexpr double kNormEps = 1e-12;

// Row-normalized copy plus the original norms; throws on zero-norm rows.
Matrix normalize_rows(const Matrix& m, Eigen::VectorXd& norms, const char* what) {
  norms = m.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i)
    if (norms(i) < kNormEps)
      throw std::invalid_argument(std::string(what) + ": zero-norm row " + std::to_string(i));
  return norms.cwiseInverse().asDiagonal() * m;
}

void check_loss_inputs(const Matrix& anchors, const Matrix& candidates, const PositiveMask& mask,
                       const LossConfig& cfg) {
  if (cfg.temperature <= 0.0) throw std::invalid_argument("LossConfig: temperature must be > 0");
  if (anchors.cols() != candidates.cols())
    throw std::invalid_argument("contrastive_loss: dimension mismatch");
  if (mask.anchors() != anchors.rows() || mask.candidates() != candidates.rows())
    throw std::invalid_argument("contrastive_loss: mask shape mismatch");
  mask.validate();
}

// dL/ds for every (anchor, candidate) pair, the per-anchor losses, and the
// reduction weight. Shared by the value and gradient paths.
struct LogitGrad {
  Matrix g;                   // dTotal/ds, zero outside valid
  Eigen::VectorXd per_anchor;
  double total = 0.0;
};

LogitGrad loss_core(const Matrix& sim, const PositiveMask& mask, const LossConfig& cfg,
                    bool want_grad) {
  const Eigen::Index A = sim.rows(), C = sim.cols();
  const double inv_tau = 1.0 / cfg.temperature;
  const double weight = cfg.reduction == Reduction::Mean ? 1.0 / static_cast<double>(A) : 1.0;

  LogitGrad out;
  out.per_anchor.resize(A);
  if (want_grad) out.g = Matrix::Zero(A, C);

  for (Eigen::Index i = 0; i < A; ++i) {
    // max over the valid candidates stabilizes exp at small temperatures
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < C; ++k) {
      if (!mask.valid(i, k)) continue;
      const double l = sim(i, k) * inv_tau;
      if (!std::isfinite(l))
        throw std::invalid_argument("contrastive_loss: non-finite similarity at anchor " +
                                    std::to_string(i));
      mx = std::max(mx, l);
    }
    double denom = 0.0;
    for (Eigen::Index k = 0; k < C; ++k)
      if (mask.valid(i, k)) denom += std::exp(sim(i, k) * inv_tau - mx);
    const double lse = mx + std::log(denom);

    int n_pos = 0;
    double pos_logit_sum = 0.0;
    for (Eigen::Index k = 0; k < C; ++k) {
      if (!mask.positives(i, k)) continue;
      ++n_pos;
      pos_logit_sum += sim(i, k) * inv_tau;
    }
    const double li = lse - pos_logit_sum / n_pos;
    out.per_anchor(i) = li;
    if (!std::isfinite(li))
      throw std::invalid_argument("contrastive_loss: non-finite loss at anchor " +
                                  std::to_string(i));

    if (want_grad) {
      const double inv_pos = 1.0 / n_pos;
      for (Eigen::Index k = 0; k < C; ++k) {
        if (!mask.valid(i, k)) continue;
        const double p = std::exp(sim(i, k) * inv_tau - mx) / denom;
        const double m = mask.positives(i, k) ? inv_pos : 0.0;
        out.g(i, k) = weight * inv_tau * (p - m);
      }
    }
  }
  out.total = weight * out.per_anchor.sum();
  return out;
}

// Backprop through row normalization: a = x/|x|, upstream g on a.
void normalization_backward(const Matrix& unit, const Eigen::VectorXd& norms, Matrix& grad) {
  for (Eigen::Index i = 0; i < grad.rows(); ++i) {
    const double dot = grad.row(i).dot(unit.row(i));
    grad.row(i) = (grad.row(i) - dot * unit.row(i)) / norms(i);
  }
}

}  // namespace

void RepresentationBatch::validate() const {
  const Eigen::Index n = z.rows();
  if (static_cast<Eigen::Index>(patient_ids.size()) != n ||
      static_cast<Eigen::Index>(view_pair_index.size()) != n)
    throw std::invalid_argument("RepresentationBatch: field lengths disagree");
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = view_pair_index[i];
    if (s < 0 || s >= n || s == i || view_pair_index[s] != i)
      throw std::invalid_argument("RepresentationBatch: view_pair_index is not an involution");
    if (patient_ids[i] != patient_ids[s])
      throw std::invalid_argument("RepresentationBatch: sibling views disagree on patient_id");
    const double norm = z.row(i).norm();
    if (std::abs(norm - 1.0) > 1e-6)
      throw std::invalid_argument("RepresentationBatch: row " + std::to_string(i) +
                                  " is not unit-norm");
  }
}

void PositiveMask::validate() const {
  if (positives.rows() != valid.rows() || positives.cols() != valid.cols())
    throw std::invalid_argument("PositiveMask: shape mismatch");
  for (Eigen::Index i = 0; i < positives.rows(); ++i) {
    int n_pos = 0;
    for (Eigen::Index j = 0; j < positives.cols(); ++j) {
      if (positives(i, j) && !valid(i, j))
        throw std::invalid_argument("PositiveMask: positive outside valid at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      n_pos += positives(i, j);
    }
    if (n_pos == 0)
      throw std::invalid_argument("PositiveMask: anchor " + std::to_string(i) +
                                  " has no positives");
  }
}

Matrix cosine_similarity_matrix(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols() || a.cols() < 1)
    throw std::invalid_argument("cosine_similarity_matrix: dimension mismatch");
  Eigen::VectorXd na, nb;
  const Matrix ua = normalize_rows(a, na, "cosine_similarity_matrix: A");
  const Matrix ub = normalize_rows(b, nb, "cosine_similarity_matrix: B");
  return ua * ub.transpose();
}

PositiveMask build_positive_mask(const std::vector<std::string>& anchor_ids,
                                 const std::vector<std::string>& candidate_ids,
                                 const std::vector<int>* sibling_of) {
  if (anchor_ids.empty() || candidate_ids.empty())
    throw std::invalid_argument("build_positive_mask: empty id list");
  const Eigen::Index A = static_cast<Eigen::Index>(anchor_ids.size());
  const Eigen::Index C = static_cast<Eigen::Index>(candidate_ids.size());
  const bool square = A == C;

  PositiveMask mask;
  mask.positives = BoolMatrix::Constant(A, C, false);
  mask.valid = BoolMatrix::Constant(A, C, true);
  for (Eigen::Index i = 0; i < A; ++i) {
    for (Eigen::Index j = 0; j < C; ++j) {
      const bool self = square && i == j;
      if (self) mask.valid(i, j) = false;
      mask.positives(i, j) = !self && anchor_ids[i] == candidate_ids[j];
    }
  }
  if (sibling_of) {
    if (static_cast<Eigen::Index>(sibling_of->size()) != A)
      throw std::invalid_argument("build_positive_mask: sibling map length mismatch");
    for (Eigen::Index i = 0; i < A; ++i) {
      const int s = (*sibling_of)[i];
      if (s < 0 || s >= C || !mask.positives(i, s))
        throw std::invalid_argument("build_positive_mask: sibling of anchor " +
                                    std::to_string(i) + " is not a positive");
    }
  }
  mask.validate();  // rejects anchors with zero positives
  return mask;
}

PositiveMask build_sibling_mask(const std::vector<int>& sibling_of) {
  const Eigen::Index n = static_cast<Eigen::Index>(sibling_of.size());
  if (n == 0) throw std::invalid_argument("build_sibling_mask: empty sibling map");
  PositiveMask mask;
  mask.positives = BoolMatrix::Constant(n, n, false);
  mask.valid = BoolMatrix::Constant(n, n, true);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = sibling_of[i];
    if (s < 0 || s >= n || s == i)
      throw std::invalid_argument("build_sibling_mask: bad sibling index for anchor " +
                                  std::to_string(i));
    mask.valid(i, i) = false;
    mask.positives(i, s) = true;
  }
  return mask;
}

LossResult contrastive_loss(const Matrix& anchors, const Matrix& candidates,
                            const PositiveMask& mask, const LossConfig& cfg) {
  check_loss_inputs(anchors, candidates, mask, cfg);
  Eigen::VectorXd na, nc;
  const Matrix ua = normalize_rows(anchors, na, "contrastive_loss: anchors");
  const Matrix uc = normalize_rows(candidates, nc, "contrastive_loss: candidates");
  const Matrix sim = ua * uc.transpose();
  LogitGrad core = loss_core(sim, mask, cfg, /*want_grad=*/false);
  return {core.total, std::move(core.per_anchor)};
}

LossGradient contrastive_loss_gradient(const Matrix& anchors, const Matrix& candidates,
                                       const PositiveMask& mask, const LossConfig& cfg) {
  check_loss_inputs(anchors, candidates, mask, cfg);
  Eigen::VectorXd na, nc;
  const Matrix ua = normalize_rows(anchors, na, "contrastive_loss: anchors");
  const Matrix uc = normalize_rows(candidates, nc, "contrastive_loss: candidates");
  const Matrix sim = ua * uc.transpose();
  LogitGrad core = loss_core(sim, mask, cfg, /*want_grad=*/true);

  LossGradient grad;
  grad.anchors = core.g * uc;              // d/d(unit anchors)
  grad.candidates = core.g.transpose() * ua;
  normalization_backward(ua, na, grad.anchors);
  normalization_backward(uc, nc, grad.candidates);
  return grad;
}

LossResult contrastive_loss(const Matrix& views, const PositiveMask& mask,
                            const LossConfig& cfg) {
  return contrastive_loss(views, views, mask, cfg);
}

Matrix contrastive_loss_gradient(const Matrix& views, const PositiveMask& mask,
                                 const LossConfig& cfg) {
  check_loss_inputs(views, views, mask, cfg);
  Eigen::VectorXd norms;
  const Matrix unit = normalize_rows(views, norms, "contrastive_loss: views");
  const Matrix sim = unit * unit.transpose();
  LogitGrad core = loss_core(sim, mask, cfg, /*want_grad=*/true);

  // both roles feed the same normalized rows, so upstream grads add before
  // the normalization backward
  Matrix grad = core.g * unit + core.g.transpose() * unit;
  normalization_backward(unit, norms, grad);
  return grad;
}

LossResult contrastive_loss(const RepresentationBatch& batch, const LossConfig& cfg) {
  batch.validate();
  PositiveMask mask =
      build_positive_mask(batch.patient_ids, batch.patient_ids, &batch.view_pair_index);
  return contrastive_loss(batch.z, mask, cfg);
}

}  // namespace cltci
