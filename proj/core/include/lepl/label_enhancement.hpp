#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lepl/types.hpp"

namespace lepl {

/// Top-K cosine neighbours of every instance, most similar first.
class NeighborIndex {
 public:
  NeighborIndex(std::vector<std::vector<Index>> lists, Index k);

  Index n() const noexcept { return static_cast<Index>(lists_.size()); }
  /// Requested K; each list holds min(K, n-1) entries.
  Index k() const noexcept { return k_; }
  const std::vector<Index>& neighbors(Index i) const { return lists_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<std::vector<Index>> lists_;
  Index k_;
};

/// Ties on similarity go to the lower index. Throws NumericError naming the
/// row when a feature row has zero norm.
NeighborIndex build_knn(const FeatureMatrix& x, Index k);

/// Soft label distribution D = sigmoid(logits), with observed positives
/// pinned at exactly 1 and excluded from optimisation.
class SoftLabelMatrix {
 public:
  /// Logit assigned to clamped entries; sigmoid of it rounds to 1.
  static constexpr double kClampedLogit = 40.0;

  SoftLabelMatrix(Matrix logits, BinaryMatrix clamped);

  Index n() const noexcept { return logits_.rows(); }
  Index classes() const noexcept { return logits_.cols(); }
  const Matrix& logits() const noexcept { return logits_; }
  const Matrix& values() const noexcept { return values_; }
  const BinaryMatrix& clamped() const noexcept { return clamped_; }
  bool is_clamped(Index i, Index c) const noexcept { return clamped_(i, c) != 0; }

  /// Replaces the free logits; clamped entries keep their pinned value.
  void set_logits(const Matrix& logits);

  /// Rebuilds from stored values (e.g. a soft-label file). Entries of
  /// `values` under the mask must equal 1.
  static SoftLabelMatrix from_values(const Matrix& values, BinaryMatrix clamped);

 private:
  void refresh_values();

  Matrix logits_;
  Matrix values_;
  BinaryMatrix clamped_;
};

/// D initialised from single-positive labels: observed entries clamped at 1,
/// everything else at `init_bg`.
SoftLabelMatrix init_soft_labels(const LabelMatrix& partial, double init_bg);

struct LeConfig {
  double tau = 0.5;
  Index k = 10;
  Index steps = 200;
  double lr = 0.1;
  /// Background value for unobserved entries; unset means 1/C.
  std::optional<double> init_bg;

  void validate() const;
  double background_for(Index classes) const noexcept;
};

/// Mean over instances of the neighbour-contrastive term
///   -log( sum_{j in N(i)} exp(cos(D_i,D_j)/tau) / sum_{k != i} exp(cos(D_i,D_k)/tau) ).
double le_loss(const SoftLabelMatrix& d, const NeighborIndex& nbr, double tau);

/// Gradient of le_loss with respect to the logits. Clamped entries are 0.
Matrix le_grad(const SoftLabelMatrix& d, const NeighborIndex& nbr, double tau);

struct LeEvaluation {
  double loss = 0.0;
  Matrix grad;
};

/// Loss and gradient from one pass over the similarity matrix.
LeEvaluation le_loss_and_grad(const SoftLabelMatrix& d, const NeighborIndex& nbr, double tau);
// Same, with an n x n buffer the caller keeps alive between steps.
LeEvaluation le_loss_and_grad(const SoftLabelMatrix& d, const NeighborIndex& nbr, double tau,
                              Matrix& scratch);

struct EnhanceResult {
  SoftLabelMatrix soft;
  std::vector<double> loss_trace;  // loss before each step and after the last
  std::vector<std::string> warnings;
};

/// init_soft_labels, build_knn, then cfg.steps full-batch gradient steps on
/// the logits.
EnhanceResult enhance(const FeatureMatrix& x, const LabelMatrix& partial, const LeConfig& cfg);

}  // namespace lepl
