#pragma once

#include <cstdint>
#include <filesystem>

#include "lepl/types.hpp"

namespace lepl {

/// Label co-occurrence statistics. `a` is the raw co-occurrence matrix;
/// `a_hat` and `degree` are filled by normalize().
struct CoOccurrenceGraph {
  Matrix a;
  Matrix a_hat;
  Vector degree;
  bool normalized = false;

  Index classes() const noexcept { return a.rows(); }
};

/// Regularisation added to the diagonal of labels with zero degree.
inline constexpr double kDeadLabelDelta = 1e-6;

/// A_ij = (1/n_val) sum_k y_ki y_kj.
CoOccurrenceGraph cooccurrence(const LabelMatrix& val_labels);

/// Symmetric normalisation A_hat = Q^{-1/2} A Q^{-1/2}, Q_ii = sum_j A_ij.
/// Zero-degree labels first receive kDeadLabelDelta on their diagonal.
CoOccurrenceGraph normalize(CoOccurrenceGraph graph);

class LabelEmbeddings {
 public:
  explicit LabelEmbeddings(Matrix values);

  Index classes() const noexcept { return values_.rows(); }
  Index dim() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

/// Seeded normal embeddings with standard deviation 1/sqrt(dim).
LabelEmbeddings random_embeddings(Index classes, Index dim, std::uint64_t seed);
LabelEmbeddings load_embeddings(const std::filesystem::path& path);
void write_embeddings(const LabelEmbeddings& e, const std::filesystem::path& path);

/// Two-layer GCN weights plus the forward caches needed for backprop.
/// Replacing either weight matrix invalidates the caches.
class GcnParameters {
 public:
  GcnParameters(Matrix w0, Matrix w1);

  const Matrix& w0() const noexcept { return w0_; }
  const Matrix& w1() const noexcept { return w1_; }
  void set_weights(Matrix w0, Matrix w1);

  bool fresh() const noexcept { return fresh_; }
  /// Cached H1 = ReLU(A_hat E W0). Throws if stale.
  const Matrix& hidden() const;
  /// Cached W = A_hat H1 W1, one classifier row per label. Throws if stale.
  const Matrix& classifier() const;
  const Matrix& propagated() const;      // A_hat E
  const Matrix& pre_activation() const;  // A_hat E W0
  const Matrix& mixed_hidden() const;    // A_hat H1

 private:
  friend GcnParameters gcn_forward(const CoOccurrenceGraph&, const LabelEmbeddings&, Matrix,
                                   Matrix);
  const Matrix& checked(const Matrix& cache) const;

  Matrix w0_;
  Matrix w1_;
  Matrix propagated_;
  Matrix pre_activation_;
  Matrix hidden_;
  Matrix mixed_hidden_;
  Matrix classifier_;
  bool fresh_ = false;
};

/// Seeded initial weights, standard normal scaled by 1/sqrt(fan_in).
GcnParameters init_gcn_parameters(Index embedding_dim, Index hidden_dim, Index feature_dim,
                                  std::uint64_t seed);

/// H1 = ReLU(A_hat E W0), W = A_hat H1 W1.
GcnParameters gcn_forward(const CoOccurrenceGraph& graph, const LabelEmbeddings& e, Matrix w0,
                          Matrix w1);

struct GcnGradients {
  Matrix d_w0;
  Matrix d_w1;
  Matrix d_embeddings;
};

/// Backpropagates `upstream` = dLoss/dW through the cached forward pass.
/// The ReLU subgradient at 0 is 0. Throws if the parameters are stale.
GcnGradients gcn_backward(const CoOccurrenceGraph& graph, const LabelEmbeddings& e,
                          const GcnParameters& params, const Matrix& upstream);

}  // namespace lepl
