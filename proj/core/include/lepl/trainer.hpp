#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lepl/label_graph.hpp"
#include "lepl/types.hpp"

namespace lepl {

/// Sigmoid outputs of a linear scorer, kept together with their logits so the
/// loss can be evaluated without log(0). Values lie strictly inside (0, 1).
class PredictionMatrix {
 public:
  static PredictionMatrix from_logits(Matrix logits);
  /// Throws FormatError unless every entry is strictly inside (0, 1).
  static PredictionMatrix from_probabilities(const Matrix& probabilities);

  Index n() const noexcept { return values_.rows(); }
  Index classes() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  const Matrix& logits() const noexcept { return logits_; }

 private:
  PredictionMatrix(Matrix logits, Matrix values);

  Matrix logits_;
  Matrix values_;
};

PredictionMatrix load_predictions(const std::filesystem::path& path);
void write_predictions(const PredictionMatrix& p, const std::filesystem::path& path);

/// Toggles of the three pipeline components, named after the ablation rows
/// Base, +A, +A+B, +A+B+C.
struct Ablation {
  bool enhancement = true;
  bool prior_pseudo = true;
  bool gcn = true;

  static constexpr Ablation base() { return {false, false, false}; }
  static constexpr Ablation full() { return {true, true, true}; }
  std::string label() const;

  friend bool operator==(const Ablation&, const Ablation&) = default;
};

struct TrainConfig {
  Index epochs = 4000;
  double lr = 1.0;
  std::uint64_t seed = 0;
  bool freeze_embeddings = true;
  Index embedding_dim = 16;
  /// Hidden GCN width; 0 means embedding_dim.
  Index hidden_dim = 0;
  Ablation ablation;

  void validate() const;
  Index hidden_width() const noexcept { return hidden_dim > 0 ? hidden_dim : embedding_dim; }
};

/// p = sigmoid(X W^T) for a C x d classifier matrix.
PredictionMatrix predict(const Matrix& classifier, const FeatureMatrix& x);
/// Runs the GCN forward pass and projects X onto the generated classifiers.
PredictionMatrix predict(const GcnParameters& params, const CoOccurrenceGraph& graph,
                         const LabelEmbeddings& e, const FeatureMatrix& x);

/// Mean over instances of the summed per-class binary cross-entropy,
/// evaluated from the logits.
double bce_loss(const PredictionMatrix& pred, const LabelMatrix& targets);

/// dL/dW of bce_loss(predict(W, X), targets) for a plain C x d classifier.
Matrix bce_classifier_gradient(const Matrix& classifier, const FeatureMatrix& x,
                               const LabelMatrix& targets);

struct GcnObjective {
  double loss = 0.0;
  GcnGradients grads;
};

/// BCE of the GCN-generated classifier together with its gradients with
/// respect to W0, W1 and E.
GcnObjective gcn_objective(const FeatureMatrix& x, const LabelMatrix& targets,
                           const CoOccurrenceGraph& graph, const LabelEmbeddings& e,
                           const Matrix& w0, const Matrix& w1);

struct TrainedGcn {
  GcnParameters params;
  LabelEmbeddings embeddings;
  std::vector<double> loss_trace;  // loss before each epoch and after the last
  std::vector<std::string> warnings;
};

/// Full-batch gradient descent on the BCE of the GCN classifier.
TrainedGcn train(const FeatureMatrix& x, const LabelMatrix& targets,
                 const CoOccurrenceGraph& graph, const LabelEmbeddings& e, Matrix w0, Matrix w1,
                 const TrainConfig& cfg);

struct TrainedLinear {
  Matrix classifier;
  std::vector<double> loss_trace;
  std::vector<std::string> warnings;
};

/// Same loop for a free C x d classifier (the no-GCN ablation).
TrainedLinear train_linear(const FeatureMatrix& x, const LabelMatrix& targets, Matrix classifier,
                           const TrainConfig& cfg);

/// Seeded standard normal scaled by 1/sqrt(d).
Matrix init_linear_classifier(Index classes, Index dim, std::uint64_t seed);

}  // namespace lepl
