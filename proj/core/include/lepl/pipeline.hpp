#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lepl/label_enhancement.hpp"
#include "lepl/label_graph.hpp"
#include "lepl/metrics.hpp"
#include "lepl/trainer.hpp"
#include "lepl/types.hpp"

namespace lepl {

/// Borrowed views of the three splits.
struct PipelineInputs {
  const FeatureMatrix& train_features;
  const LabelMatrix& train_partial;
  const FeatureMatrix& val_features;
  const LabelMatrix& val_labels;
  const FeatureMatrix& test_features;
  const LabelMatrix& test_labels;

  void validate() const;
};

struct PipelineConfig {
  LeConfig le;
  TrainConfig train;  // train.ablation selects the pipeline components
  /// Fanned out to stages with derive_seed(); train.seed is ignored here.
  std::uint64_t seed = 0;
  /// Label embeddings to use instead of the seeded random ones.
  std::optional<LabelEmbeddings> embeddings;

  const Ablation& ablation() const noexcept { return train.ablation; }
};

struct PipelineResult {
  SoftLabelMatrix soft;
  PseudoLabelMatrix pseudo;
  CoOccurrenceGraph graph;
  Matrix classifier;
  PredictionMatrix test_predictions;
  MetricsReport report;
  std::vector<std::string> warnings;
};

/// Soft labels the pipeline trains from: enhanced D when enhancement is on,
/// the initial D otherwise.
SoftLabelMatrix pipeline_soft_labels(const PipelineInputs& in, const PipelineConfig& cfg,
                                     std::vector<std::string>* warnings = nullptr);

/// Training targets for the configured ablation:
///   prior_pseudo on  -> class-prior top-K pseudo-labels of D
///   prior_pseudo off -> the single observed label, whatever D is
PseudoLabelMatrix pipeline_targets(const PipelineInputs& in, const PipelineConfig& cfg,
                                   const SoftLabelMatrix& soft);

/// Trains the configured classifier (GCN-generated or a free matrix) on
/// `targets` and returns the C x d classifier matrix. Initial weights depend
/// only on cfg.seed, so two calls with different targets start identically.
Matrix fit_classifier(const FeatureMatrix& x, const LabelMatrix& targets,
                      const CoOccurrenceGraph& graph, const PipelineConfig& cfg,
                      std::vector<std::string>* warnings = nullptr);

/// enhance -> pseudo-label -> co-occurrence graph -> train -> predict ->
/// evaluate on the test split. `precomputed_soft` skips the enhancement step
/// when the caller already holds D for the same inputs and config.
PipelineResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg,
                            const std::optional<SoftLabelMatrix>& precomputed_soft = std::nullopt);

}  // namespace lepl
