#include "lepl/pipeline.hpp"

#include <string>

#include "lepl/error.hpp"
#include "lepl/pseudo_labeling.hpp"
#include "lepl/seed.hpp"

namespace lepl {

namespace {

void require_rows(Index a, Index b, const std::string& what) {
  if (a != b) {
    throw ShapeError(what + ": " + std::to_string(a) + " feature rows vs " + std::to_string(b) +
                     " label rows");
  }
}

void append(std::vector<std::string>* sink, const std::vector<std::string>& items) {
  if (sink != nullptr) {
    sink->insert(sink->end(), items.begin(), items.end());
  }
}

}  // namespace

void PipelineInputs::validate() const {
  require_rows(train_features.n(), train_partial.n(), "train split");
  require_rows(val_features.n(), val_labels.n(), "validation split");
  require_rows(test_features.n(), test_labels.n(), "test split");
  if (val_features.d() != train_features.d() || test_features.d() != train_features.d()) {
    throw ShapeError("feature dimension differs between splits");
  }
  if (val_labels.classes() != train_partial.classes() ||
      test_labels.classes() != train_partial.classes()) {
    throw ShapeError("class count differs between splits");
  }
  if (train_partial.kind() != LabelKind::partial) {
    throw FormatError("training labels must be of kind partial");
  }
  if (val_labels.kind() != LabelKind::full || test_labels.kind() != LabelKind::full) {
    throw FormatError("validation and test labels must be of kind full");
  }
}

SoftLabelMatrix pipeline_soft_labels(const PipelineInputs& in, const PipelineConfig& cfg,
                                     std::vector<std::string>* warnings) {
  if (!cfg.ablation().enhancement) {
    cfg.le.validate();
    return init_soft_labels(in.train_partial, cfg.le.background_for(in.train_partial.classes()));
  }
  EnhanceResult r = enhance(in.train_features, in.train_partial, cfg.le);
  append(warnings, r.warnings);
  return std::move(r.soft);
}

PseudoLabelMatrix pipeline_targets(const PipelineInputs& in, const PipelineConfig& cfg,
                                   const SoftLabelMatrix& soft) {
  if (cfg.ablation().prior_pseudo) {
    const ClassPriors priors = estimate_priors(in.val_labels, in.train_partial.n());
    return generate_pseudo_labels(soft, priors, in.train_partial);
  }
  return single_label_pseudo(in.train_partial);
}

Matrix fit_classifier(const FeatureMatrix& x, const LabelMatrix& targets,
                      const CoOccurrenceGraph& graph, const PipelineConfig& cfg,
                      std::vector<std::string>* warnings) {
  const Index classes = targets.classes();
  if (!cfg.ablation().gcn) {
    TrainedLinear t = train_linear(x, targets,
                                   init_linear_classifier(classes, x.d(),
                                                          derive_seed(cfg.seed, "linear_init")),
                                   cfg.train);
    append(warnings, t.warnings);
    return std::move(t.classifier);
  }
  const LabelEmbeddings embeddings =
      cfg.embeddings ? *cfg.embeddings
                     : random_embeddings(classes, cfg.train.embedding_dim,
                                         derive_seed(cfg.seed, "embeddings"));
  if (embeddings.classes() != classes) {
    throw ShapeError("label embeddings cover " + std::to_string(embeddings.classes()) +
                     " classes, labels " + std::to_string(classes));
  }
  GcnParameters init = init_gcn_parameters(embeddings.dim(), cfg.train.hidden_width(), x.d(),
                                           derive_seed(cfg.seed, "gcn_init"));
  TrainedGcn t = train(x, targets, graph, embeddings, init.w0(), init.w1(), cfg.train);
  append(warnings, t.warnings);
  return t.params.classifier();
}

PipelineResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg,
                            const std::optional<SoftLabelMatrix>& precomputed_soft) {
  in.validate();
  cfg.le.validate();
  cfg.train.validate();
  std::vector<std::string> warnings;
  SoftLabelMatrix soft = precomputed_soft ? *precomputed_soft
                                          : pipeline_soft_labels(in, cfg, &warnings);
  require_same_shape(soft.n(), soft.classes(), in.train_partial.n(),
                     in.train_partial.classes(), "soft labels vs training labels");
  PseudoLabelMatrix pseudo = pipeline_targets(in, cfg, soft);
  CoOccurrenceGraph graph = normalize(cooccurrence(in.val_labels));
  Matrix classifier = fit_classifier(in.train_features, pseudo, graph, cfg, &warnings);
  PredictionMatrix predictions = predict(classifier, in.test_features);
  MetricsReport report = evaluate(predictions, in.test_labels);
  return PipelineResult{std::move(soft),        std::move(pseudo),      std::move(graph),
                        std::move(classifier),  std::move(predictions), report,
                        std::move(warnings)};
}

}  // namespace lepl
