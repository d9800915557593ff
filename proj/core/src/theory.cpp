#include "lepl/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lepl/error.hpp"
#include "lepl/metrics.hpp"
#include "lepl/pseudo_labeling.hpp"

namespace lepl {

double theta(double xi, Index classes) {
  if (classes < 1) {
    throw std::invalid_argument("theta: class count must be >= 1");
  }
  if (!(xi >= 0.0)) {
    throw std::invalid_argument("theta: unreliability must be >= 0");
  }
  if (!(xi < 1.0)) {
    throw NumericError("theta: unreliability " + std::to_string(xi) +
                       " >= 1 makes the bound vacuous");
  }
  return static_cast<double>(classes) * std::log(2.0 / (1.0 + xi));
}

void TheoryParams::validate() const {
  theta();
  if (natarajan_dim < 1) {
    throw std::invalid_argument("Natarajan dimension must be a positive integer");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0,1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
}

double sample_complexity(const TheoryParams& p) {
  p.validate();
  const double t = p.theta();
  const double te = t * p.epsilon;
  const double dh = static_cast<double>(p.natarajan_dim);
  const double c = static_cast<double>(p.classes);
  const double capacity = dh * (std::log(4.0 * dh) + 2.0 * c * std::log(c) + std::log(1.0 / te));
  return 4.0 / te * (capacity + std::log(1.0 / p.delta) + 1.0);
}

Index RiskComparison::wins_pseudo() const noexcept {
  Index wins = 0;
  for (const auto& o : outcomes) {
    wins += o.pseudo_wins() ? 1 : 0;
  }
  return wins;
}

double RiskComparison::mean_risk_pseudo() const noexcept {
  double s = 0.0;
  for (const auto& o : outcomes) {
    s += o.risk_pseudo;
  }
  return outcomes.empty() ? 0.0 : s / static_cast<double>(outcomes.size());
}

double RiskComparison::mean_risk_single() const noexcept {
  double s = 0.0;
  for (const auto& o : outcomes) {
    s += o.risk_single;
  }
  return outcomes.empty() ? 0.0 : s / static_cast<double>(outcomes.size());
}

SeedOutcome compare_risks_for_seed(const SynthConfig& data_cfg, const PipelineConfig& cfg,
                                   std::uint64_t seed) {
  SynthConfig dc = data_cfg;
  dc.seed = seed;
  const SynthDataset data = synth_generate(dc);
  const PipelineInputs in{data.train_features, data.train_partial, data.val_features,
                          data.val_labels,     data.test_features, data.test_labels};
  in.validate();

  PipelineConfig pc = cfg;
  pc.seed = seed;
  pc.train.ablation.enhancement = true;
  pc.train.ablation.prior_pseudo = true;

  const SoftLabelMatrix soft = pipeline_soft_labels(in, pc);
  const PseudoLabelMatrix pseudo_targets = pipeline_targets(in, pc, soft);
  const PseudoLabelMatrix single_targets = single_label_pseudo(data.train_partial);
  const CoOccurrenceGraph graph = normalize(cooccurrence(data.val_labels));

  const auto held_out_risk = [&](const LabelMatrix& targets) {
    const Matrix w = fit_classifier(data.train_features, targets, graph, pc);
    const PredictionMatrix p = predict(w, data.test_features);
    return hamming_risk(binarize(p.values()), data.test_labels.values());
  };

  SeedOutcome o;
  o.seed = seed;
  o.risk_pseudo = held_out_risk(pseudo_targets);
  o.risk_single = held_out_risk(single_targets);
  o.xi_pseudo = unreliability(pseudo_targets, data.train_truth);
  o.xi_single = unreliability(single_targets, data.train_truth);
  return o;
}

RiskComparison compare_risks(const SynthConfig& data_cfg, const PipelineConfig& cfg,
                             std::span<const std::uint64_t> seeds) {
  RiskComparison out;
  for (const auto seed : seeds) {
    out.outcomes.push_back(compare_risks_for_seed(data_cfg, cfg, seed));
  }
  return out;
}

}  // namespace lepl
