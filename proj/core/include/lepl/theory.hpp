#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lepl/data.hpp"
#include "lepl/pipeline.hpp"
#include "lepl/types.hpp"

namespace lepl {

/// theta = C * ln(2 / (1 + xi)). Throws NumericError for xi >= 1, where the
/// bound is vacuous, and std::invalid_argument for xi < 0 or C < 1.
double theta(double xi, Index classes);

struct TheoryParams {
  double xi = 0.0;
  Index natarajan_dim = 1;
  double epsilon = 0.1;
  double delta = 0.05;
  Index classes = 1;

  void validate() const;
  double theta() const { return lepl::theta(xi, classes); }
};

/// Sample size beyond which the pseudo-label ERM reaches risk epsilon with
/// probability 1 - delta:
///   n0 = 4/(theta eps) * ( d_H (ln(4 d_H) + 2 C ln C + ln(1/(theta eps)))
///                          + ln(1/delta) + 1 )
double sample_complexity(const TheoryParams& p);

struct SeedOutcome {
  std::uint64_t seed = 0;
  double risk_pseudo = 0.0;
  double risk_single = 0.0;
  double xi_pseudo = 0.0;
  double xi_single = 0.0;

  bool pseudo_wins() const noexcept { return risk_pseudo < risk_single; }
};

struct RiskComparison {
  std::vector<SeedOutcome> outcomes;

  Index seeds() const noexcept { return static_cast<Index>(outcomes.size()); }
  Index wins_pseudo() const noexcept;
  double mean_risk_pseudo() const noexcept;
  double mean_risk_single() const noexcept;
};

/// Paired experiment per seed: synthesize data, train the same classifier
/// once on single-label targets and once on pipeline pseudo-labels, and
/// compare held-out Hamming risk. Both arms share initial weights.
SeedOutcome compare_risks_for_seed(const SynthConfig& data_cfg, const PipelineConfig& cfg,
                                   std::uint64_t seed);
RiskComparison compare_risks(const SynthConfig& data_cfg, const PipelineConfig& cfg,
                             std::span<const std::uint64_t> seeds);

}  // namespace lepl
