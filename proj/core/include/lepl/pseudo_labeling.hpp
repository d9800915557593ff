#pragma once

#include <vector>

#include "lepl/label_enhancement.hpp"
#include "lepl/types.hpp"

namespace lepl {

struct ClassPriors {
  std::vector<double> gamma;     // per-class validation frequency
  std::vector<Index> k_per_class;  // floor(gamma * n_train)
  Index n_train = 0;

  Index classes() const noexcept { return static_cast<Index>(gamma.size()); }
};

/// K_c is the exact floor of count_c * n_train / n_val, computed in integers.
ClassPriors estimate_priors(const LabelMatrix& val_labels, Index n_train);

/// Class-prior top-K pseudo-labels. Every observed positive is kept; each
/// class is then topped up with the highest-scoring unobserved instances
/// until it holds K_c positives (lower index wins ties).
PseudoLabelMatrix generate_pseudo_labels(const SoftLabelMatrix& d, const ClassPriors& priors,
                                         const LabelMatrix& observed);

/// Observed positives only; every unobserved entry reads as negative.
PseudoLabelMatrix single_label_pseudo(const LabelMatrix& observed);

/// Largest per-class disagreement rate between two binary matrices.
double unreliability(const LabelMatrix& pseudo, const LabelMatrix& truth);

}  // namespace lepl
