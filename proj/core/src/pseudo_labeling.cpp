#include "lepl/pseudo_labeling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lepl/error.hpp"

namespace lepl {

ClassPriors estimate_priors(const LabelMatrix& val_labels, Index n_train) {
  if (n_train < 0) {
    throw std::invalid_argument("n_train must be >= 0");
  }
  const Index n_val = val_labels.n();
  const Index classes = val_labels.classes();
  ClassPriors priors;
  priors.n_train = n_train;
  priors.gamma.resize(static_cast<std::size_t>(classes));
  priors.k_per_class.resize(static_cast<std::size_t>(classes));
  for (Index c = 0; c < classes; ++c) {
    Index count = 0;
    for (Index i = 0; i < n_val; ++i) {
      count += val_labels.positive(i, c) ? 1 : 0;
    }
    priors.gamma[static_cast<std::size_t>(c)] =
        static_cast<double>(count) / static_cast<double>(n_val);
    priors.k_per_class[static_cast<std::size_t>(c)] = count * n_train / n_val;
  }
  return priors;
}

PseudoLabelMatrix generate_pseudo_labels(const SoftLabelMatrix& d, const ClassPriors& priors,
                                         const LabelMatrix& observed) {
  const Index n = observed.n();
  const Index classes = observed.classes();
  require_same_shape(d.n(), d.classes(), n, classes, "generate_pseudo_labels: D vs observed");
  if (priors.classes() != classes) {
    throw ShapeError("generate_pseudo_labels: priors cover " +
                     std::to_string(priors.classes()) + " classes, labels " +
                     std::to_string(classes));
  }
  const Matrix& scores = d.values();
  BinaryMatrix out = observed.values();
  std::vector<Index> candidates;
  candidates.reserve(static_cast<std::size_t>(n));
  for (Index c = 0; c < classes; ++c) {
    candidates.clear();
    Index observed_count = 0;
    for (Index i = 0; i < n; ++i) {
      if (observed.positive(i, c)) {
        ++observed_count;
      } else {
        candidates.push_back(i);
      }
    }
    const Index budget = priors.k_per_class[static_cast<std::size_t>(c)];
    const Index extra = std::min<Index>(std::max<Index>(budget - observed_count, 0),
                                        static_cast<Index>(candidates.size()));
    if (extra == 0) {
      continue;
    }
    std::partial_sort(candidates.begin(), candidates.begin() + extra, candidates.end(),
                      [&](Index a, Index b) {
                        return scores(a, c) > scores(b, c) || (scores(a, c) == scores(b, c) && a < b);
                      });
    for (Index t = 0; t < extra; ++t) {
      out(candidates[static_cast<std::size_t>(t)], c) = 1;
    }
  }
  return LabelMatrix(std::move(out), LabelKind::pseudo);
}

PseudoLabelMatrix single_label_pseudo(const LabelMatrix& observed) {
  return observed.as(LabelKind::pseudo);
}

double unreliability(const LabelMatrix& pseudo, const LabelMatrix& truth) {
  require_same_shape(pseudo.n(), pseudo.classes(), truth.n(), truth.classes(), "unreliability");
  Index worst = 0;
  for (Index c = 0; c < truth.classes(); ++c) {
    Index mismatches = 0;
    for (Index i = 0; i < truth.n(); ++i) {
      mismatches += pseudo.positive(i, c) != truth.positive(i, c) ? 1 : 0;
    }
    worst = std::max(worst, mismatches);
  }
  return static_cast<double>(worst) / static_cast<double>(truth.n());
}

}  // namespace lepl
