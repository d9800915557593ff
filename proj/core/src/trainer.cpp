#include "lepl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "lepl/data.hpp"
#include "lepl/error.hpp"

namespace lepl {

namespace {

constexpr double kLowestProbability = std::numeric_limits<double>::min();
constexpr double kHighestProbability = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

double sigmoid(double z) noexcept {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -y log s(z) - (1-y) log(1 - s(z)) without forming s(z).
double bce_term(double z, bool y) noexcept {
  return std::max(z, 0.0) - (y ? z : 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double mean_bce(const Matrix& logits, const LabelMatrix& targets) {
  double total = 0.0;
  for (Index i = 0; i < logits.rows(); ++i) {
    double row = 0.0;
    for (Index c = 0; c < logits.cols(); ++c) {
      row += bce_term(logits(i, c), targets.positive(i, c));
    }
    total += row;
  }
  return total / static_cast<double>(logits.rows());
}

// dL/dW for logits = X W^T.
Matrix classifier_gradient(const Matrix& logits, const FeatureMatrix& x,
                           const LabelMatrix& targets) {
  Matrix residual(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    for (Index c = 0; c < logits.cols(); ++c) {
      residual(i, c) = sigmoid(logits(i, c)) - (targets.positive(i, c) ? 1.0 : 0.0);
    }
  }
  return residual.transpose() * x.values() / static_cast<double>(x.n());
}

void check_training_shapes(const FeatureMatrix& x, const LabelMatrix& targets, Index classes,
                           Index dim) {
  if (x.n() != targets.n()) {
    throw ShapeError("features have " + std::to_string(x.n()) + " rows, targets " +
                     std::to_string(targets.n()));
  }
  if (targets.classes() != classes) {
    throw ShapeError("targets have " + std::to_string(targets.classes()) +
                     " classes, classifier " + std::to_string(classes));
  }
  if (x.d() != dim) {
    throw ShapeError("features have dimension " + std::to_string(x.d()) + ", classifier " +
                     std::to_string(dim));
  }
}

void warn_if_worse(const std::vector<double>& trace, std::vector<std::string>& warnings) {
  if (trace.size() >= 2 && trace.back() > trace.front()) {
    warnings.push_back("training loss rose from " + std::to_string(trace.front()) + " to " +
                       std::to_string(trace.back()) + "; consider a smaller lr");
  }
}

}  // namespace

PredictionMatrix::PredictionMatrix(Matrix logits, Matrix values)
    : logits_(std::move(logits)), values_(std::move(values)) {}

PredictionMatrix PredictionMatrix::from_logits(Matrix logits) {
  if (!logits.allFinite()) {
    throw NumericError("prediction logits contain a non-finite value");
  }
  Matrix values(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    for (Index c = 0; c < logits.cols(); ++c) {
      values(i, c) = std::clamp(sigmoid(logits(i, c)), kLowestProbability, kHighestProbability);
    }
  }
  return PredictionMatrix(std::move(logits), std::move(values));
}

PredictionMatrix PredictionMatrix::from_probabilities(const Matrix& probabilities) {
  Matrix logits(probabilities.rows(), probabilities.cols());
  for (Index i = 0; i < probabilities.rows(); ++i) {
    for (Index c = 0; c < probabilities.cols(); ++c) {
      const double p = probabilities(i, c);
      if (!(p > 0.0 && p < 1.0)) {
        throw FormatError("prediction (" + std::to_string(i) + "," + std::to_string(c) +
                          ") is not strictly inside (0,1)");
      }
      logits(i, c) = std::log(p) - std::log1p(-p);
    }
  }
  return PredictionMatrix(std::move(logits), probabilities);
}

PredictionMatrix load_predictions(const std::filesystem::path& path) {
  return PredictionMatrix::from_probabilities(read_real_matrix(path, kPredictionFormat));
}

void write_predictions(const PredictionMatrix& p, const std::filesystem::path& path) {
  write_real_matrix(p.values(), path, kPredictionFormat);
}

std::string Ablation::label() const {
  if (!enhancement && !prior_pseudo && !gcn) {
    return "Base";
  }
  std::string out;
  if (enhancement) {
    out += "+A";
  }
  if (prior_pseudo) {
    out += "+B";
  }
  if (gcn) {
    out += "+C";
  }
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 0) {
    throw std::invalid_argument("epochs must be >= 0");
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw std::invalid_argument("training lr must be > 0");
  }
  if (embedding_dim < 1 || hidden_dim < 0) {
    throw std::invalid_argument("embedding_dim must be >= 1 and hidden_dim >= 0");
  }
}

PredictionMatrix predict(const Matrix& classifier, const FeatureMatrix& x) {
  if (x.d() != classifier.cols()) {
    throw ShapeError("predict: features have dimension " + std::to_string(x.d()) +
                     ", classifiers " + std::to_string(classifier.cols()));
  }
  return PredictionMatrix::from_logits(x.values() * classifier.transpose());
}

PredictionMatrix predict(const GcnParameters& params, const CoOccurrenceGraph& graph,
                         const LabelEmbeddings& e, const FeatureMatrix& x) {
  if (params.fresh()) {
    return predict(params.classifier(), x);
  }
  return predict(gcn_forward(graph, e, params.w0(), params.w1()).classifier(), x);
}

double bce_loss(const PredictionMatrix& pred, const LabelMatrix& targets) {
  require_same_shape(pred.n(), pred.classes(), targets.n(), targets.classes(), "bce_loss");
  return mean_bce(pred.logits(), targets);
}

Matrix bce_classifier_gradient(const Matrix& classifier, const FeatureMatrix& x,
                               const LabelMatrix& targets) {
  check_training_shapes(x, targets, classifier.rows(), classifier.cols());
  return classifier_gradient(x.values() * classifier.transpose(), x, targets);
}

GcnObjective gcn_objective(const FeatureMatrix& x, const LabelMatrix& targets,
                           const CoOccurrenceGraph& graph, const LabelEmbeddings& e,
                           const Matrix& w0, const Matrix& w1) {
  const GcnParameters params = gcn_forward(graph, e, w0, w1);
  const Matrix& w = params.classifier();
  check_training_shapes(x, targets, w.rows(), w.cols());
  const Matrix logits = x.values() * w.transpose();
  GcnObjective out;
  out.loss = mean_bce(logits, targets);
  out.grads = gcn_backward(graph, e, params, classifier_gradient(logits, x, targets));
  return out;
}

TrainedGcn train(const FeatureMatrix& x, const LabelMatrix& targets,
                 const CoOccurrenceGraph& graph, const LabelEmbeddings& e, Matrix w0, Matrix w1,
                 const TrainConfig& cfg) {
  cfg.validate();
  Matrix embeddings = e.values();
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
  for (Index epoch = 0;; ++epoch) {
    const LabelEmbeddings current(embeddings);
    GcnObjective obj = gcn_objective(x, targets, graph, current, w0, w1);
    trace.push_back(obj.loss);
    if (epoch == cfg.epochs) {
      break;
    }
    w0.noalias() -= cfg.lr * obj.grads.d_w0;
    w1.noalias() -= cfg.lr * obj.grads.d_w1;
    if (!cfg.freeze_embeddings) {
      embeddings.noalias() -= cfg.lr * obj.grads.d_embeddings;
    }
  }
  LabelEmbeddings final_embeddings(std::move(embeddings));
  TrainedGcn out{gcn_forward(graph, final_embeddings, std::move(w0), std::move(w1)),
                 std::move(final_embeddings), std::move(trace), {}};
  warn_if_worse(out.loss_trace, out.warnings);
  return out;
}

TrainedLinear train_linear(const FeatureMatrix& x, const LabelMatrix& targets, Matrix classifier,
                           const TrainConfig& cfg) {
  cfg.validate();
  check_training_shapes(x, targets, classifier.rows(), classifier.cols());
  TrainedLinear out;
  out.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
  for (Index epoch = 0;; ++epoch) {
    const Matrix logits = x.values() * classifier.transpose();
    out.loss_trace.push_back(mean_bce(logits, targets));
    if (epoch == cfg.epochs) {
      break;
    }
    classifier.noalias() -= cfg.lr * classifier_gradient(logits, x, targets);
  }
  out.classifier = std::move(classifier);
  warn_if_worse(out.loss_trace, out.warnings);
  return out;
}

Matrix init_linear_classifier(Index classes, Index dim, std::uint64_t seed) {
  if (classes < 1 || dim < 1) {
    throw std::invalid_argument("classifier dimensions must be at least 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix w(classes, dim);
  for (Index c = 0; c < classes; ++c) {
    for (Index k = 0; k < dim; ++k) {
      w(c, k) = scale * normal(rng);
    }
  }
  return w;
}

}  // namespace lepl
