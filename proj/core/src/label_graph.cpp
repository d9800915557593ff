#include "lepl/label_graph.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "lepl/data.hpp"
#include "lepl/error.hpp"
#include "lepl/seed.hpp"

namespace lepl {

CoOccurrenceGraph cooccurrence(const LabelMatrix& val_labels) {
  const Index n = val_labels.n();
  const Index classes = val_labels.classes();
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> counts =
      Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>::Zero(classes, classes);
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < classes; ++i) {
      if (!val_labels.positive(k, i)) {
        continue;
      }
      for (Index j = 0; j < classes; ++j) {
        counts(i, j) += val_labels.positive(k, j) ? 1 : 0;
      }
    }
  }
  CoOccurrenceGraph g;
  g.a = counts.cast<double>() / static_cast<double>(n);
  return g;
}

CoOccurrenceGraph normalize(CoOccurrenceGraph graph) {
  const Index classes = graph.a.rows();
  if (graph.a.cols() != classes) {
    throw ShapeError("co-occurrence matrix must be square");
  }
  graph.degree = graph.a.rowwise().sum();
  for (Index c = 0; c < classes; ++c) {
    if (graph.degree(c) == 0.0) {
      graph.a(c, c) += kDeadLabelDelta;
      graph.degree(c) = kDeadLabelDelta;
    }
  }
  graph.a_hat.resize(classes, classes);
  for (Index i = 0; i < classes; ++i) {
    for (Index j = 0; j < classes; ++j) {
      graph.a_hat(i, j) = graph.a(i, j) / std::sqrt(graph.degree(i) * graph.degree(j));
    }
  }
  graph.normalized = true;
  return graph;
}

LabelEmbeddings::LabelEmbeddings(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw FormatError("label embeddings must have C >= 1 and d_e >= 1");
  }
  if (!values_.allFinite()) {
    throw FormatError("label embeddings contain a non-finite value");
  }
}

namespace {

Matrix seeded_normal(Index rows, Index cols, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = scale * normal(rng);
    }
  }
  return m;
}

void require_normalized(const CoOccurrenceGraph& graph) {
  if (!graph.normalized) {
    throw std::invalid_argument("graph must be normalized before running the GCN");
  }
}

}  // namespace

LabelEmbeddings random_embeddings(Index classes, Index dim, std::uint64_t seed) {
  if (classes < 1 || dim < 1) {
    throw std::invalid_argument("embedding dimensions must be at least 1");
  }
  std::mt19937_64 rng(seed);
  // rows of roughly unit length; with unscaled rows the generated classifiers
  // move about `dim` times faster than a free classifier under the same lr
  return LabelEmbeddings(seeded_normal(classes, dim, 1.0 / std::sqrt(static_cast<double>(dim)), rng));
}

LabelEmbeddings load_embeddings(const std::filesystem::path& path) {
  return LabelEmbeddings(read_real_matrix(path, kEmbeddingFormat));
}

void write_embeddings(const LabelEmbeddings& e, const std::filesystem::path& path) {
  write_real_matrix(e.values(), path, kEmbeddingFormat);
}

GcnParameters::GcnParameters(Matrix w0, Matrix w1) : w0_(std::move(w0)), w1_(std::move(w1)) {}

void GcnParameters::set_weights(Matrix w0, Matrix w1) {
  w0_ = std::move(w0);
  w1_ = std::move(w1);
  fresh_ = false;
}

const Matrix& GcnParameters::checked(const Matrix& cache) const {
  if (!fresh_) {
    throw std::logic_error("GCN caches are stale; run gcn_forward first");
  }
  return cache;
}

const Matrix& GcnParameters::hidden() const { return checked(hidden_); }
const Matrix& GcnParameters::classifier() const { return checked(classifier_); }
const Matrix& GcnParameters::propagated() const { return checked(propagated_); }
const Matrix& GcnParameters::pre_activation() const { return checked(pre_activation_); }
const Matrix& GcnParameters::mixed_hidden() const { return checked(mixed_hidden_); }

GcnParameters init_gcn_parameters(Index embedding_dim, Index hidden_dim, Index feature_dim,
                                  std::uint64_t seed) {
  if (embedding_dim < 1 || hidden_dim < 1 || feature_dim < 1) {
    throw std::invalid_argument("GCN dimensions must be at least 1");
  }
  std::mt19937_64 rng(seed);
  Matrix w0 = seeded_normal(embedding_dim, hidden_dim,
                            1.0 / std::sqrt(static_cast<double>(embedding_dim)), rng);
  Matrix w1 = seeded_normal(hidden_dim, feature_dim,
                            1.0 / std::sqrt(static_cast<double>(hidden_dim)), rng);
  return GcnParameters(std::move(w0), std::move(w1));
}

GcnParameters gcn_forward(const CoOccurrenceGraph& graph, const LabelEmbeddings& e, Matrix w0,
                          Matrix w1) {
  require_normalized(graph);
  const Index classes = graph.classes();
  if (e.classes() != classes) {
    throw ShapeError("gcn_forward: graph has " + std::to_string(classes) +
                     " labels, embeddings " + std::to_string(e.classes()));
  }
  if (w0.rows() != e.dim()) {
    throw ShapeError("gcn_forward: W0 has " + std::to_string(w0.rows()) +
                     " rows, embedding dim is " + std::to_string(e.dim()));
  }
  if (w1.rows() != w0.cols()) {
    throw ShapeError("gcn_forward: W1 has " + std::to_string(w1.rows()) +
                     " rows, hidden width is " + std::to_string(w0.cols()));
  }
  GcnParameters p(std::move(w0), std::move(w1));
  p.propagated_ = graph.a_hat * e.values();
  p.pre_activation_ = p.propagated_ * p.w0_;
  p.hidden_ = p.pre_activation_.cwiseMax(0.0);
  p.mixed_hidden_ = graph.a_hat * p.hidden_;
  p.classifier_ = p.mixed_hidden_ * p.w1_;
  p.fresh_ = true;
  return p;
}

GcnGradients gcn_backward(const CoOccurrenceGraph& graph, const LabelEmbeddings& e,
                          const GcnParameters& params, const Matrix& upstream) {
  require_normalized(graph);
  const Matrix& w = params.classifier();
  require_same_shape(upstream.rows(), upstream.cols(), w.rows(), w.cols(),
                     "gcn_backward: upstream vs classifier");
  require_same_shape(e.classes(), e.dim(), graph.classes(), params.w0().rows(),
                     "gcn_backward: embeddings");

  GcnGradients g;
  g.d_w1 = params.mixed_hidden().transpose() * upstream;
  const Matrix d_hidden = graph.a_hat.transpose() * upstream * params.w1().transpose();
  const Matrix& z = params.pre_activation();
  Matrix d_pre = Matrix::Zero(z.rows(), z.cols());
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) {
      if (z(i, j) > 0.0) {
        d_pre(i, j) = d_hidden(i, j);
      }
    }
  }
  g.d_w0 = params.propagated().transpose() * d_pre;
  g.d_embeddings = graph.a_hat.transpose() * d_pre * params.w0().transpose();
  return g;
}

}  // namespace lepl
