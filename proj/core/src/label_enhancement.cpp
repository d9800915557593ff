#include "lepl/label_enhancement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "lepl/error.hpp"

namespace lepl {

namespace {

double sigmoid(double z) noexcept {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Rows scaled to unit length; throws on a zero row.
Matrix unit_rows(const Matrix& m, Vector& norms, const char* what) {
  norms = m.rowwise().norm();
  Matrix u(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    if (!(norms(i) > 0.0)) {
      throw NumericError(std::string(what) + " row " + std::to_string(i) +
                         " has zero norm; cosine similarity is undefined");
    }
    u.row(i) = m.row(i) / norms(i);
  }
  return u;
}

}  // namespace

NeighborIndex::NeighborIndex(std::vector<std::vector<Index>> lists, Index k)
    : lists_(std::move(lists)), k_(k) {
  const Index n = static_cast<Index>(lists_.size());
  const Index expected = std::min(k_, n - 1);
  for (Index i = 0; i < n; ++i) {
    const auto& l = lists_[static_cast<std::size_t>(i)];
    if (static_cast<Index>(l.size()) != expected) {
      throw std::invalid_argument("neighbor list " + std::to_string(i) + " must hold " +
                                  std::to_string(expected) + " entries");
    }
    std::vector<Index> sorted(l);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("neighbor list " + std::to_string(i) + " has duplicates");
    }
    for (const Index j : l) {
      if (j < 0 || j >= n || j == i) {
        throw std::invalid_argument("neighbor list " + std::to_string(i) +
                                    " has an invalid index " + std::to_string(j));
      }
    }
  }
}

NeighborIndex build_knn(const FeatureMatrix& x, Index k) {
  const Index n = x.n();
  if (n < 2) {
    throw std::invalid_argument("build_knn needs at least two instances");
  }
  if (k < 1) {
    throw std::invalid_argument("build_knn needs K >= 1");
  }
  Vector norms;
  const Matrix u = unit_rows(x.values(), norms, "feature");
  const Matrix sim = u * u.transpose();
  const Index m = std::min(k, n - 1);

  std::vector<std::vector<Index>> lists(static_cast<std::size_t>(n));
  std::vector<Index> candidates;
  candidates.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    candidates.clear();
    for (Index j = 0; j < n; ++j) {
      if (j != i) {
        candidates.push_back(j);
      }
    }
    const auto closer = [&](Index a, Index b) {
      const double sa = sim(i, a);
      const double sb = sim(i, b);
      return sa > sb || (sa == sb && a < b);
    };
    std::partial_sort(candidates.begin(), candidates.begin() + m, candidates.end(), closer);
    lists[static_cast<std::size_t>(i)].assign(candidates.begin(), candidates.begin() + m);
  }
  return NeighborIndex(std::move(lists), k);
}

SoftLabelMatrix::SoftLabelMatrix(Matrix logits, BinaryMatrix clamped)
    : logits_(std::move(logits)), clamped_(std::move(clamped)) {
  require_same_shape(logits_.rows(), logits_.cols(), clamped_.rows(), clamped_.cols(),
                     "soft labels vs clamp mask");
  values_.resize(logits_.rows(), logits_.cols());
  refresh_values();
}

void SoftLabelMatrix::refresh_values() {
  for (Index i = 0; i < logits_.rows(); ++i) {
    for (Index c = 0; c < logits_.cols(); ++c) {
      if (clamped_(i, c) != 0) {
        logits_(i, c) = kClampedLogit;
        values_(i, c) = 1.0;
      } else {
        values_(i, c) = sigmoid(logits_(i, c));
      }
    }
  }
}

void SoftLabelMatrix::set_logits(const Matrix& logits) {
  require_same_shape(logits.rows(), logits.cols(), logits_.rows(), logits_.cols(),
                     "set_logits");
  // Entries whose logit is unchanged keep their stored value bit for bit.
  for (Index i = 0; i < logits_.rows(); ++i) {
    for (Index c = 0; c < logits_.cols(); ++c) {
      if (clamped_(i, c) != 0 || logits(i, c) == logits_(i, c)) {
        continue;
      }
      logits_(i, c) = logits(i, c);
      values_(i, c) = sigmoid(logits_(i, c));
    }
  }
}

SoftLabelMatrix SoftLabelMatrix::from_values(const Matrix& values, BinaryMatrix clamped) {
  require_same_shape(values.rows(), values.cols(), clamped.rows(), clamped.cols(),
                     "soft labels vs clamp mask");
  Matrix logits(values.rows(), values.cols());
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index c = 0; c < values.cols(); ++c) {
      const double v = values(i, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw FormatError("soft label (" + std::to_string(i) + "," + std::to_string(c) +
                          ") is outside [0,1]");
      }
      if (clamped(i, c) != 0 && v != 1.0) {
        throw FormatError("soft label (" + std::to_string(i) + "," + std::to_string(c) +
                          ") is an observed positive but not 1");
      }
      const double z = std::log(v) - std::log1p(-v);
      logits(i, c) = std::clamp(z, -kClampedLogit, kClampedLogit);
    }
  }
  SoftLabelMatrix out(std::move(logits), std::move(clamped));
  out.values_ = values;
  return out;
}

SoftLabelMatrix init_soft_labels(const LabelMatrix& partial, double init_bg) {
  if (!(init_bg > 0.0 && init_bg < 1.0)) {
    throw std::invalid_argument("init_bg must lie in (0,1)");
  }
  const double background_logit = std::log(init_bg) - std::log1p(-init_bg);
  Matrix logits = Matrix::Constant(partial.n(), partial.classes(), background_logit);
  SoftLabelMatrix soft(std::move(logits), partial.values());
  // Unobserved entries start at exactly init_bg.
  Matrix values = soft.values();
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (!soft.is_clamped(i, c)) {
        values(i, c) = init_bg;
      }
    }
  }
  return SoftLabelMatrix::from_values(values, partial.values());
}

void LeConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be > 0");
  }
  if (k < 1) {
    throw std::invalid_argument("K must be >= 1");
  }
  if (steps < 0) {
    throw std::invalid_argument("steps must be >= 0");
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw std::invalid_argument("lr must be > 0");
  }
  if (init_bg && !(*init_bg > 0.0 && *init_bg < 1.0)) {
    throw std::invalid_argument("init_bg must lie in (0,1)");
  }
}

double LeConfig::background_for(Index classes) const noexcept {
  return init_bg ? *init_bg : 1.0 / static_cast<double>(classes);
}

LeEvaluation le_loss_and_grad(const SoftLabelMatrix& d, const NeighborIndex& nbr, double tau) {
  Matrix scratch;
  return le_loss_and_grad(d, nbr, tau, scratch);
}

LeEvaluation le_loss_and_grad(const SoftLabelMatrix& d, const NeighborIndex& nbr, double tau,
                              Matrix& scratch) {
  const Index n = d.n();
  if (n < 2) {
    throw std::invalid_argument("contrastive loss needs at least two instances");
  }
  if (nbr.n() != n) {
    throw ShapeError("neighbor index covers " + std::to_string(nbr.n()) +
                     " instances, soft labels " + std::to_string(n));
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("tau must be > 0");
  }
  Vector norms;
  const Matrix u = unit_rows(d.values(), norms, "soft label");

  // scratch starts as the cosine matrix and each row is overwritten in place
  // by the softmax over k != i. The neighbor part is kept on the side.
  struct Pull {
    Index j;
    double q;
    double sim;
  };
  std::vector<std::vector<Pull>> pulls(static_cast<std::size_t>(n));
  scratch.resize(n, n);
  scratch.noalias() = u * u.transpose();
  const double inv_tau = 1.0 / tau;
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    auto row = scratch.row(i).array();
    const auto& pos = nbr.neighbors(i);
    if (static_cast<Index>(pos.size()) == n - 1) {
      row.setZero();  // numerator and denominator coincide
      continue;
    }
    double p_max = -std::numeric_limits<double>::infinity();
    for (const Index j : pos) {
      p_max = std::max(p_max, row(j) * inv_tau);
    }
    double pos_sum = 0.0;
    for (const Index j : pos) {
      pos_sum += std::exp(row(j) * inv_tau - p_max);
    }
    const double log_pos = p_max + std::log(pos_sum);
    auto& pull = pulls[static_cast<std::size_t>(i)];
    pull.reserve(pos.size());
    for (const Index j : pos) {
      pull.push_back({j, std::exp(row(j) * inv_tau - log_pos), row(j)});
    }

    row(i) = -std::numeric_limits<double>::infinity();
    const double z_max = row.maxCoeff() * inv_tau;
    row = (row * inv_tau - z_max).exp();
    row(i) = 0.0;
    const double all_sum = row.sum();
    row /= all_sum;
    total += std::max(0.0, z_max + std::log(all_sum) - log_pos);
  }

  // Term i depends on sim(i,k) with weight (p_ik - q_ik)/(n tau). sim is
  // symmetric, so instance i also collects the weights where it is the k side.
  const Matrix& p = scratch;
  Matrix pu = p * u;
  pu.noalias() += p.transpose() * u;
  Vector radial = (pu.cwiseProduct(u)).rowwise().sum();
  for (Index i = 0; i < n; ++i) {
    for (const Pull& t : pulls[static_cast<std::size_t>(i)]) {
      pu.row(i) -= t.q * u.row(t.j);
      pu.row(t.j) -= t.q * u.row(i);
      radial(i) -= t.q * t.sim;
      radial(t.j) -= t.q * t.sim;
    }
  }
  const double scale = 1.0 / (static_cast<double>(n) * tau);
  Matrix grad_values(n, d.classes());
  for (Index i = 0; i < n; ++i) {
    grad_values.row(i) = scale * (pu.row(i) - radial(i) * u.row(i)) / norms(i);
  }

  LeEvaluation out{total / static_cast<double>(n), Matrix(n, d.classes())};
  const Matrix& v = d.values();
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d.classes(); ++c) {
      out.grad(i, c) =
          d.is_clamped(i, c) ? 0.0 : grad_values(i, c) * v(i, c) * (1.0 - v(i, c));
    }
  }
  return out;
}

double le_loss(const SoftLabelMatrix& d, const NeighborIndex& nbr, double tau) {
  return le_loss_and_grad(d, nbr, tau).loss;
}

Matrix le_grad(const SoftLabelMatrix& d, const NeighborIndex& nbr, double tau) {
  return le_loss_and_grad(d, nbr, tau).grad;
}

EnhanceResult enhance(const FeatureMatrix& x, const LabelMatrix& partial, const LeConfig& cfg) {
  cfg.validate();
  if (x.n() != partial.n()) {
    throw ShapeError("enhance: features have " + std::to_string(x.n()) + " rows, labels " +
                     std::to_string(partial.n()));
  }
  EnhanceResult result{init_soft_labels(partial, cfg.background_for(partial.classes())), {}, {}};
  if (x.n() < 2) {
    return result;
  }
  const NeighborIndex nbr = build_knn(x, cfg.k);
  Matrix logits = result.soft.logits();
  Matrix scratch;
  for (Index step = 0; step <= cfg.steps; ++step) {
    LeEvaluation eval = le_loss_and_grad(result.soft, nbr, cfg.tau, scratch);
    if (!result.loss_trace.empty()) {
      const double prev = result.loss_trace.back();
      if (eval.loss > prev + 1e-12 * std::max(1.0, std::abs(prev))) {
        result.warnings.push_back("label enhancement loss increased at step " +
                                  std::to_string(step) + " (" + std::to_string(prev) + " -> " +
                                  std::to_string(eval.loss) + ")");
      }
    }
    result.loss_trace.push_back(eval.loss);
    if (step == cfg.steps) {
      break;
    }
    logits.noalias() -= cfg.lr * eval.grad;
    result.soft.set_logits(logits);
  }
  return result;
}

}  // namespace lepl
