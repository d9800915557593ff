#include "lepl/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lepl/error.hpp"
#include "lepl/seed.hpp"
#include "text_format.hpp"

namespace lepl {

FeatureMatrix::FeatureMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw FormatError("feature matrix must have n >= 1 and d >= 1");
  }
  if (!values_.allFinite()) {
    for (Index i = 0; i < values_.rows(); ++i) {
      if (!values_.row(i).allFinite()) {
        throw FormatError("feature matrix row " + std::to_string(i) +
                          " contains a non-finite value");
      }
    }
  }
}

std::string_view to_string(LabelKind kind) noexcept {
  switch (kind) {
    case LabelKind::partial:
      return "partial";
    case LabelKind::full:
      return "full";
    case LabelKind::pseudo:
      return "pseudo";
  }
  return "unknown";
}

LabelKind parse_label_kind(std::string_view text) {
  if (text == "partial") {
    return LabelKind::partial;
  }
  if (text == "full") {
    return LabelKind::full;
  }
  if (text == "pseudo") {
    return LabelKind::pseudo;
  }
  throw FormatError("unknown label kind '" + std::string(text) + "'");
}

namespace {

// Empty string when the row satisfies the kind invariant.
std::string row_violation(const BinaryMatrix& values, Index row, LabelKind kind) {
  Index positives = 0;
  for (Index c = 0; c < values.cols(); ++c) {
    const auto v = values(row, c);
    if (v > 1) {
      return "entry " + std::to_string(int{v}) + " is outside {0,1}";
    }
    positives += v;
  }
  if (kind == LabelKind::partial && positives != 1) {
    return "kind violation: partial row must have exactly one positive, found " +
           std::to_string(positives);
  }
  if (kind == LabelKind::full && positives == 0) {
    return "kind violation: full row has no positive label";
  }
  return {};
}

}  // namespace

LabelMatrix::LabelMatrix(BinaryMatrix values, LabelKind kind)
    : values_(std::move(values)), kind_(kind) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw FormatError("label matrix must have n >= 1 and C >= 1");
  }
  for (Index i = 0; i < values_.rows(); ++i) {
    if (auto why = row_violation(values_, i, kind_); !why.empty()) {
      throw FormatError("label row " + std::to_string(i) + ": " + why);
    }
  }
}

void require_same_shape(Index rows_a, Index cols_a, Index rows_b, Index cols_b,
                        std::string_view what) {
  if (rows_a != rows_b || cols_a != cols_b) {
    throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(rows_a) + "x" +
                     std::to_string(cols_a) + " vs " + std::to_string(rows_b) + "x" +
                     std::to_string(cols_b) + ")");
  }
}

Matrix read_real_matrix(const std::filesystem::path& path, const RealMatrixFormat& format) {
  detail::LineReader reader(path);
  std::vector<std::string_view> keys{format.row_key};
  if (!format.col_key.empty()) {
    keys.push_back(format.col_key);
  }
  const auto header = detail::read_header(reader, format.tag, keys);
  const Index rows = header.count(format.row_key, reader.path());
  const Index cols = format.col_key.empty() ? rows : header.count(format.col_key, reader.path());
  return detail::read_real_rows(reader, rows, cols);
}

void write_real_matrix(const Matrix& m, const std::filesystem::path& path,
                       const RealMatrixFormat& format) {
  auto out = detail::open_for_write(path);
  out << '#' << format.tag << " v1 " << format.row_key << '=' << m.rows();
  if (!format.col_key.empty()) {
    out << ' ' << format.col_key << '=' << m.cols();
  }
  out << '\n';
  detail::write_real_rows(out, m);
  detail::finish_write(out, path);
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  Matrix m = read_real_matrix(path, kFeatureFormat);
  if (m.rows() < 1 || m.cols() < 1) {
    throw FormatError(path.string(), 1, "malformed header: n and d must be at least 1");
  }
  return FeatureMatrix(std::move(m));
}

void write_features(const FeatureMatrix& x, const std::filesystem::path& path) {
  write_real_matrix(x.values(), path, kFeatureFormat);
}

LabelMatrix load_labels(const std::filesystem::path& path, LabelKind expected_kind) {
  detail::LineReader reader(path);
  const auto header = detail::read_header(reader, "lepl-labels", {"n", "c", "kind"});
  const Index n = header.count("n", reader.path());
  const Index c = header.count("c", reader.path());
  if (n < 1 || c < 1) {
    throw FormatError(reader.path(), 1, "malformed header: n and c must be at least 1");
  }
  LabelKind kind;
  try {
    kind = parse_label_kind(header.text("kind", reader.path()));
  } catch (const FormatError& e) {
    throw FormatError(reader.path(), 1, std::string("malformed header: ") + e.what());
  }
  if (kind != expected_kind) {
    throw FormatError(reader.path(), 1,
                      "kind violation: expected kind=" + std::string(to_string(expected_kind)) +
                          ", file declares kind=" + std::string(to_string(kind)));
  }
  BinaryMatrix values = detail::read_bit_rows(reader, n, c);
  for (Index i = 0; i < n; ++i) {
    if (auto why = row_violation(values, i, kind); !why.empty()) {
      throw FormatError(reader.path(), static_cast<std::size_t>(i) + 2, why);
    }
  }
  return LabelMatrix(std::move(values), kind);
}

void write_labels(const LabelMatrix& y, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "#lepl-labels v1 n=" << y.n() << " c=" << y.classes() << " kind=" << to_string(y.kind())
      << '\n';
  detail::write_bit_rows(out, y.values());
  detail::finish_write(out, path);
}

AnnotationTensor::AnnotationTensor(Index n, Index classes, Index annotators)
    : n_(n), annotators_(annotators), votes_(BinaryMatrix::Zero(n * annotators, classes)) {
  if (n < 1 || classes < 1 || annotators < 1) {
    throw std::invalid_argument("annotation tensor needs n, C, A >= 1");
  }
}

AnnotationTensor::AnnotationTensor(BinaryMatrix votes, Index annotators)
    : n_(annotators > 0 ? votes.rows() / annotators : 0),
      annotators_(annotators),
      votes_(std::move(votes)) {
  if (annotators < 1 || votes_.cols() < 1 || votes_.rows() < 1 ||
      votes_.rows() % annotators != 0) {
    throw FormatError("annotation rows must be a positive multiple of the annotator count");
  }
  if ((votes_.array() > 1).any()) {
    throw FormatError("annotation entries must be in {0,1}");
  }
}

AnnotationTensor load_votes(const std::filesystem::path& path) {
  detail::LineReader reader(path);
  const auto header = detail::read_header(reader, "lepl-votes", {"n", "c", "a"});
  const Index n = header.count("n", reader.path());
  const Index c = header.count("c", reader.path());
  const Index a = header.count("a", reader.path());
  if (n < 1 || c < 1 || a < 1) {
    throw FormatError(reader.path(), 1, "malformed header: n, c and a must be at least 1");
  }
  return AnnotationTensor(detail::read_bit_rows(reader, n * a, c), a);
}

void write_votes(const AnnotationTensor& votes, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "#lepl-votes v1 n=" << votes.n() << " c=" << votes.classes()
      << " a=" << votes.annotators() << '\n';
  detail::write_bit_rows(out, votes.raw());
  detail::finish_write(out, path);
}

LabelMatrix majority_vote(const AnnotationTensor& votes) {
  const Index n = votes.n();
  const Index classes = votes.classes();
  const Index annotators = votes.annotators();
  BinaryMatrix out = BinaryMatrix::Zero(n, classes);
  for (Index i = 0; i < n; ++i) {
    bool any = false;
    for (Index c = 0; c < classes; ++c) {
      Index count = 0;
      for (Index a = 0; a < annotators; ++a) {
        count += votes.vote(i, a, c) ? 1 : 0;
      }
      if (2 * count > annotators) {
        out(i, c) = 1;
        any = true;
      }
    }
    if (!any) {
      out(i, classes - 1) = 1;  // None class
    }
  }
  return LabelMatrix(std::move(out), LabelKind::full);
}

void SynthConfig::validate() const {
  if (n_train < 2 || n_val < 1 || n_test < 1) {
    throw std::invalid_argument("synth: need n_train >= 2, n_val >= 1, n_test >= 1");
  }
  if (classes < 1 || dim < 1) {
    throw std::invalid_argument("synth: classes and dim must be at least 1");
  }
  if (max_active < 1 || max_active > classes) {
    throw std::invalid_argument("synth: max_active must lie in [1, classes]");
  }
  if (!(affinity >= 0.0 && affinity <= 1.0)) {
    throw std::invalid_argument("synth: affinity must lie in [0, 1]");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("synth: noise_sigma must be finite and >= 0");
  }
}

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, 1.0};

  double gaussian() { return normal(rng); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
  Index uniform(Index lo, Index hi) {  // inclusive
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
  }
};

struct SplitDraw {
  Matrix features;
  BinaryMatrix truth;
  BinaryMatrix salient;
};

SplitDraw draw_split(Sampler& s, const Matrix& prototypes, Index n, const SynthConfig& cfg) {
  const Index classes = prototypes.rows();
  const Index dim = prototypes.cols();
  SplitDraw out{Matrix(n, dim), BinaryMatrix::Zero(n, classes), BinaryMatrix::Zero(n, classes)};
  std::vector<Index> order(static_cast<std::size_t>(classes));
  for (Index i = 0; i < n; ++i) {
    const Index active = s.uniform(1, cfg.max_active);
    std::iota(order.begin(), order.end(), Index{0});
    // order[0..t) holds the classes picked so far, order[t..C) the rest
    const auto pick = [&](Index t, Index slot) {
      std::swap(order[static_cast<std::size_t>(t)], order[static_cast<std::size_t>(slot)]);
    };
    pick(0, s.uniform(0, classes - 1));
    const Index anchor = order[0];
    for (Index t = 1; t < active; ++t) {
      std::vector<Index> near;
      if (s.unit() < cfg.affinity) {
        for (Index slot = t; slot < classes; ++slot) {
          const Index ahead = (order[static_cast<std::size_t>(slot)] - anchor + classes) % classes;
          if (ahead >= 1 && ahead < cfg.max_active) {
            near.push_back(slot);
          }
        }
      }
      if (near.empty()) {
        pick(t, s.uniform(t, classes - 1));
      } else {
        pick(t, near[static_cast<std::size_t>(s.uniform(0, static_cast<Index>(near.size()) - 1))]);
      }
    }
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(dim);
    for (Index t = 0; t < active; ++t) {
      const Index c = order[static_cast<std::size_t>(t)];
      out.truth(i, c) = 1;
      x += prototypes.row(c);
    }
    x /= static_cast<double>(active);
    for (Index k = 0; k < dim; ++k) {
      x(k) += cfg.noise_sigma * s.gaussian();
    }
    out.features.row(i) = x;

    Index best = -1;
    double best_cos = 0.0;
    const double x_norm = x.norm();
    for (Index c = 0; c < classes; ++c) {
      if (out.truth(i, c) == 0) {
        continue;
      }
      const double denom = x_norm * prototypes.row(c).norm();
      const double cos = denom > 0.0 ? x.dot(prototypes.row(c)) / denom : 0.0;
      if (best < 0 || cos > best_cos) {
        best = c;
        best_cos = cos;
      }
    }
    out.salient(i, best) = 1;
  }
  return out;
}

}  // namespace

SynthDataset synth_generate(const SynthConfig& cfg) {
  cfg.validate();
  Sampler s{std::mt19937_64(derive_seed(cfg.seed, "synth"))};
  Matrix prototypes(cfg.classes, cfg.dim);
  for (Index c = 0; c < cfg.classes; ++c) {
    for (Index k = 0; k < cfg.dim; ++k) {
      prototypes(c, k) = s.gaussian();
    }
    // equal lengths (sqrt(d), the typical length of the draw), so salience
    // among active classes is decided by the noise rather than by which
    // prototype happens to be longer
    const double len = prototypes.row(c).norm();
    if (len > 0.0) {
      prototypes.row(c) *= std::sqrt(static_cast<double>(cfg.dim)) / len;
    }
  }
  auto train = draw_split(s, prototypes, cfg.n_train, cfg);
  auto val = draw_split(s, prototypes, cfg.n_val, cfg);
  auto test = draw_split(s, prototypes, cfg.n_test, cfg);
  return SynthDataset{
      FeatureMatrix(std::move(train.features)),
      LabelMatrix(std::move(train.salient), LabelKind::partial),
      LabelMatrix(std::move(train.truth), LabelKind::full),
      FeatureMatrix(std::move(val.features)),
      LabelMatrix(std::move(val.truth), LabelKind::full),
      FeatureMatrix(std::move(test.features)),
      LabelMatrix(std::move(test.truth), LabelKind::full),
  };
}

}  // namespace lepl
