#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "lepl/types.hpp"

namespace lepl {

/// Header layout of a dense real-valued matrix file:
///   #<tag> v1 <row_key>=<rows> <col_key>=<cols>
/// followed by one line per row of space-separated decimals. Square formats
/// leave col_key empty and declare a single dimension.
struct RealMatrixFormat {
  std::string_view tag;
  std::string_view row_key;
  std::string_view col_key;
};

inline constexpr RealMatrixFormat kFeatureFormat{"lepl-features", "n", "d"};
inline constexpr RealMatrixFormat kSoftLabelFormat{"lepl-softlabels", "n", "c"};
inline constexpr RealMatrixFormat kPredictionFormat{"lepl-predictions", "n", "c"};
inline constexpr RealMatrixFormat kEmbeddingFormat{"lepl-embeddings", "c", "d"};
inline constexpr RealMatrixFormat kClassifierFormat{"lepl-classifier", "c", "d"};
inline constexpr RealMatrixFormat kCooccurrenceFormat{"lepl-cooc", "c", ""};

/// Reads a real matrix file. Non-finite entries are rejected.
Matrix read_real_matrix(const std::filesystem::path& path, const RealMatrixFormat& format);
/// Writes with shortest round-trip decimals, so reading back is bit-exact.
void write_real_matrix(const Matrix& m, const std::filesystem::path& path,
                       const RealMatrixFormat& format);

FeatureMatrix load_features(const std::filesystem::path& path);
void write_features(const FeatureMatrix& x, const std::filesystem::path& path);

/// The header's kind must equal `expected_kind`, and every row must satisfy
/// that kind's invariant.
LabelMatrix load_labels(const std::filesystem::path& path, LabelKind expected_kind);
void write_labels(const LabelMatrix& y, const std::filesystem::path& path);

/// Per-instance multi-label votes of A annotators over C classes.
class AnnotationTensor {
 public:
  AnnotationTensor(Index n, Index classes, Index annotators);
  /// `votes` holds n*A rows grouped by instance: row i*A + a is annotator a's
  /// vote on instance i.
  AnnotationTensor(BinaryMatrix votes, Index annotators);

  Index n() const noexcept { return n_; }
  Index classes() const noexcept { return votes_.cols(); }
  Index annotators() const noexcept { return annotators_; }

  bool vote(Index i, Index a, Index c) const { return votes_(i * annotators_ + a, c) != 0; }
  void set_vote(Index i, Index a, Index c, bool v) {
    votes_(i * annotators_ + a, c) = v ? 1 : 0;
  }
  const BinaryMatrix& raw() const noexcept { return votes_; }

 private:
  Index n_;
  Index annotators_;
  BinaryMatrix votes_;
};

AnnotationTensor load_votes(const std::filesystem::path& path);
void write_votes(const AnnotationTensor& votes, const std::filesystem::path& path);

/// Strict-majority aggregation: class c is on iff more than A/2 annotators
/// voted for it. Rows that end up empty get the None class (last index).
LabelMatrix majority_vote(const AnnotationTensor& votes);

struct SynthConfig {
  Index n_train = 2000;
  Index n_val = 500;
  Index n_test = 500;
  Index classes = 10;
  Index dim = 16;
  Index max_active = 3;
  double noise_sigma = 0.4;
  /// Chance that each active class after the first is drawn from the
  /// max_active - 1 classes following the first one (cyclically) instead of
  /// uniformly. Gives the label set a co-occurrence structure.
  double affinity = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthDataset {
  FeatureMatrix train_features;
  LabelMatrix train_partial;  // single most salient label
  LabelMatrix train_truth;    // full active set, never shown to learners
  FeatureMatrix val_features;
  LabelMatrix val_labels;
  FeatureMatrix test_features;
  LabelMatrix test_labels;
};

/// Prototype-mixture data: each instance activates 1..max_active classes, its
/// feature is the mean of the active prototypes plus Gaussian noise, and its
/// partial label is the active class whose prototype is closest in cosine.
SynthDataset synth_generate(const SynthConfig& cfg);

}  // namespace lepl
