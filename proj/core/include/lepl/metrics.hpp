#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "lepl/types.hpp"

namespace lepl {

class PredictionMatrix;

struct MetricsReport {
  double map = 0.0;
  double lrl = 0.0;
  double coverage_error = 0.0;
  double one_error = 0.0;
  double hamming_risk = 0.0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Ranking convention shared by every metric: scores sorted descending, ties
// resolved in favour of the lower class (or instance) index, ranks 1-based.

Index rank_of(std::span<const double> scores, Index label);

/// Macro mean over classes of per-class average precision along the instance
/// ranking. Classes without positives are left out; throws FormatError if
/// there are no positives at all.
double mean_average_precision(const Matrix& scores, const LabelMatrix& truth);

/// Fraction of (positive, negative) pairs with score_pos <= score_neg,
/// averaged over instances that have both. Throws if none do.
double label_ranking_loss(const Matrix& scores, const LabelMatrix& truth);

/// Mean over instances with a positive of the deepest positive rank.
double coverage_error(const Matrix& scores, const LabelMatrix& truth);

/// Fraction of instances (with a positive) whose top-scored class is negative.
double one_error(const Matrix& scores, const LabelMatrix& truth);

/// Mean elementwise disagreement of two binary matrices.
double hamming_risk(const BinaryMatrix& predicted, const BinaryMatrix& truth);

/// score >= threshold maps to 1.
BinaryMatrix binarize(const Matrix& scores, double threshold = 0.5);

MetricsReport evaluate(const Matrix& scores, const LabelMatrix& truth);
MetricsReport evaluate(const PredictionMatrix& pred, const LabelMatrix& truth);

/// `key = value` lines in a fixed key order.
std::string to_key_value(const MetricsReport& report);
/// One JSON object with keys map, lrl, coverage_error, one_error, hamming_risk.
std::string to_json(const MetricsReport& report);
MetricsReport parse_report_json(const std::string& text);
MetricsReport parse_report_key_value(const std::string& text);

void write_report(const MetricsReport& report, const std::filesystem::path& key_value_path,
                  const std::filesystem::path& json_path);

}  // namespace lepl
