#include "lepl/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "lepl/error.hpp"
#include "lepl/trainer.hpp"
#include "text_format.hpp"

namespace lepl {

namespace {

void check_shapes(const Matrix& scores, const LabelMatrix& truth, const char* what) {
  require_same_shape(scores.rows(), scores.cols(), truth.n(), truth.classes(), what);
}

// Class indices of row i ordered best first.
std::vector<Index> ranked_classes(const Matrix& scores, Index i) {
  std::vector<Index> order(static_cast<std::size_t>(scores.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return scores(i, a) > scores(i, b) || (scores(i, a) == scores(i, b) && a < b);
  });
  return order;
}

Index count_positives(const LabelMatrix& truth, Index i) {
  Index p = 0;
  for (Index c = 0; c < truth.classes(); ++c) {
    p += truth.positive(i, c) ? 1 : 0;
  }
  return p;
}

}  // namespace

Index rank_of(std::span<const double> scores, Index label) {
  if (label < 0 || label >= static_cast<Index>(scores.size())) {
    throw std::invalid_argument("rank_of: label index out of range");
  }
  const double s = scores[static_cast<std::size_t>(label)];
  Index rank = 1;
  for (Index k = 0; k < static_cast<Index>(scores.size()); ++k) {
    const double v = scores[static_cast<std::size_t>(k)];
    if (v > s || (v == s && k < label)) {
      ++rank;
    }
  }
  return rank;
}

double mean_average_precision(const Matrix& scores, const LabelMatrix& truth) {
  check_shapes(scores, truth, "mean_average_precision");
  const Index n = truth.n();
  std::vector<Index> order(static_cast<std::size_t>(n));
  double ap_sum = 0.0;
  Index counted = 0;
  for (Index c = 0; c < truth.classes(); ++c) {
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return scores(a, c) > scores(b, c) || (scores(a, c) == scores(b, c) && a < b);
    });
    Index hits = 0;
    double precision_sum = 0.0;
    for (Index r = 0; r < n; ++r) {
      if (truth.positive(order[static_cast<std::size_t>(r)], c)) {
        ++hits;
        precision_sum += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
    }
    if (hits > 0) {
      ap_sum += precision_sum / static_cast<double>(hits);
      ++counted;
    }
  }
  if (counted == 0) {
    throw NumericError("mean_average_precision: ground truth has no positive labels");
  }
  return ap_sum / static_cast<double>(counted);
}

double label_ranking_loss(const Matrix& scores, const LabelMatrix& truth) {
  check_shapes(scores, truth, "label_ranking_loss");
  double total = 0.0;
  Index counted = 0;
  std::vector<double> negatives;
  for (Index i = 0; i < truth.n(); ++i) {
    negatives.clear();
    for (Index c = 0; c < truth.classes(); ++c) {
      if (!truth.positive(i, c)) {
        negatives.push_back(scores(i, c));
      }
    }
    const Index n_neg = static_cast<Index>(negatives.size());
    const Index n_pos = truth.classes() - n_neg;
    if (n_pos == 0 || n_neg == 0) {
      continue;
    }
    std::sort(negatives.begin(), negatives.end());
    Index violations = 0;
    for (Index c = 0; c < truth.classes(); ++c) {
      if (truth.positive(i, c)) {
        // negatives scoring >= this positive
        const auto first = std::lower_bound(negatives.begin(), negatives.end(), scores(i, c));
        violations += static_cast<Index>(negatives.end() - first);
      }
    }
    total += static_cast<double>(violations) / static_cast<double>(n_pos * n_neg);
    ++counted;
  }
  if (counted == 0) {
    throw NumericError("label_ranking_loss: no instance has both positive and negative labels");
  }
  return total / static_cast<double>(counted);
}

double coverage_error(const Matrix& scores, const LabelMatrix& truth) {
  check_shapes(scores, truth, "coverage_error");
  double total = 0.0;
  Index counted = 0;
  for (Index i = 0; i < truth.n(); ++i) {
    if (count_positives(truth, i) == 0) {
      continue;
    }
    const auto order = ranked_classes(scores, i);
    Index deepest = 0;
    for (Index r = 0; r < static_cast<Index>(order.size()); ++r) {
      if (truth.positive(i, order[static_cast<std::size_t>(r)])) {
        deepest = r + 1;
      }
    }
    total += static_cast<double>(deepest);
    ++counted;
  }
  if (counted == 0) {
    throw NumericError("coverage_error: no instance has a positive label");
  }
  return total / static_cast<double>(counted);
}

double one_error(const Matrix& scores, const LabelMatrix& truth) {
  check_shapes(scores, truth, "one_error");
  Index misses = 0;
  Index counted = 0;
  for (Index i = 0; i < truth.n(); ++i) {
    if (count_positives(truth, i) == 0) {
      continue;
    }
    Index top = 0;
    for (Index c = 1; c < truth.classes(); ++c) {
      if (scores(i, c) > scores(i, top)) {
        top = c;
      }
    }
    misses += truth.positive(i, top) ? 0 : 1;
    ++counted;
  }
  if (counted == 0) {
    throw NumericError("one_error: no instance has a positive label");
  }
  return static_cast<double>(misses) / static_cast<double>(counted);
}

double hamming_risk(const BinaryMatrix& predicted, const BinaryMatrix& truth) {
  require_same_shape(predicted.rows(), predicted.cols(), truth.rows(), truth.cols(),
                     "hamming_risk");
  if (truth.size() == 0) {
    throw std::invalid_argument("hamming_risk of an empty matrix");
  }
  Index mismatches = 0;
  for (Index i = 0; i < truth.rows(); ++i) {
    for (Index c = 0; c < truth.cols(); ++c) {
      mismatches += (predicted(i, c) != 0) != (truth(i, c) != 0) ? 1 : 0;
    }
  }
  return static_cast<double>(mismatches) / static_cast<double>(truth.size());
}

BinaryMatrix binarize(const Matrix& scores, double threshold) {
  return (scores.array() >= threshold).cast<std::uint8_t>().matrix();
}

MetricsReport evaluate(const Matrix& scores, const LabelMatrix& truth) {
  MetricsReport r;
  r.map = mean_average_precision(scores, truth);
  r.lrl = label_ranking_loss(scores, truth);
  r.coverage_error = coverage_error(scores, truth);
  r.one_error = one_error(scores, truth);
  r.hamming_risk = hamming_risk(binarize(scores), truth.values());
  return r;
}

MetricsReport evaluate(const PredictionMatrix& pred, const LabelMatrix& truth) {
  if (pred.n() != truth.n()) {
    throw ShapeError("evaluate: predictions have n=" + std::to_string(pred.n()) +
                     ", labels have n=" + std::to_string(truth.n()));
  }
  if (pred.classes() != truth.classes()) {
    throw ShapeError("evaluate: predictions have c=" + std::to_string(pred.classes()) +
                     ", labels have c=" + std::to_string(truth.classes()));
  }
  return evaluate(pred.values(), truth);
}

namespace {

struct Field {
  const char* key;
  double MetricsReport::*member;
};

constexpr Field kFields[] = {
    {"map", &MetricsReport::map},
    {"lrl", &MetricsReport::lrl},
    {"coverage_error", &MetricsReport::coverage_error},
    {"one_error", &MetricsReport::one_error},
    {"hamming_risk", &MetricsReport::hamming_risk},
};

}  // namespace

std::string to_key_value(const MetricsReport& report) {
  std::string out;
  for (const auto& f : kFields) {
    out += f.key;
    out += " = ";
    out += detail::format_real(report.*(f.member));
    out += '\n';
  }
  return out;
}

std::string to_json(const MetricsReport& report) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& f : kFields) {
    j[f.key] = report.*(f.member);
  }
  return j.dump(2) + "\n";
}

MetricsReport parse_report_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("metrics report: ") + e.what());
  }
  if (!j.is_object()) {
    throw FormatError("metrics report: expected a JSON object");
  }
  MetricsReport r;
  for (const auto& f : kFields) {
    if (!j.contains(f.key) || !j[f.key].is_number()) {
      throw FormatError(std::string("metrics report: missing numeric key '") + f.key + "'");
    }
    r.*(f.member) = j[f.key].get<double>();
  }
  return r;
}

MetricsReport parse_report_key_value(const std::string& text) {
  MetricsReport r;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("report", line_no, "expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    bool known = false;
    for (const auto& f : kFields) {
      if (key == f.key) {
        r.*(f.member) = detail::parse_real(value, "report", line_no);
        known = true;
        ++seen;
      }
    }
    if (!known) {
      throw FormatError("report", line_no, "unknown key '" + key + "'");
    }
  }
  if (seen != std::size(kFields)) {
    throw FormatError("metrics report: expected exactly five keys");
  }
  return r;
}

void write_report(const MetricsReport& report, const std::filesystem::path& key_value_path,
                  const std::filesystem::path& json_path) {
  {
    auto out = detail::open_for_write(key_value_path);
    out << to_key_value(report);
    detail::finish_write(out, key_value_path);
  }
  auto out = detail::open_for_write(json_path);
  out << to_json(report);
  detail::finish_write(out, json_path);
}

}  // namespace lepl
