#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lepl/error.hpp"
#include "lepl/metrics.hpp"
#include "oracles.hpp"

using namespace lepl;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (double v : row) {
      m(i, j++) = v;
    }
    ++i;
  }
  return m;
}

LabelMatrix labels(std::initializer_list<std::initializer_list<int>> r,
                   LabelKind kind = LabelKind::pseudo) {
  BinaryMatrix m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (int v : row) {
      m(i, j++) = static_cast<std::uint8_t>(v);
    }
    ++i;
  }
  return LabelMatrix(m, kind);
}

double rank(std::vector<double> s, Index label) { return static_cast<double>(rank_of(s, label)); }

}  // namespace

TEST(Rank, Examples) {
  EXPECT_EQ(rank({0.9, 0.5, 0.1}, 0), 1);
  EXPECT_EQ(rank({0.5, 0.5, 0.1}, 1), 2);
  EXPECT_EQ(rank({0.1, 0.2, 0.3}, 0), 3);
  std::vector<double> s{0.3, 0.1};
  EXPECT_THROW(rank_of(s, 2), std::invalid_argument);
}

TEST(Map, PerfectPredictorIsOne) {
  const auto y = labels({{1, 0, 1}, {0, 1, 0}, {1, 1, 0}});
  EXPECT_EQ(mean_average_precision(y.values().cast<double>(), y), 1.0);
}

TEST(Map, HandComputedSingleClass) {
  const auto y = labels({{1}, {0}, {1}});
  EXPECT_NEAR(mean_average_precision(rows({{0.9}, {0.8}, {0.1}}), y), 5.0 / 6.0, 1e-15);
}

TEST(Map, SkipsClassesWithoutPositivesAndThrowsWithNone) {
  const auto y = labels({{1, 0}, {0, 0}});
  EXPECT_EQ(mean_average_precision(rows({{0.9, 0.1}, {0.2, 0.8}}), y), 1.0);
  EXPECT_THROW(mean_average_precision(rows({{0.1}, {0.2}}), labels({{0}, {0}})), NumericError);
}

TEST(Lrl, Examples) {
  EXPECT_EQ(label_ranking_loss(rows({{0.9, 0.1, 0.2}}), labels({{1, 0, 0}})), 0.0);
  EXPECT_EQ(label_ranking_loss(rows({{0.2, 0.8, 0.5}}), labels({{1, 0, 0}})), 1.0);
  EXPECT_EQ(label_ranking_loss(rows({{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}}),
                               labels({{1, 0, 0}, {0, 0, 1}})),
            1.0);
  EXPECT_THROW(label_ranking_loss(rows({{0.5, 0.5}}), labels({{1, 1}})), NumericError);
}

TEST(Coverage, Examples) {
  EXPECT_EQ(coverage_error(rows({{0.9, 0.5, 0.1}}), labels({{1, 0, 0}})), 1.0);
  Matrix s = Matrix::Constant(1, 15, 0.5);
  s(0, 14) = 0.1;
  BinaryMatrix y = BinaryMatrix::Zero(1, 15);
  y(0, 14) = 1;
  EXPECT_EQ(coverage_error(s, LabelMatrix(y, LabelKind::partial)), 15.0);
}

TEST(OneError, Examples) {
  EXPECT_EQ(one_error(rows({{0.9, 0.1}, {0.2, 0.8}}), labels({{1, 0}, {1, 0}})), 0.5);
  EXPECT_EQ(one_error(Matrix::Constant(3, 4, 0.3), labels({{1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}})),
            0.0);
  const auto y = labels({{1, 0, 1}, {0, 1, 0}});
  EXPECT_EQ(one_error(y.values().cast<double>(), y), 0.0);
}

TEST(Hamming, Examples) {
  const BinaryMatrix a = labels({{1, 0}, {0, 1}}).values();
  BinaryMatrix b = a;
  EXPECT_EQ(hamming_risk(a, b), 0.0);
  b(1, 0) = 1;
  EXPECT_EQ(hamming_risk(a, b), 0.25);
  const BinaryMatrix c = (1 - a.array()).matrix();
  EXPECT_EQ(hamming_risk(a, c), 1.0);
  EXPECT_THROW(hamming_risk(BinaryMatrix(2, 2), BinaryMatrix(2, 3)), ShapeError);
}

TEST(Binarize, ThresholdIsInclusive) {
  const BinaryMatrix b = binarize(rows({{0.5, 0.4999, 0.9}}));
  EXPECT_EQ(b(0, 0), 1);
  EXPECT_EQ(b(0, 1), 0);
  EXPECT_EQ(b(0, 2), 1);
}

TEST(Metrics, MatchBruteForceWithTies) {
  oracle::Random r(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = r.integer(1, 20);
    const Index c = r.integer(1, 8);
    const Matrix s = r.tied_scores(n, c);
    BinaryMatrix yv = BinaryMatrix::Zero(n, c);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < c; ++j) {
        yv(i, j) = r.uniform() < 0.35 ? 1 : 0;
      }
    }
    const LabelMatrix y(yv, LabelKind::pseudo);
    const auto check = [&](auto lib, std::optional<double> want) {
      if (want) {
        EXPECT_EQ(lib(), *want) << "trial " << trial;
      } else {
        EXPECT_THROW(lib(), NumericError) << "trial " << trial;
      }
    };
    check([&] { return mean_average_precision(s, y); }, oracle::map(s, yv));
    check([&] { return label_ranking_loss(s, y); }, oracle::lrl(s, yv));
    check([&] { return coverage_error(s, y); }, oracle::coverage(s, yv));
    check([&] { return one_error(s, y); }, oracle::one_error(s, yv));
    const BinaryMatrix pred = binarize(s);
    EXPECT_EQ(hamming_risk(pred, yv), oracle::hamming(pred, yv));
  }
}

TEST(Metrics, InvariantUnderIncreasingTransform) {
  oracle::Random r(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = r.integer(2, 15);
    const Index c = r.integer(2, 6);
    const Matrix s = r.tied_scores(n, c);
    const LabelMatrix y(r.full_labels(n, c), LabelKind::full);
    const Matrix t = s.unaryExpr([](double x) { return x * x * x + x; });
    EXPECT_EQ(mean_average_precision(s, y), mean_average_precision(t, y));
    EXPECT_EQ(coverage_error(s, y), coverage_error(t, y));
    EXPECT_EQ(one_error(s, y), one_error(t, y));
    if (oracle::lrl(s, y.values())) {
      EXPECT_EQ(label_ranking_loss(s, y), label_ranking_loss(t, y));
    }
  }
}

TEST(Metrics, EquivariantUnderPermutations) {
  oracle::Random r(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = r.integer(2, 12);
    const Index c = r.integer(2, 6);
    // distinct scores: the tie rule is index-based and would not commute
    const Matrix s = r.normal_matrix(n, c);
    BinaryMatrix yv = r.full_labels(n, c);
    yv.col(0).setZero();  // exercise the skipped-class rule
    for (Index i = 0; i < n; ++i) {
      if (yv.row(i).cast<int>().sum() == 0) {
        yv(i, c - 1) = 1;
      }
    }
    const LabelMatrix y(yv, LabelKind::full);

    std::vector<Index> pr(static_cast<std::size_t>(n));
    std::vector<Index> pc(static_cast<std::size_t>(c));
    std::iota(pr.begin(), pr.end(), Index{0});
    std::iota(pc.begin(), pc.end(), Index{0});
    std::shuffle(pr.begin(), pr.end(), r.rng);
    std::shuffle(pc.begin(), pc.end(), r.rng);
    Matrix s2(n, c);
    BinaryMatrix y2(n, c);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < c; ++j) {
        s2(i, j) = s(pr[static_cast<std::size_t>(i)], pc[static_cast<std::size_t>(j)]);
        y2(i, j) = yv(pr[static_cast<std::size_t>(i)], pc[static_cast<std::size_t>(j)]);
      }
    }
    const LabelMatrix yp(y2, LabelKind::full);
    EXPECT_NEAR(mean_average_precision(s, y), mean_average_precision(s2, yp), 1e-12);
    EXPECT_NEAR(coverage_error(s, y), coverage_error(s2, yp), 1e-12);
    EXPECT_NEAR(one_error(s, y), one_error(s2, yp), 1e-12);
    if (oracle::lrl(s, yv)) {
      EXPECT_NEAR(label_ranking_loss(s, y), label_ranking_loss(s2, yp), 1e-12);
    }
    EXPECT_NEAR(hamming_risk(binarize(s), yv), hamming_risk(binarize(s2), y2), 1e-12);
  }
}

TEST(Metrics, RangeBounds) {
  oracle::Random r(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = r.integer(1, 15);
    const Index c = r.integer(2, 8);
    const Matrix s = r.tied_scores(n, c);
    const LabelMatrix y(r.full_labels(n, c), LabelKind::full);
    const double m = mean_average_precision(s, y);
    EXPECT_GT(m, 0.0);
    EXPECT_LE(m, 1.0);
    const double ce = coverage_error(s, y);
    EXPECT_GE(ce, 1.0);
    EXPECT_LE(ce, static_cast<double>(c));
    const double oe = one_error(s, y);
    EXPECT_GE(oe, 0.0);
    EXPECT_LE(oe, 1.0);
    if (oracle::lrl(s, y.values())) {
      const double l = label_ranking_loss(s, y);
      EXPECT_GE(l, 0.0);
      EXPECT_LE(l, 1.0);
    }
  }
}

TEST(Evaluate, ShapeMismatchNamesBothCounts) {
  const auto y = labels({{1, 0}, {0, 1}}, LabelKind::full);
  try {
    evaluate(rows({{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}}), y);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('3'), std::string::npos) << msg;
    EXPECT_NE(msg.find('2'), std::string::npos) << msg;
  }
}

TEST(Report, JsonAndKeyValueRoundTrip) {
  MetricsReport r;
  r.map = 0.1 + 0.2;
  r.lrl = 1.0 / 3.0;
  r.coverage_error = 2.5;
  r.one_error = 0.0;
  r.hamming_risk = 1e-17;
  EXPECT_EQ(parse_report_json(to_json(r)), r);
  EXPECT_EQ(parse_report_key_value(to_key_value(r)), r);
  EXPECT_THROW(parse_report_json("[1,2]"), FormatError);
  EXPECT_THROW(parse_report_key_value("map = 1\nbogus = 2\n"), FormatError);
}
