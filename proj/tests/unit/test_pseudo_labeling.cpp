#include <gtest/gtest.h>

#include "lepl/error.hpp"
#include "lepl/label_enhancement.hpp"
#include "lepl/pseudo_labeling.hpp"
#include "oracles.hpp"

using namespace lepl;

namespace {

LabelMatrix make(std::initializer_list<std::initializer_list<int>> r, LabelKind kind) {
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

ClassPriors priors(std::vector<Index> k, Index n_train) {
  ClassPriors p;
  p.k_per_class = std::move(k);
  p.gamma.assign(p.k_per_class.size(), 0.0);
  p.n_train = n_train;
  return p;
}

SoftLabelMatrix soft_column(std::vector<double> col, const LabelMatrix& observed) {
  Matrix v(static_cast<Index>(col.size()), 1);
  for (std::size_t i = 0; i < col.size(); ++i) {
    v(static_cast<Index>(i), 0) = observed.positive(static_cast<Index>(i), 0) ? 1.0 : col[i];
  }
  return SoftLabelMatrix::from_values(v, observed.values());
}

Index column_count(const LabelMatrix& y, Index c) {
  return y.values().col(c).cast<Index>().sum();
}

}  // namespace

TEST(Priors, Examples) {
  const auto val = make({{1, 1, 0}, {1, 0, 0}}, LabelKind::full);
  const ClassPriors p = estimate_priors(val, 10);
  EXPECT_EQ(p.gamma, (std::vector<double>{1.0, 0.5, 0.0}));
  EXPECT_EQ(p.k_per_class, (std::vector<Index>{10, 5, 0}));

  const auto ones = make({{1, 1}, {1, 1}, {1, 1}}, LabelKind::full);
  const ClassPriors q = estimate_priors(ones, 7);
  EXPECT_EQ(q.gamma, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(q.k_per_class, (std::vector<Index>{7, 7}));
}

TEST(Priors, FloorIsExactInIntegers) {
  // 0.29 * 100 is 28.999... in binary floating point
  BinaryMatrix v = BinaryMatrix::Zero(100, 2);
  for (Index i = 0; i < 100; ++i) {
    v(i, i < 29 ? 0 : 1) = 1;
  }
  const ClassPriors p = estimate_priors(LabelMatrix(v, LabelKind::full), 100);
  EXPECT_EQ(p.k_per_class[0], 29);
  EXPECT_EQ(p.k_per_class[1], 71);
}

TEST(Generate, TopKOfOneColumn) {
  const auto obs = make({{0}, {0}, {0}, {0}}, LabelKind::pseudo);
  const auto out = generate_pseudo_labels(soft_column({0.9, 0.2, 0.8, 0.1}, obs), priors({2}, 4), obs);
  EXPECT_EQ(out.values().col(0).cast<int>(), (Eigen::Vector4i{1, 0, 1, 0}));
}

TEST(Generate, ZeroBudgetGivesEmptyColumn) {
  const auto obs = make({{0}, {0}, {0}}, LabelKind::pseudo);
  const auto out = generate_pseudo_labels(soft_column({0.9, 0.5, 0.7}, obs), priors({0}, 3), obs);
  EXPECT_EQ(column_count(out, 0), 0);
}

TEST(Generate, ObservationDominatesRanking) {
  const auto obs = make({{0}, {0}, {0}, {1}}, LabelKind::pseudo);
  const auto out = generate_pseudo_labels(soft_column({0.9, 0.5, 0.7, 0.1}, obs), priors({1}, 4), obs);
  EXPECT_EQ(out.values().col(0).cast<int>(), (Eigen::Vector4i{0, 0, 0, 1}));
}

TEST(Generate, TiesGoToLowerIndex) {
  const auto obs = make({{0}, {0}, {0}}, LabelKind::pseudo);
  const auto out = generate_pseudo_labels(soft_column({0.4, 0.6, 0.6}, obs), priors({1}, 3), obs);
  EXPECT_EQ(out.values().col(0).cast<int>(), (Eigen::Vector3i{0, 1, 0}));
}

TEST(Generate, ContractOnRandomTriples) {
  oracle::Random r(17);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = r.integer(1, 30);
    const Index c = r.integer(1, 6);
    const LabelMatrix obs(r.partial_labels(n, c), LabelKind::partial);
    Matrix v = r.tied_scores(n, c);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < c; ++j) {
        if (obs.positive(i, j)) {
          v(i, j) = 1.0;
        }
      }
    }
    std::vector<Index> k(static_cast<std::size_t>(c));
    for (auto& kc : k) {
      kc = r.integer(0, n);
    }
    const auto d = SoftLabelMatrix::from_values(v, obs.values());
    const auto out = generate_pseudo_labels(d, priors(k, n), obs);
    for (Index j = 0; j < c; ++j) {
      EXPECT_EQ(column_count(out, j), std::max(k[static_cast<std::size_t>(j)], column_count(obs, j)));
      for (Index i = 0; i < n; ++i) {
        if (obs.positive(i, j)) {
          EXPECT_TRUE(out.positive(i, j));
        }
      }
    }
    EXPECT_EQ(out.values(), oracle::pseudo_labels(d.values(), k, obs.values())) << "trial " << trial;
  }
}

TEST(Generate, RaisingAScoreNeverEvicts) {
  oracle::Random r(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = r.integer(2, 20);
    const LabelMatrix obs(r.partial_labels(n, 2), LabelKind::partial);
    Matrix v = r.tied_scores(n, 2);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < 2; ++j) {
        if (obs.positive(i, j)) {
          v(i, j) = 1.0;
        }
      }
    }
    const auto p = priors({r.integer(0, n), r.integer(0, n)}, n);
    const auto before = generate_pseudo_labels(SoftLabelMatrix::from_values(v, obs.values()), p, obs);
    for (Index i = 0; i < n; ++i) {
      if (obs.positive(i, 0) || !before.positive(i, 0)) {
        continue;
      }
      Matrix w = v;
      w(i, 0) = std::min(0.999, w(i, 0) + r.uniform(0.0, 0.5));
      const auto after = generate_pseudo_labels(SoftLabelMatrix::from_values(w, obs.values()), p, obs);
      EXPECT_TRUE(after.positive(i, 0));
    }
  }
}

TEST(Generate, ShapeMismatchThrows) {
  const auto obs = make({{1, 0}, {0, 1}}, LabelKind::partial);
  Matrix v(2, 2);
  v << 1.0, 0.3, 0.4, 1.0;
  EXPECT_THROW(generate_pseudo_labels(SoftLabelMatrix::from_values(v, obs.values()), priors({1}, 2), obs),
               ShapeError);
}

TEST(SinglePseudo, IsTheObservedMatrix) {
  const auto obs = make({{0, 1}, {1, 0}}, LabelKind::partial);
  const auto out = single_label_pseudo(obs);
  EXPECT_EQ(out.values(), obs.values());
  EXPECT_EQ(out.kind(), LabelKind::pseudo);
}

TEST(Unreliability, Examples) {
  const auto truth = make({{1, 1}, {1, 1}}, LabelKind::pseudo);
  EXPECT_EQ(unreliability(truth, truth), 0.0);
  EXPECT_EQ(unreliability(make({{1, 0}, {1, 1}}, LabelKind::pseudo), truth), 0.5);
  const auto t2 = make({{1, 0, 1}, {0, 1, 0}}, LabelKind::pseudo);
  const auto comp = make({{0, 1, 0}, {1, 0, 1}}, LabelKind::pseudo);
  EXPECT_EQ(unreliability(comp, t2), 1.0);
}

TEST(Unreliability, BoundsAndSymmetry) {
  oracle::Random r(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = r.integer(1, 15);
    const Index c = r.integer(1, 5);
    const LabelMatrix a(r.full_labels(n, c), LabelKind::pseudo);
    const LabelMatrix b(r.full_labels(n, c), LabelKind::pseudo);
    const double x = unreliability(a, b);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    EXPECT_EQ(x, unreliability(b, a));
    EXPECT_EQ(unreliability(a, a), 0.0);
  }
}
