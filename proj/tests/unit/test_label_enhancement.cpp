#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lepl/error.hpp"
#include "lepl/label_enhancement.hpp"
#include "oracles.hpp"

using namespace lepl;

namespace {

struct Instance {
  NeighborIndex nbr;
  SoftLabelMatrix d;
};

Instance random_instance(oracle::Random& r, Index n, Index c, Index k) {
  const FeatureMatrix x(r.normal_matrix(n, 3));
  const LabelMatrix partial(r.partial_labels(n, c), LabelKind::partial);
  Matrix logits = r.normal_matrix(n, c);
  return {build_knn(x, k), SoftLabelMatrix(logits, partial.values())};
}

}  // namespace

TEST(Knn, TwoPointsAreEachOthersNeighbour) {
  Matrix x(2, 2);
  x << 1, 2, -3, 1;
  const auto nbr = build_knn(FeatureMatrix(x), 5);
  EXPECT_EQ(nbr.neighbors(0), std::vector<Index>{1});
  EXPECT_EQ(nbr.neighbors(1), std::vector<Index>{0});
}

TEST(Knn, HandExampleWithTie) {
  Matrix x(3, 2);
  x << 1, 0, 1, 0, 0, 1;
  const auto nbr = build_knn(FeatureMatrix(x), 1);
  EXPECT_EQ(nbr.neighbors(0), std::vector<Index>{1});
  EXPECT_EQ(nbr.neighbors(1), std::vector<Index>{0});
  EXPECT_EQ(nbr.neighbors(2), std::vector<Index>{0});
}

TEST(Knn, ClampsToNMinusOneAndOrdersBySimilarity) {
  oracle::Random r(1);
  const Matrix x = r.normal_matrix(6, 3);
  const auto nbr = build_knn(FeatureMatrix(x), 10);
  EXPECT_EQ(nbr.k(), 10);
  for (Index i = 0; i < 6; ++i) {
    const auto& l = nbr.neighbors(i);
    ASSERT_EQ(l.size(), 5u);
    EXPECT_EQ(std::count(l.begin(), l.end(), i), 0);
    for (std::size_t p = 1; p < l.size(); ++p) {
      const double a = x.row(i).dot(x.row(l[p - 1])) / x.row(l[p - 1]).norm();
      const double b = x.row(i).dot(x.row(l[p])) / x.row(l[p]).norm();
      EXPECT_GE(a, b);
    }
  }
}

TEST(Knn, ZeroRowIsNamed) {
  Matrix x(3, 2);
  x << 1, 0, 0, 0, 0, 1;
  try {
    build_knn(FeatureMatrix(x), 1);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find('1'), std::string::npos) << e.what();
  }
}

TEST(InitSoft, Examples) {
  BinaryMatrix p(1, 3);
  p << 0, 1, 0;
  const auto d = init_soft_labels(LabelMatrix(p, LabelKind::partial), 0.1);
  EXPECT_NEAR(d.values()(0, 0), 0.1, 1e-15);
  EXPECT_EQ(d.values()(0, 1), 1.0);
  EXPECT_NEAR(d.values()(0, 2), 0.1, 1e-15);
  EXPECT_FALSE(d.is_clamped(0, 0));
  EXPECT_TRUE(d.is_clamped(0, 1));

  const auto h = init_soft_labels(LabelMatrix(p, LabelKind::partial), 0.5);
  EXPECT_EQ(h.logits()(0, 0), 0.0);
  EXPECT_EQ(h.logits()(0, 2), 0.0);

  BinaryMatrix all0 = BinaryMatrix::Zero(4, 3);
  all0.col(0).setOnes();
  const auto z = init_soft_labels(LabelMatrix(all0, LabelKind::partial), 0.2);
  EXPECT_TRUE((z.values().col(0).array() == 1.0).all());
  EXPECT_TRUE((z.clamped().col(0).array() == 1).all());
  EXPECT_THROW(init_soft_labels(LabelMatrix(all0, LabelKind::partial), 1.0), std::invalid_argument);
}

TEST(SoftLabels, ClampedEntriesIgnoreLogits) {
  BinaryMatrix m(1, 2);
  m << 1, 0;
  SoftLabelMatrix d(Matrix::Constant(1, 2, -3.0), m);
  EXPECT_EQ(d.values()(0, 0), 1.0);
  d.set_logits(Matrix::Constant(1, 2, 2.0));
  EXPECT_EQ(d.values()(0, 0), 1.0);
  EXPECT_NEAR(d.values()(0, 1), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
}

TEST(LeLoss, TwoInstancesGiveZeroLossAndGradient) {
  oracle::Random r(2);
  for (double tau : {0.1, 0.5, 2.0}) {
    const auto inst = random_instance(r, 2, 3, 1);
    EXPECT_EQ(le_loss(inst.d, inst.nbr, tau), 0.0);
    EXPECT_EQ(le_grad(inst.d, inst.nbr, tau).norm(), 0.0);
  }
}

TEST(LeLoss, NonNegative) {
  oracle::Random r(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = r.integer(2, 12);
    const auto inst = random_instance(r, n, r.integer(1, 5), r.integer(1, n));
    EXPECT_GE(le_loss(inst.d, inst.nbr, r.uniform(0.1, 2.0)), 0.0);
  }
}

TEST(LeLoss, FusedMatchesSeparateCalls) {
  oracle::Random r(4);
  Matrix scratch;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = r.integer(2, 15);
    const auto inst = random_instance(r, n, r.integer(1, 5), r.integer(1, 4));
    const auto both = le_loss_and_grad(inst.d, inst.nbr, 0.5, scratch);
    EXPECT_NEAR(both.loss, le_loss(inst.d, inst.nbr, 0.5), 1e-12);
    EXPECT_LE((both.grad - le_grad(inst.d, inst.nbr, 0.5)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LeGrad, MatchesFiniteDifferences) {
  oracle::Random r(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = r.integer(3, 10);
    const Index c = r.integer(2, 5);
    const double tau = r.uniform(0.2, 1.0);
    const auto inst = random_instance(r, n, c, r.integer(1, n - 2));
    const BinaryMatrix mask = inst.d.clamped();
    const Matrix analytic = le_grad(inst.d, inst.nbr, tau);
    const Matrix fd = oracle::central_difference(
        [&](const Matrix& z) { return le_loss(SoftLabelMatrix(z, mask), inst.nbr, tau); },
        inst.d.logits());
    EXPECT_LE(oracle::relative_error(analytic, fd), 1e-4) << "trial " << trial;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < c; ++j) {
        if (mask(i, j) != 0) {
          EXPECT_EQ(analytic(i, j), 0.0);
        }
      }
    }
  }
}

TEST(LeGrad, IdenticalRowsAreStationary) {
  oracle::Random r(6);
  const Index n = 6;
  const FeatureMatrix x(r.normal_matrix(n, 3));
  Matrix logits(n, 4);
  for (Index i = 0; i < n; ++i) {
    logits.row(i) << 0.3, -1.2, 0.7, 2.0;
  }
  const SoftLabelMatrix d(logits, BinaryMatrix::Zero(n, 4));
  EXPECT_LE(le_grad(d, build_knn(x, 2), 0.5).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LeGrad, PermutationEquivariant) {
  oracle::Random r(7);
  const Index n = 9;
  const Index c = 4;
  const Matrix xv = r.normal_matrix(n, 3);
  const BinaryMatrix pv = r.partial_labels(n, c);
  const Matrix lv = r.normal_matrix(n, c);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), r.rng);
  Matrix xp(n, 3);
  BinaryMatrix pp(n, c);
  Matrix lp(n, c);
  for (Index i = 0; i < n; ++i) {
    const Index s = perm[static_cast<std::size_t>(i)];
    xp.row(i) = xv.row(s);
    pp.row(i) = pv.row(s);
    lp.row(i) = lv.row(s);
  }
  const SoftLabelMatrix d(lv, pv);
  const SoftLabelMatrix dp(lp, pp);
  const auto nbr = build_knn(FeatureMatrix(xv), 3);
  const auto nbrp = build_knn(FeatureMatrix(xp), 3);
  EXPECT_NEAR(le_loss(d, nbr, 0.5), le_loss(dp, nbrp, 0.5), 1e-12);
  const Matrix g = le_grad(d, nbr, 0.5);
  const Matrix gp = le_grad(dp, nbrp, 0.5);
  for (Index i = 0; i < n; ++i) {
    EXPECT_LE((gp.row(i) - g.row(perm[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Enhance, ZeroStepsReturnsInitialisation) {
  oracle::Random r(8);
  const FeatureMatrix x(r.normal_matrix(12, 3));
  const LabelMatrix p(r.partial_labels(12, 4), LabelKind::partial);
  LeConfig cfg;
  cfg.steps = 0;
  const auto out = enhance(x, p, cfg);
  EXPECT_EQ(out.soft.values(), init_soft_labels(p, 0.25).values());
  EXPECT_EQ(out.loss_trace.size(), 1u);
}

TEST(Enhance, TwoInstancesNeverMove) {
  oracle::Random r(9);
  const FeatureMatrix x(r.normal_matrix(2, 3));
  const LabelMatrix p(r.partial_labels(2, 3), LabelKind::partial);
  LeConfig cfg;
  cfg.steps = 25;
  EXPECT_EQ(enhance(x, p, cfg).soft.values(), init_soft_labels(p, cfg.background_for(3)).values());
}

TEST(Enhance, ClampsHoldLossFallsAndRunsAreIdentical) {
  oracle::Random r(10);
  const FeatureMatrix x(r.normal_matrix(40, 5));
  const LabelMatrix p(r.partial_labels(40, 4), LabelKind::partial);
  LeConfig cfg;
  cfg.steps = 30;
  cfg.k = 5;
  cfg.lr = 5.0;
  const auto a = enhance(x, p, cfg);
  const auto b = enhance(x, p, cfg);
  EXPECT_EQ(a.soft.values(), b.soft.values());
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  EXPECT_EQ(a.loss_trace.size(), 31u);
  EXPECT_LT(a.loss_trace.back(), a.loss_trace.front());
  for (Index i = 0; i < 40; ++i) {
    for (Index c = 0; c < 4; ++c) {
      if (p.positive(i, c)) {
        EXPECT_EQ(a.soft.values()(i, c), 1.0);
      }
    }
  }
}

TEST(LeConfig, Validation) {
  LeConfig cfg;
  cfg.tau = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = LeConfig{};
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = LeConfig{};
  EXPECT_DOUBLE_EQ(cfg.background_for(4), 0.25);
}
