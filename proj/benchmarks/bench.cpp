#include <benchmark/benchmark.h>

#include <random>

#include "lepl/label_enhancement.hpp"
#include "lepl/label_graph.hpp"
#include "lepl/metrics.hpp"
#include "lepl/pseudo_labeling.hpp"
#include "lepl/trainer.hpp"

using namespace lepl;

namespace {

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = n(rng);
    }
  }
  return m;
}

BinaryMatrix sparse_labels(Index rows, Index cols, std::uint64_t seed, bool extra = true) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, cols - 1);
  BinaryMatrix y = BinaryMatrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    y(i, pick(rng)) = 1;
    if (extra && i % 3 == 0) {
      y(i, pick(rng)) = 1;
    }
  }
  return y;
}

void BM_LeLossAndGrad(benchmark::State& state) {
  const Index n = state.range(0);
  const Index c = 10;
  const auto nbr = build_knn(FeatureMatrix(gaussian(n, 16, 1)), 10);
  const BinaryMatrix partial = BinaryMatrix::Zero(n, c);
  const SoftLabelMatrix d(gaussian(n, c, 2), partial);
  Matrix scratch;
  for (auto _ : state) {
    benchmark::DoNotOptimize(le_loss_and_grad(d, nbr, 0.5, scratch));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_LeLossAndGrad)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Complexity();

void BM_Knn(benchmark::State& state) {
  const FeatureMatrix x(gaussian(state.range(0), 16, 3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_knn(x, 10));
  }
}
BENCHMARK(BM_Knn)->Arg(500)->Arg(2000);

void BM_Metrics(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix s = gaussian(n, 10, 4);
  const LabelMatrix y(sparse_labels(n, 10, 5), LabelKind::full);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(s, y));
  }
}
BENCHMARK(BM_Metrics)->Arg(500)->Arg(5000);

void BM_GcnObjective(benchmark::State& state) {
  const Index n = state.range(0);
  const Index c = 10;
  const Index d = 16;
  const FeatureMatrix x(gaussian(n, d, 6));
  const LabelMatrix y(sparse_labels(n, c, 7), LabelKind::pseudo);
  const auto graph = normalize(cooccurrence(LabelMatrix(sparse_labels(500, c, 8), LabelKind::full)));
  const auto e = random_embeddings(c, 16, 9);
  const auto p = init_gcn_parameters(16, 16, d, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gcn_objective(x, y, graph, e, p.w0(), p.w1()));
  }
}
BENCHMARK(BM_GcnObjective)->Arg(500)->Arg(2000);

void BM_PseudoLabels(benchmark::State& state) {
  const Index n = state.range(0);
  const Index c = 10;
  const LabelMatrix observed(sparse_labels(n, c, 11, false), LabelKind::partial);
  const SoftLabelMatrix d(gaussian(n, c, 12), observed.values());
  const auto priors = estimate_priors(LabelMatrix(sparse_labels(500, c, 13), LabelKind::full), n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_pseudo_labels(d, priors, observed));
  }
}
BENCHMARK(BM_PseudoLabels)->Arg(2000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
