// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <map>

#ifdef DSEL_HAVE_OPENMP
#include <omp.h>
#endif

#include "dsel/classifier.hpp"
#include "dsel/evaluation.hpp"
#include "dsel/synthetic.hpp"

using namespace dsel;

namespace {

struct Problem {
  std::vector<Example> examples;
  Model model;
};

const Problem& problem(std::size_t n) {
  static std::map<std::size_t, Problem> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  constexpr std::uint32_t features = 20000;
  Rng rng(1);
  Problem p;
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    for (int j = 0; j < 12; ++j) e.features.push_back(1 + static_cast<std::uint32_t>(rng.below(features)));
    std::sort(e.features.begin(), e.features.end());
    e.features.erase(std::unique(e.features.begin(), e.features.end()), e.features.end());
    e.label = static_cast<int>(rng.below(2));
    p.examples.push_back(std::move(e));
  }
  p.model = zero_model(features);
  for (auto& w : p.model.weights) w = rng.unit() - 0.5;
  return cache.emplace(n, std::move(p)).first->second;
}

void BM_objective_reference(benchmark::State& state) {
  const auto& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::objective(p.model, p.examples, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_objective_parallel(benchmark::State& state) {
  const auto& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(objective(p.model, p.examples, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_gradient_reference(benchmark::State& state) {
  const auto& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::gradient(p.model, p.examples, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_gradient_parallel(benchmark::State& state) {
  const auto& p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gradient(p.model, p.examples, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct Scored {
  Dataset dataset;
  Model model;
};

const Scored& scored() {
  static const Scored s = [] {
    SyntheticSpec spec;
    spec.names = 200;
    auto data = make_synthetic(spec);
    Scored out{build_dataset(data.repo, data.corpus, make_feature_config(FeatureFamily::ws, 1), BuildOptions{}), {}};
    out.model = train(training_examples(out.dataset), Hyperparams{}, out.dataset.vocab.size()).model;
    out.model.vocab_hash = out.dataset.vocab.hash();
    return out;
  }();
  return s;
}

// threads = 1 is the serial baseline
void BM_score_groups(benchmark::State& state) {
  const auto& s = scored();
#ifdef DSEL_HAVE_OPENMP
  const int before = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(0)));
#endif
  for (auto _ : state) benchmark::DoNotOptimize(score_groups(s.model, s.dataset));
#ifdef DSEL_HAVE_OPENMP
  omp_set_num_threads(before);
#endif
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.dataset.stats.test_groups));
}

}  // namespace

BENCHMARK(BM_objective_reference)->Arg(10000)->Arg(100000);
BENCHMARK(BM_objective_parallel)->Arg(10000)->Arg(100000);
BENCHMARK(BM_gradient_reference)->Arg(10000)->Arg(100000);
BENCHMARK(BM_gradient_parallel)->Arg(10000)->Arg(100000);
BENCHMARK(BM_score_groups)->Arg(1)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
