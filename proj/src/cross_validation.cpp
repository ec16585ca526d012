#include <algorithm>
#include <numeric>

#include "dsel/classifier.hpp"

namespace dsel {

std::vector<std::size_t> assign_folds(std::span<const Example> examples, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) fail(ErrorKind::usage, "cross-validation needs at least 2 folds");
  std::vector<std::size_t> fold(examples.size(), 0);
  Rng rng(derive_seed(seed, "folds"));
  for (int label : {1, 0}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < examples.size(); ++i)
      if (examples[i].label == label) idx.push_back(i);
    rng.shuffle(idx);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) fold[idx[pos]] = pos % folds;
  }
  return fold;
}

double binary_f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  const double r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

CvResult cross_validate(std::span<const Example> examples, std::span<const Hyperparams> grid,
                        std::size_t vocab_size, std::size_t folds, std::uint64_t seed) {
  if (grid.empty()) fail(ErrorKind::usage, "empty hyperparameter grid");
  if (folds < 2) fail(ErrorKind::usage, "cross-validation needs at least 2 folds");
  if (examples.size() < folds) fail(ErrorKind::data, "fewer samples than folds");
  for (const auto& h : grid) validate(h);

  const auto fold_of = assign_folds(examples, folds, seed);
  std::vector<std::vector<Example>> train_part(folds), held_out(folds);
  for (std::size_t i = 0; i < examples.size(); ++i)
    for (std::size_t f = 0; f < folds; ++f) (fold_of[i] == f ? held_out : train_part)[f].push_back(examples[i]);

  const std::size_t jobs = grid.size() * folds;
  std::vector<double> f1(jobs, 0.0);
  std::vector<char> flagged(jobs, 0);

#pragma omp parallel for schedule(dynamic, 1)
  for (long job = 0; job < static_cast<long>(jobs); ++job) {
    const auto cand = static_cast<std::size_t>(job) / folds;
    const auto f = static_cast<std::size_t>(job) % folds;
    const auto& test = held_out[f];
    bool pos = false, neg = false;
    for (const auto& e : test) (e.label ? pos : neg) = true;
    if (!pos || !neg) flagged[static_cast<std::size_t>(job)] = 1;
    try {
      const auto model = train(train_part[f], grid[cand], vocab_size).model;
      std::size_t tp = 0, fp = 0, fn = 0;
      for (const auto& e : test) {
        const bool predicted = predict_proba(model, e.features) >= 0.5;
        if (predicted && e.label) ++tp;
        else if (predicted) ++fp;
        else if (e.label) ++fn;
      }
      f1[static_cast<std::size_t>(job)] = binary_f1(tp, fp, fn);
    } catch (const Error&) {
      // degenerate training fold or divergence: the candidate scores 0 here
      flagged[static_cast<std::size_t>(job)] = 1;
      f1[static_cast<std::size_t>(job)] = 0.0;
    }
  }

  CvResult result;
  for (std::size_t cand = 0; cand < grid.size(); ++cand) {
    CvRow row;
    row.params = grid[cand];
    for (std::size_t f = 0; f < folds; ++f) {
      row.fold_f1.push_back(f1[cand * folds + f]);
      row.flagged_folds += flagged[cand * folds + f];
    }
    row.mean_f1 = std::accumulate(row.fold_f1.begin(), row.fold_f1.end(), 0.0) / static_cast<double>(folds);
    result.table.push_back(std::move(row));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    const auto& a = result.table[i];
    const auto& b = result.table[best];
    if (a.mean_f1 > b.mean_f1 || (a.mean_f1 == b.mean_f1 && a.params.c < b.params.c)) best = i;
  }
  result.best = result.table[best].params;
  return result;
}

std::string format_cv_table(const CvResult& result) {
  std::string out = "c,eta0,decay,mean_f1,flagged_folds\n";
  for (const auto& row : result.table)
    out += format_double(row.params.c) + "," + format_double(row.params.eta0) + "," +
           format_double(row.params.decay) + "," + format_double(row.mean_f1) + "," +
           std::to_string(row.flagged_folds) + "\n";
  return out;
}

}  // namespace dsel
