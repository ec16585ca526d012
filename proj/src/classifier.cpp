#include "dsel/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dsel {

namespace {

constexpr std::size_t block_size = 256;
// Scatter buffers used by gradient(); fixed so the summation order is too.
constexpr std::size_t scatter_lanes = 8;

double y_of(int label) { return label ? 1.0 : -1.0; }

double half_sq_norm(const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t j = 1; j < w.size(); ++j) s += w[j] * w[j];
  return 0.5 * s;
}

void check_labels(std::span<const Example> examples) {
  bool pos = false, neg = false;
  for (const auto& e : examples) (e.label ? pos : neg) = true;
  if (!pos || !neg) fail(ErrorKind::data, "degenerate labels: training data needs both classes");
}

}  // namespace

void validate(const Hyperparams& p) {
  if (!(p.c > 0.0)) fail(ErrorKind::usage, "c must be positive");
  if (!(p.tolerance > 0.0)) fail(ErrorKind::usage, "tolerance must be positive");
  if (p.max_epochs < 1) fail(ErrorKind::usage, "max_epochs must be at least 1");
  if (!(p.eta0 > 0.0)) fail(ErrorKind::usage, "eta0 must be positive");
  if (!(p.decay >= 0.0)) fail(ErrorKind::usage, "decay must be non-negative");
}

std::vector<Hyperparams> default_grid(std::uint64_t seed) {
  std::vector<Hyperparams> grid;
  for (double c : {0.01, 0.1, 1.0, 10.0})
    for (double eta0 : {0.1, 0.01}) {
      Hyperparams h;
      h.c = c;
      h.eta0 = eta0;
      h.seed = seed;
      grid.push_back(h);
    }
  return grid;
}

Model zero_model(std::size_t vocab_size) {
  Model m;
  m.weights.assign(vocab_size + 1, 0.0);
  m.vocab_size = vocab_size;
  return m;
}

double sigmoid(double z) {
  static constexpr double lo = std::numeric_limits<double>::denorm_min();
  static const double hi = std::nextafter(1.0, 0.0);
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, lo, hi);
}

double log1p_exp_neg(double z) {
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double margin(const Model& model, std::span<const std::uint32_t> ids) {
  double m = model.weights[0];
  for (auto id : ids)
    if (id <= model.vocab_size) m += model.weights[id];
  return m;
}

double predict_proba(const Model& model, std::span<const std::uint32_t> ids) {
  return sigmoid(margin(model, ids));
}

double objective(const Model& model, std::span<const Example> examples, double c) {
  const std::size_t blocks = (examples.size() + block_size - 1) / block_size;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < static_cast<long>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * block_size;
    const std::size_t hi = std::min(lo + block_size, examples.size());
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      s += log1p_exp_neg(y_of(examples[i].label) * margin(model, examples[i].features));
    partial[static_cast<std::size_t>(b)] = s;
  }
  const double loss = std::accumulate(partial.begin(), partial.end(), 0.0);
  const double f = half_sq_norm(model.weights) + c * loss;
  if (!std::isfinite(f)) fail(ErrorKind::data, "objective is not finite (training diverged)");
  return f;
}

std::vector<double> gradient(const Model& model, std::span<const Example> examples, double c) {
  const std::size_t n = examples.size();
  const std::size_t dim = model.weights.size();
  std::vector<double> coef(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    const auto& e = examples[static_cast<std::size_t>(i)];
    const double y = y_of(e.label);
    // d/dm log(1+exp(-y m)) = -y * sigmoid(-y m)
    coef[static_cast<std::size_t>(i)] = -c * y * (1.0 - sigmoid(y * margin(model, e.features)));
  }

  const std::size_t per_lane = (n + scatter_lanes - 1) / scatter_lanes;
  std::vector<std::vector<double>> lanes(scatter_lanes);
#pragma omp parallel for schedule(static)
  for (long l = 0; l < static_cast<long>(scatter_lanes); ++l) {
    auto& acc = lanes[static_cast<std::size_t>(l)];
    const std::size_t lo = static_cast<std::size_t>(l) * per_lane;
    const std::size_t hi = std::min(lo + per_lane, n);
    if (lo >= hi) continue;
    acc.assign(dim, 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
      acc[0] += coef[i];
      for (auto id : examples[i].features)
        if (id < dim) acc[id] += coef[i];
    }
  }

  std::vector<double> g(dim, 0.0);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < static_cast<long>(dim); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    double s = jj == 0 ? 0.0 : model.weights[jj];
    for (const auto& acc : lanes)
      if (!acc.empty()) s += acc[jj];
    g[jj] = s;
  }
  return g;
}

double step_size(const Hyperparams& p, int epoch) {
  return p.eta0 / (1.0 + p.decay * p.eta0 * static_cast<double>(epoch));
}

namespace {

TrainResult train_sgd(std::span<const Example> examples, const Hyperparams& p, std::size_t vocab_size) {
  TrainResult out{zero_model(vocab_size), {}};
  auto& w = out.model.weights;
  const std::size_t n = examples.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  // w[1..] = scale * v[1..]; the bias lives unscaled in v[0].
  std::vector<double> v(w.size(), 0.0);
  double scale = 1.0;
  auto fold_scale = [&] {
    for (std::size_t j = 1; j < v.size(); ++j) v[j] *= scale;
    scale = 1.0;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(p.seed);

  double prev = objective(out.model, examples, p.c);
  out.log.objective.push_back(prev);
  const double initial = prev;
  int rising = 0;
  int quiet = 0;

  for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
    const double eta = step_size(p, epoch);
    const double shrink = 1.0 - eta * inv_n;
    if (!(shrink > 0.0)) fail(ErrorKind::usage, "learning rate too large for the sample count; lower eta0");
    rng.shuffle(order);
    for (auto i : order) {
      const auto& e = examples[i];
      double m = v[0];
      double dot = 0.0;
      for (auto id : e.features)
        if (id <= vocab_size) dot += v[id];
      m += scale * dot;
      const double y = y_of(e.label);
      const double g = -p.c * y * (1.0 - sigmoid(y * m));
      scale *= shrink;
      const double step = eta * g / scale;
      for (auto id : e.features)
        if (id <= vocab_size) v[id] -= step;
      v[0] -= eta * g;
      if (scale < 1e-9) fold_scale();
    }
    fold_scale();
    w = v;
    const double cur = objective(out.model, examples, p.c);
    out.log.objective.push_back(cur);

    rising = cur > prev ? rising + 1 : 0;
    if (rising >= 3 && cur > 2.0 * initial)
      fail(ErrorKind::data, "training diverged (objective rose for 3 epochs); try a smaller eta0");
    // single quiet epochs happen by chance under SGD noise
    const double change = std::abs(prev - cur) / std::max(std::abs(prev), 1e-300);
    quiet = change < p.tolerance ? quiet + 1 : 0;
    prev = cur;
    if (quiet >= 3) {
      out.log.converged = true;
      break;
    }
  }
  return out;
}

TrainResult train_full_batch(std::span<const Example> examples, const Hyperparams& p, std::size_t vocab_size) {
  TrainResult out{zero_model(vocab_size), {}};
  auto& model = out.model;
  double f = objective(model, examples, p.c);
  out.log.objective.push_back(f);

  // the step starts at eta0 and adapts: doubled after each accepted epoch,
  // halved by backtracking until the Armijo condition holds
  double step = p.eta0;
  int quiet = 0;
  for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
    const auto g = gradient(model, examples, p.c);
    double g2 = 0.0;
    for (double x : g) g2 += x * x;
    if (g2 == 0.0) {
      out.log.converged = true;
      break;
    }
    double eta = step;
    Model trial = model;
    double f_trial = f;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, eta *= 0.5) {
      for (std::size_t j = 0; j < g.size(); ++j) trial.weights[j] = model.weights[j] - eta * g[j];
      f_trial = objective(trial, examples, p.c);
      if (f_trial <= f - 1e-4 * eta * g2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.log.converged = true;
      break;
    }
    step = 2.0 * eta;
    const double decrease = (f - f_trial) / std::max(std::abs(f), 1e-300);
    model = std::move(trial);
    f = f_trial;
    out.log.objective.push_back(f);
    quiet = decrease < p.tolerance ? quiet + 1 : 0;
    if (quiet >= 3) {
      out.log.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

TrainResult train(std::span<const Example> examples, const Hyperparams& params, std::size_t vocab_size) {
  validate(params);
  check_labels(examples);
  return params.full_batch ? train_full_batch(examples, params, vocab_size)
                           : train_sgd(examples, params, vocab_size);
}

std::string format_train_log(const TrainLog& log) {
  std::string out = "epoch,objective\n";
  for (std::size_t t = 0; t < log.objective.size(); ++t)
    out += std::to_string(t) + "," + format_double(log.objective[t]) + "\n";
  return out;
}

}  // namespace dsel
