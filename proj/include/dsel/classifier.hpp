#pragma once

// L2-regularized binary logistic regression over sparse binary features.
//
//   f(w, b) = 1/2 |w|^2 + c * sum_i log(1 + exp(-y_i (w . x_i + b))),  y_i in {-1, +1}
//
// The bias b is stored at weights[0] and is not regularized.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsel/dataset.hpp"
#include "dsel/features.hpp"

namespace dsel {

struct Hyperparams {
  double c = 1.0;
  int max_epochs = 200;
  double tolerance = 1e-6;  // converged after 3 epochs in a row with relative change below this
  double eta0 = 0.1;
  double decay = 1.0;       // see step_size
  std::uint64_t seed = 1;
  bool full_batch = false;  // gradient descent with adaptive backtracking instead of SGD; ignores decay and seed

  bool operator==(const Hyperparams&) const = default;
};

/// SGD learning rate for epoch t (0-based): eta0 / (1 + decay * eta0 * t).
/// The regularizer gives the objective curvature 1, so decay = 1 is the
/// classic 1/(curvature * t) schedule once t is large.
double step_size(const Hyperparams& params, int epoch);

/// Throws Error(usage) on c <= 0, tolerance <= 0, max_epochs < 1, eta0 <= 0 or decay < 0.
void validate(const Hyperparams& params);

/// c in {0.01, 0.1, 1, 10} x eta0 in {0.1, 0.01}, decay 1.
std::vector<Hyperparams> default_grid(std::uint64_t seed = 1);

struct Model {
  std::vector<double> weights;  // [0] = bias, [id] for feature ids 1..vocab_size
  std::size_t vocab_size = 0;
  FeatureConfig config;
  Pairing pairing = Pairing::conjoined;
  std::string vocab_hash;

  double bias() const { return weights.front(); }
  bool operator==(const Model&) const = default;
};

Model zero_model(std::size_t vocab_size);

/// Numerically stable logistic function, clamped to the open interval (0, 1).
double sigmoid(double z);
/// log(1 + exp(-z)) without overflow.
double log1p_exp_neg(double z);

/// bias + sum of weights; ids beyond vocab_size are ignored.
double margin(const Model& model, std::span<const std::uint32_t> ids);
double predict_proba(const Model& model, std::span<const std::uint32_t> ids);

// Parallel kernels. Examples are reduced in fixed-size blocks whose partial
// results are combined in block order, so results do not depend on the
// number of threads.
double objective(const Model& model, std::span<const Example> examples, double c);
std::vector<double> gradient(const Model& model, std::span<const Example> examples, double c);

/// Single-threaded reference versions of the kernels above.
namespace reference {
double objective(const Model& model, std::span<const Example> examples, double c);
std::vector<double> gradient(const Model& model, std::span<const Example> examples, double c);
}  // namespace reference

struct TrainLog {
  std::vector<double> objective;  // [0] = initial (zero model), [t] = after epoch t
  bool converged = false;
};

struct TrainResult {
  Model model;
  TrainLog log;
};

/// Seeded epoch-wise SGD (or full-batch descent). Throws Error(data) on
/// single-class input ("degenerate labels") or divergence.
TrainResult train(std::span<const Example> examples, const Hyperparams& params, std::size_t vocab_size);

/// CSV `epoch,objective`.
std::string format_train_log(const TrainLog& log);

// --- cross-validation ---

struct CvRow {
  Hyperparams params;
  double mean_f1 = 0.0;
  std::vector<double> fold_f1;
  std::size_t flagged_folds = 0;  // single-class fold or failed training
};

struct CvResult {
  Hyperparams best;
  std::vector<CvRow> table;
};

/// Fold index per example, stratified by label.
std::vector<std::size_t> assign_folds(std::span<const Example> examples, std::size_t folds, std::uint64_t seed);

/// Binary F1 of the positive class; 0/0 := 0.
double binary_f1(std::size_t tp, std::size_t fp, std::size_t fn);

/// Best = highest mean fold F1 at threshold 0.5; ties go to smaller c, then grid order.
CvResult cross_validate(std::span<const Example> examples, std::span<const Hyperparams> grid,
                        std::size_t vocab_size, std::size_t folds = 5, std::uint64_t seed = 1);

/// CSV `c,eta0,decay,mean_f1,flagged_folds`.
std::string format_cv_table(const CvResult& result);

// --- model files ---

std::string format_model(const Model& model);
Model parse_model(std::string_view text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

/// Throws Error(data) when the model was trained against a different vocabulary.
void check_compatible(const Model& model, const Vocabulary& vocab);

}  // namespace dsel
