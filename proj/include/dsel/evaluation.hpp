#pragma once

// Scoring of held-out test groups, Top-N selection, precision/recall/F1,
// precision-recall curves and the feature-family comparison harness.

#include <string>
#include <vector>

#include "dsel/classifier.hpp"
#include "dsel/dataset.hpp"

namespace dsel {

struct RankedCandidate {
  std::string mid;
  double score = 0.0;   // predict_proba
  double margin = 0.0;  // pre-sigmoid score; orders candidates whose probabilities saturate
};

struct GroupPrediction {
  std::size_t group_id = 0;
  std::string collection;
  std::vector<RankedCandidate> ranked;  // score descending, ties by mid ascending
  std::string gold_mid;
};

/// Sorts by margin descending (equivalently score), ties by mid ascending.
void rank_candidates(std::vector<RankedCandidate>& candidates);

/// Throws Error(data) when the model's vocabulary hash differs from the dataset's.
std::vector<GroupPrediction> score_groups(const Model& model, const Dataset& dataset);
std::vector<GroupPrediction> score_groups(const Model& model, std::span<const Collection> collections);

struct Selection {
  std::size_t group_id = 0;
  std::string collection;
  std::vector<std::string> mids;  // top min(n, |candidates|) in rank order
  std::string gold_mid;
};

std::vector<Selection> top_n(std::span<const GroupPrediction> predictions, std::size_t n);

enum class MetricMode { micro, literal };
std::string metric_mode_name(MetricMode mode);
MetricMode parse_metric_mode(std::string_view text);

struct CollectionCounts {
  std::string name;
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

struct CurvePoint {
  double threshold = 0.0;  // score threshold, or N in the n-sweep
  double precision = 0.0;
  double recall = 0.0;
  bool empty = false;      // nothing predicted; precision reported as 0
};

struct EvalReport {
  std::size_t n = 1;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  MetricMode mode = MetricMode::micro;
  bool no_selections = false;
  std::vector<CollectionCounts> per_collection;  // in first-seen order
  std::vector<CurvePoint> curve;
};

/// 2PR/(P+R), or 0 when P+R = 0.
double f1_score(double precision, double recall);

/// micro:   P = sum correct / sum selected, R = sum correct / number of groups.
/// literal: with C_ij the top-j selections of collection i (all its groups),
///          G_i its gold links and |C| the number of collections,
///          P = sum_i sum_j |C_ij & G_i| / |C_ij|, R = sum_i sum_j |C_ij & G_i| / |C|,
///          j = 1..n. Not normalized; values can exceed 1.
EvalReport metrics(std::span<const Selection> selections, MetricMode mode = MetricMode::micro);

/// Mean over collections of the per-collection micro F1.
double macro_collection_f1(const EvalReport& report);

/// Distinct top-1 scores, descending, preceded by 1.0 (nothing predicted).
std::vector<double> default_thresholds(std::span<const GroupPrediction> predictions);

/// A group's top candidate counts as predicted iff its score >= threshold.
/// Thresholds are processed in descending order.
std::vector<CurvePoint> pr_curve(std::span<const GroupPrediction> predictions, std::vector<double> thresholds);
/// Micro P/R of Top-n for n = 1..max_n.
std::vector<CurvePoint> pr_curve_by_n(std::span<const GroupPrediction> predictions, std::size_t max_n);

std::string format_curve_csv(std::span<const CurvePoint> curve);
std::string format_report_json(const EvalReport& report);

// --- feature comparison ---

std::vector<FeatureConfig> all_feature_configs();

struct CompareOptions {
  BuildOptions build;
  std::vector<FeatureConfig> configs = all_feature_configs();
  bool cross_validate = true;
  std::vector<Hyperparams> grid = default_grid();
  Hyperparams fixed;  // used when cross_validate is false
  std::size_t folds = 5;
  std::size_t top_n = 1;
};

struct ComparisonRow {
  FeatureConfig config;
  double avg_f1 = 0.0;    // mean per-collection F1 at Top-N
  double micro_f1 = 0.0;
  Hyperparams chosen;
  EvalReport report;      // micro, with a threshold-sweep curve
};

/// Runs build -> (CV) -> train -> score -> evaluate for every config over one
/// shared split, so all configs see identical train/test mentions.
std::vector<ComparisonRow> compare_features(const Repository& repo, const Corpus& corpus,
                                            const CompareOptions& options);

/// CSV `feature,k,avg_f1`.
std::string format_comparison_csv(std::span<const ComparisonRow> rows);

}  // namespace dsel
