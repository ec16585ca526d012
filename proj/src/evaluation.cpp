#include "dsel/evaluation.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <set>

namespace dsel {

void rank_candidates(std::vector<RankedCandidate>& candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.margin != b.margin) return a.margin > b.margin;
    return a.mid < b.mid;
  });
}

std::vector<GroupPrediction> score_groups(const Model& model, std::span<const Collection> collections) {
  std::vector<std::pair<const Collection*, const TestGroup*>> groups;
  for (const auto& col : collections)
    for (const auto& g : col.test) groups.emplace_back(&col, &g);
  std::vector<GroupPrediction> out(groups.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(groups.size()); ++i) {
    const auto& [col, g] = groups[static_cast<std::size_t>(i)];
    auto& p = out[static_cast<std::size_t>(i)];
    p.group_id = g->group_id;
    p.collection = col->name;
    p.gold_mid = g->gold_mid;
    for (const auto& s : g->candidates) {
      const auto ids = s.features();
      const double m = margin(model, ids);
      p.ranked.push_back(RankedCandidate{s.candidate_mid, sigmoid(m), m});
    }
    rank_candidates(p.ranked);
  }
  return out;
}

std::vector<GroupPrediction> score_groups(const Model& model, const Dataset& dataset) {
  check_compatible(model, dataset.vocab);
  return score_groups(model, std::span<const Collection>(dataset.collections));
}

std::vector<Selection> top_n(std::span<const GroupPrediction> predictions, std::size_t n) {
  if (n < 1) fail(ErrorKind::usage, "top-n requires n >= 1");
  std::vector<Selection> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) {
    Selection s{p.group_id, p.collection, {}, p.gold_mid};
    for (std::size_t i = 0; i < std::min(n, p.ranked.size()); ++i) s.mids.push_back(p.ranked[i].mid);
    out.push_back(std::move(s));
  }
  return out;
}

std::string metric_mode_name(MetricMode mode) { return mode == MetricMode::micro ? "micro" : "literal"; }

MetricMode parse_metric_mode(std::string_view text) {
  if (text == "micro") return MetricMode::micro;
  if (text == "literal") return MetricMode::literal;
  fail(ErrorKind::usage, "unknown metric mode '" + std::string(text) + "' (expected micro or literal)");
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

namespace {

bool contains(const std::vector<std::string>& mids, const std::string& mid, std::size_t prefix) {
  const auto end = mids.begin() + static_cast<std::ptrdiff_t>(std::min(prefix, mids.size()));
  return std::find(mids.begin(), end, mid) != end;
}

}  // namespace

EvalReport metrics(std::span<const Selection> selections, MetricMode mode) {
  EvalReport report;
  report.mode = mode;
  report.n = 0;
  for (const auto& s : selections) report.n = std::max(report.n, s.mids.size());

  std::map<std::string, std::size_t> slot;
  std::size_t correct = 0, selected = 0;
  for (const auto& s : selections) {
    auto [it, fresh] = slot.emplace(s.collection, report.per_collection.size());
    if (fresh) report.per_collection.push_back(CollectionCounts{s.collection, 0, 0, 0});
    auto& cc = report.per_collection[it->second];
    const bool hit = contains(s.mids, s.gold_mid, s.mids.size());
    cc.correct += hit;
    cc.predicted += s.mids.size();
    cc.gold += 1;
    correct += hit;
    selected += s.mids.size();
  }
  report.no_selections = selected == 0;

  if (mode == MetricMode::micro) {
    report.precision = selected ? static_cast<double>(correct) / static_cast<double>(selected) : 0.0;
    report.recall = selections.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(selections.size());
  } else {
    // per collection, per j: hits and |C_ij|
    std::vector<std::vector<std::size_t>> hits(report.per_collection.size(), std::vector<std::size_t>(report.n, 0));
    auto sizes = hits;
    for (const auto& s : selections) {
      const auto i = slot.at(s.collection);
      for (std::size_t j = 1; j <= report.n; ++j) {
        hits[i][j - 1] += contains(s.mids, s.gold_mid, j);
        sizes[i][j - 1] += std::min(j, s.mids.size());
      }
    }
    const auto n_collections = static_cast<double>(report.per_collection.size());
    for (std::size_t i = 0; i < hits.size(); ++i)
      for (std::size_t j = 0; j < report.n; ++j) {
        if (sizes[i][j]) report.precision += static_cast<double>(hits[i][j]) / static_cast<double>(sizes[i][j]);
        report.recall += static_cast<double>(hits[i][j]) / n_collections;
      }
  }
  report.f1 = f1_score(report.precision, report.recall);
  return report;
}

double macro_collection_f1(const EvalReport& report) {
  if (report.per_collection.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& cc : report.per_collection) {
    const double p = cc.predicted ? static_cast<double>(cc.correct) / static_cast<double>(cc.predicted) : 0.0;
    const double r = cc.gold ? static_cast<double>(cc.correct) / static_cast<double>(cc.gold) : 0.0;
    sum += f1_score(p, r);
  }
  return sum / static_cast<double>(report.per_collection.size());
}

std::vector<double> default_thresholds(std::span<const GroupPrediction> predictions) {
  std::set<double, std::greater<>> scores;
  for (const auto& p : predictions)
    if (!p.ranked.empty()) scores.insert(p.ranked.front().score);
  std::vector<double> out{1.0};
  for (double s : scores)
    if (s < 1.0) out.push_back(s);
  return out;
}

std::vector<CurvePoint> pr_curve(std::span<const GroupPrediction> predictions, std::vector<double> thresholds) {
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  std::vector<CurvePoint> curve;
  const auto total = static_cast<double>(predictions.size());
  for (double t : thresholds) {
    std::size_t predicted = 0, correct = 0;
    for (const auto& p : predictions) {
      if (p.ranked.empty() || p.ranked.front().score < t) continue;
      ++predicted;
      correct += p.ranked.front().mid == p.gold_mid;
    }
    CurvePoint pt;
    pt.threshold = t;
    pt.empty = predicted == 0;
    pt.precision = predicted ? static_cast<double>(correct) / static_cast<double>(predicted) : 0.0;
    pt.recall = total > 0 ? static_cast<double>(correct) / total : 0.0;
    curve.push_back(pt);
  }
  return curve;
}

std::vector<CurvePoint> pr_curve_by_n(std::span<const GroupPrediction> predictions, std::size_t max_n) {
  std::vector<CurvePoint> curve;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto report = metrics(top_n(predictions, n), MetricMode::micro);
    curve.push_back(CurvePoint{static_cast<double>(n), report.precision, report.recall, report.no_selections});
  }
  return curve;
}

std::string format_curve_csv(std::span<const CurvePoint> curve) {
  std::string out = "threshold,precision,recall\n";
  for (const auto& pt : curve)
    out += format_double(pt.threshold) + "," + format_double(pt.precision) + "," + format_double(pt.recall) + "\n";
  return out;
}

std::string format_report_json(const EvalReport& report) {
  using json = nlohmann::json;
  json per = json::array();
  for (const auto& cc : report.per_collection)
    per.push_back({{"name", cc.name}, {"correct", cc.correct}, {"predicted", cc.predicted}, {"gold", cc.gold}});
  json j = {{"n", report.n},
            {"mode", metric_mode_name(report.mode)},
            {"precision", report.precision},
            {"recall", report.recall},
            {"f1", report.f1},
            {"macro_collection_f1", macro_collection_f1(report)},
            {"no_selections", report.no_selections},
            {"per_collection", std::move(per)}};
  return j.dump(1) + "\n";
}

std::vector<FeatureConfig> all_feature_configs() {
  std::vector<FeatureConfig> out;
  for (auto family : all_families)
    for (int k = 1; k <= 3; ++k) out.push_back(FeatureConfig{family, k, false});
  return out;
}

std::vector<ComparisonRow> compare_features(const Repository& repo, const Corpus& corpus,
                                            const CompareOptions& options) {
  const auto alignment = align(repo, corpus, options.build.case_policy);
  const auto plan = plan_collections(repo, alignment, options.build);
  if (plan.collections.empty()) fail(ErrorKind::data, "empty dataset: no ambiguous name has two aligned entities");

  std::vector<ComparisonRow> rows(options.configs.size());
  for (std::size_t i = 0; i < options.configs.size(); ++i) {
    auto& row = rows[i];
    row.config = options.configs[i];
    const auto dataset = build_dataset(plan, row.config, options.build);
    const auto examples = training_examples(dataset);
    row.chosen = options.fixed;
    if (options.cross_validate)
      row.chosen = cross_validate(examples, options.grid, dataset.vocab.size(), options.folds, options.build.seed).best;
    auto model = train(examples, row.chosen, dataset.vocab.size()).model;
    model.config = dataset.config;
    model.pairing = dataset.options.pairing;
    model.vocab_hash = dataset.vocab.hash();
    const auto predictions = score_groups(model, dataset);
    row.report = metrics(top_n(predictions, options.top_n), MetricMode::micro);
    row.report.curve = pr_curve(predictions, default_thresholds(predictions));
    row.micro_f1 = row.report.f1;
    row.avg_f1 = macro_collection_f1(row.report);
  }
  return rows;
}

std::string format_comparison_csv(std::span<const ComparisonRow> rows) {
  std::string out = "feature,k,avg_f1\n";
  for (const auto& r : rows)
    out += family_display_name(r.config.family) + "," + std::to_string(r.config.k) + "," +
           format_double(r.avg_f1) + "\n";
  return out;
}

}  // namespace dsel
