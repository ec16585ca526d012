#pragma once

// Weakly labeled dataset construction. Each sample pairs the lexical context
// of one mention with a candidate mid rendered as a feature ("MID:<mid>");
// the label says whether the candidate is the entity whose page the mention
// came from.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsel/features.hpp"
#include "dsel/repo_corpus.hpp"
#include "dsel/util.hpp"

namespace dsel {

/// How the candidate mid enters the feature vector.
///  plain:     context items + MID item only.
///  conjoined: additionally one "MID:<mid>|<item>" feature per context item,
///             so that a linear scorer can weigh context per candidate.
enum class Pairing { plain, conjoined };

std::string pairing_name(Pairing pairing);
Pairing parse_pairing(std::string_view text);

std::string mid_item(std::string_view mid);
std::string pair_item(std::string_view mid, std::string_view item);
bool is_mid_item(std::string_view item);
bool is_pair_item(std::string_view item);
/// Mid encoded in a MID or pair item; empty for lexical items.
std::string mid_of_item(std::string_view item);

struct Provenance {
  std::string name;
  std::string source_mid;
  std::string page_id;
  std::size_t sentence_idx = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const Provenance&) const = default;
};

Provenance provenance_of(const Mention& mention, const std::string& source_mid);

struct Sample {
  SparseVector context_ids;
  std::uint32_t mid_id = 0;
  SparseVector pair_ids;
  int label = 0;
  std::string candidate_mid;
  Provenance provenance;

  /// Full classifier input: context_ids, mid_id and pair_ids merged ascending.
  SparseVector features() const;

  bool operator==(const Sample&) const = default;
};

struct TestGroup {
  std::size_t group_id = 0;
  std::string gold_mid;
  std::vector<Sample> candidates;  // one per candidate mid, ascending mid

  bool operator==(const TestGroup&) const = default;
};

struct Collection {
  std::string name;
  std::vector<std::string> candidate_mids;  // ascending
  std::vector<Sample> train;
  std::vector<TestGroup> test;

  bool operator==(const Collection&) const = default;
};

struct BuildOptions {
  double ratio = 0.8;
  int negatives_per_positive = 1;
  std::uint64_t seed = 1;
  Pairing pairing = Pairing::conjoined;
  std::size_t max_collections = 0;  // 0 = no cap
  CasePolicy case_policy = CasePolicy::sensitive;

  bool operator==(const BuildOptions&) const = default;
};

struct BuildStats {
  std::size_t collections = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t test_groups = 0;
  std::size_t test_samples = 0;
  std::size_t skipped_positives = 0;    // train mentions without open-class context
  std::size_t skipped_test = 0;         // held-out mentions without open-class context
  std::size_t excluded_names = 0;       // ambiguous names with < 2 aligned mids
  std::size_t excluded_mids = 0;        // mids dropped from collections for lack of mentions
  std::size_t empty_negative_pools = 0;
  std::size_t capped_collections = 0;   // eligible but cut by max_collections

  bool operator==(const BuildStats&) const = default;
};

struct Dataset {
  std::vector<Collection> collections;
  Vocabulary vocab;
  FeatureConfig config;
  BuildOptions options;
  BuildStats stats;

  bool operator==(const Dataset&) const = default;
};

using MentionsByMid = std::map<std::string, std::vector<Mention>>;

/// Label-as-feature positive for one aligned mention. std::nullopt when the
/// mention has no open-class neighbours on either side.
std::optional<Sample> build_positive(const Mention& mention, const std::string& source_mid,
                                     const FeatureConfig& config, Vocabulary& vocab,
                                     Pairing pairing = Pairing::conjoined, bool frozen = false);

/// n negatives for `target_mid`: mentions drawn uniformly from the other
/// same-named mids in `pool` (without replacement when the pool holds at
/// least n usable mentions, with replacement otherwise), each paired with
/// target_mid's MID feature. Empty when no usable mention exists.
std::vector<Sample> build_negatives(const std::string& collection_name, const std::string& target_mid,
                                    const MentionsByMid& pool, std::size_t n, Rng& rng,
                                    const FeatureConfig& config, Vocabulary& vocab,
                                    Pairing pairing = Pairing::conjoined, bool frozen = false);

/// Sample for already-extracted context items against a frozen vocabulary;
/// unseen items are dropped.
Sample make_sample(const std::vector<std::string>& items, const std::string& candidate_mid, int label,
                   const Vocabulary& vocab, Pairing pairing);

struct Split {
  MentionsByMid train;
  MentionsByMid test;
};

/// Per-mid shuffled split, train count max(1, floor(ratio * total)). Mentions
/// that share a sentence always land on the same side.
Split split_collection(const MentionsByMid& mentions, double ratio, Rng& rng);

/// Split of one ambiguous name, computed independently of any feature config.
struct PlannedCollection {
  std::string name;
  std::vector<std::string> candidate_mids;
  Split split;
};

struct Plan {
  std::vector<PlannedCollection> collections;
  BuildStats stats;  // eligibility counters only
};

Plan plan_collections(const Repository& repo, const AlignmentTable& alignment,
                      const BuildOptions& options);

Dataset build_dataset(const Plan& plan, const FeatureConfig& config, const BuildOptions& options);

/// align + plan_collections + build_dataset. Throws Error(data, "empty dataset")
/// when no name qualifies.
Dataset build_dataset(const Repository& repo, const Corpus& corpus, const FeatureConfig& config,
                      const BuildOptions& options);

struct Example {
  SparseVector features;
  int label = 0;
};

std::vector<Example> training_examples(const Dataset& dataset);

// --- files ---

inline constexpr const char* train_file = "train.txt";
inline constexpr const char* test_file = "test.txt";
inline constexpr const char* vocab_file = "vocab.tsv";
inline constexpr const char* manifest_file = "manifest.json";

/// `<label> <id>:1 ...` with ids ascending.
std::string format_train_line(const Sample& sample);
/// `<group_id> <gold:0|1> <candidate_mid> <id>:1 ...`
std::string format_test_line(const TestGroup& group, const Sample& sample);

void export_dataset(const Dataset& dataset, const std::string& dir);
Dataset import_dataset(const std::string& dir);

/// Reads a `<label> <id>:<value> ...` file; values other than 1 are rejected.
std::vector<Example> parse_sparse_examples(std::string_view text);

}  // namespace dsel
