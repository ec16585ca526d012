#include "dsel/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <type_traits>
#include <set>

namespace dsel {

namespace {

constexpr std::string_view mid_prefix = "MID:";

struct Extracted {
  Provenance provenance;
  std::vector<std::string> items;
};

struct Draft {
  const Extracted* source = nullptr;
  std::string candidate;
  int label = 0;
};

bool mention_less(const Mention& a, const Mention& b) {
  return std::tie(a.sentence->page_id, a.sentence->sentence_idx, a.start) <
         std::tie(b.sentence->page_id, b.sentence->sentence_idx, b.start);
}

std::vector<std::string> pair_items(const std::string& mid, const std::vector<std::string>& items) {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(pair_item(mid, item));
  return out;
}

// V is Vocabulary (grows unless frozen) or const Vocabulary (always frozen).
template <typename V>
Sample finalize(const Draft& draft, V& vocab, Pairing pairing, bool frozen) {
  auto ids = [&](const std::vector<std::string>& items) {
    if constexpr (std::is_const_v<V>)
      return intern(vocab, items);
    else
      return intern(vocab, items, frozen);
  };
  Sample s;
  s.context_ids = ids(draft.source->items);
  const std::string mid = mid_item(draft.candidate);
  if constexpr (std::is_const_v<V>)
    s.mid_id = vocab.id_of(mid);
  else
    s.mid_id = frozen ? vocab.id_of(mid) : vocab.add(mid);
  if (pairing == Pairing::conjoined) s.pair_ids = ids(pair_items(draft.candidate, draft.source->items));
  s.label = draft.label;
  s.candidate_mid = draft.candidate;
  s.provenance = draft.source->provenance;
  return s;
}

Extracted extract(const Mention& mention, const std::string& source_mid, const FeatureConfig& config) {
  return Extracted{provenance_of(mention, source_mid), extract_items(*mention.sentence, mention, config)};
}

// Uniform draw of n entries from `pool` (indices into it).
std::vector<std::size_t> draw(std::size_t pool_size, std::size_t n, Rng& rng) {
  std::vector<std::size_t> picks;
  if (pool_size == 0 || n == 0) return picks;
  if (pool_size >= n) {
    std::vector<std::size_t> idx(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
      auto j = i + static_cast<std::size_t>(rng.below(pool_size - i));
      std::swap(idx[i], idx[j]);
      picks.push_back(idx[i]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) picks.push_back(static_cast<std::size_t>(rng.below(pool_size)));
  }
  return picks;
}

std::vector<Draft> draft_negatives(const std::string& target_mid,
                                   const std::vector<const Extracted*>& pool, std::size_t n, Rng& rng) {
  std::vector<Draft> out;
  for (auto i : draw(pool.size(), n, rng)) out.push_back(Draft{pool[i], target_mid, 0});
  return out;
}

struct CollectionDraft {
  // deques keep Extracted addresses stable while drafts point into them
  std::deque<Extracted> train_storage;
  std::deque<Extracted> test_storage;
  std::vector<Draft> train;
  std::vector<std::pair<const Extracted*, std::string>> test;  // (mention, gold mid)
  std::size_t skipped_positives = 0;
  std::size_t skipped_test = 0;
  std::size_t empty_pools = 0;
};

}  // namespace

std::string pairing_name(Pairing pairing) { return pairing == Pairing::plain ? "plain" : "conjoined"; }

Pairing parse_pairing(std::string_view text) {
  if (text == "plain") return Pairing::plain;
  if (text == "conjoined") return Pairing::conjoined;
  fail(ErrorKind::usage, "unknown pairing '" + std::string(text) + "' (expected plain or conjoined)");
}

std::string mid_item(std::string_view mid) { return std::string(mid_prefix) + std::string(mid); }

std::string pair_item(std::string_view mid, std::string_view item) {
  return mid_item(mid) + "|" + std::string(item);
}

bool is_mid_item(std::string_view item) {
  return item.starts_with(mid_prefix) && item.find('|') == std::string_view::npos;
}

bool is_pair_item(std::string_view item) {
  return item.starts_with(mid_prefix) && item.find('|') != std::string_view::npos;
}

std::string mid_of_item(std::string_view item) {
  if (!item.starts_with(mid_prefix)) return {};
  auto rest = item.substr(mid_prefix.size());
  return std::string(rest.substr(0, rest.find('|')));
}

Provenance provenance_of(const Mention& mention, const std::string& source_mid) {
  return Provenance{mention.name, source_mid, mention.sentence->page_id, mention.sentence->sentence_idx,
                    mention.start, mention.end};
}

SparseVector Sample::features() const {
  SparseVector out = merge(context_ids, pair_ids);
  if (mid_id != Vocabulary::invalid) out = merge(out, SparseVector{mid_id});
  return out;
}

std::optional<Sample> build_positive(const Mention& mention, const std::string& source_mid,
                                     const FeatureConfig& config, Vocabulary& vocab, Pairing pairing,
                                     bool frozen) {
  Extracted ex = extract(mention, source_mid, config);
  if (ex.items.empty()) return std::nullopt;
  return finalize(Draft{&ex, source_mid, 1}, vocab, pairing, frozen);
}

Sample make_sample(const std::vector<std::string>& items, const std::string& candidate_mid, int label,
                   const Vocabulary& vocab, Pairing pairing) {
  Extracted ex{Provenance{}, items};
  return finalize(Draft{&ex, candidate_mid, label}, vocab, pairing, true);
}

std::vector<Sample> build_negatives(const std::string& collection_name, const std::string& target_mid,
                                    const MentionsByMid& pool, std::size_t n, Rng& rng,
                                    const FeatureConfig& config, Vocabulary& vocab, Pairing pairing,
                                    bool frozen) {
  std::deque<Extracted> usable;
  for (const auto& [mid, mentions] : pool) {
    if (mid == target_mid) continue;
    for (const auto& m : mentions) {
      if (m.name != collection_name) continue;
      Extracted ex = extract(m, mid, config);
      if (!ex.items.empty()) usable.push_back(std::move(ex));
    }
  }
  std::vector<const Extracted*> refs;
  for (const auto& ex : usable) refs.push_back(&ex);
  std::vector<Sample> out;
  for (const auto& d : draft_negatives(target_mid, refs, n, rng))
    out.push_back(finalize(d, vocab, pairing, frozen));
  return out;
}

Split split_collection(const MentionsByMid& mentions, double ratio, Rng& rng) {
  if (!(ratio > 0.0 && ratio < 1.0))
    fail(ErrorKind::usage, "split ratio must lie strictly between 0 and 1");
  Split split;
  for (const auto& [mid, list] : mentions) {
    if (list.empty()) continue;
    // sentence-level units, in first-occurrence order
    std::vector<std::vector<const Mention*>> units;
    std::map<std::pair<std::string, std::size_t>, std::size_t> unit_of;
    for (const auto& m : list) {
      auto key = std::make_pair(m.sentence->page_id, m.sentence->sentence_idx);
      auto [it, fresh] = unit_of.emplace(key, units.size());
      if (fresh) units.emplace_back();
      units[it->second].push_back(&m);
    }
    rng.shuffle(units);
    const std::size_t total = list.size();
    const auto target = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(total) + 1e-9)));
    auto& train = split.train[mid];
    std::vector<Mention> test;
    for (const auto& unit : units) {
      auto& side = train.size() < target ? train : test;
      for (const auto* m : unit) side.push_back(*m);
    }
    std::sort(train.begin(), train.end(), mention_less);
    std::sort(test.begin(), test.end(), mention_less);
    if (!test.empty()) split.test[mid] = std::move(test);
  }
  return split;
}

Plan plan_collections(const Repository& repo, const AlignmentTable& alignment, const BuildOptions& options) {
  if (!(options.ratio > 0.0 && options.ratio < 1.0))
    fail(ErrorKind::usage, "split ratio must lie strictly between 0 and 1");
  Plan plan;
  for (const auto& [name, mids] : repo.name_index()) {
    if (mids.size() < 2) continue;
    MentionsByMid mentions;
    for (const auto& mid : mids)
      if (const auto& found = alignment.of(mid); !found.empty()) mentions.emplace(mid, found);
    if (mentions.size() < 2) {
      ++plan.stats.excluded_names;
      continue;
    }
    plan.stats.excluded_mids += mids.size() - mentions.size();
    if (options.max_collections && plan.collections.size() >= options.max_collections) {
      ++plan.stats.capped_collections;
      continue;
    }
    Rng rng(derive_seed(options.seed, "split:" + name));
    PlannedCollection pc;
    pc.name = name;
    for (const auto& [mid, _] : mentions) pc.candidate_mids.push_back(mid);
    pc.split = split_collection(mentions, options.ratio, rng);
    plan.collections.push_back(std::move(pc));
  }
  return plan;
}

Dataset build_dataset(const Plan& plan, const FeatureConfig& config, const BuildOptions& options) {
  if (options.negatives_per_positive < 0) fail(ErrorKind::usage, "negatives per positive must be >= 0");
  if (plan.collections.empty()) fail(ErrorKind::data, "empty dataset: no ambiguous name has two aligned entities");

  const auto n = plan.collections.size();
  std::vector<CollectionDraft> drafts(n);

  // Pass 1: extraction and sampling, independent per collection.
#pragma omp parallel for schedule(dynamic, 1)
  for (long ci = 0; ci < static_cast<long>(n); ++ci) {
    const auto& pc = plan.collections[static_cast<std::size_t>(ci)];
    auto& cd = drafts[static_cast<std::size_t>(ci)];
    auto& train_ex = cd.train_storage;
    std::map<std::string, std::vector<const Extracted*>> usable;
    for (const auto& [mid, mentions] : pc.split.train) {
      for (const auto& m : mentions) {
        Extracted ex = extract(m, mid, config);
        if (ex.items.empty()) {
          ++cd.skipped_positives;
          continue;
        }
        train_ex.push_back(std::move(ex));
        usable[mid].push_back(&train_ex.back());
      }
    }
    Rng rng(derive_seed(options.seed, "negatives:" + pc.name));
    for (const auto& mid : pc.candidate_mids) {
      auto it = usable.find(mid);
      if (it == usable.end()) continue;
      for (const auto* ex : it->second) cd.train.push_back(Draft{ex, mid, 1});
      std::vector<const Extracted*> pool;
      for (const auto& [other, list] : usable)
        if (other != mid) pool.insert(pool.end(), list.begin(), list.end());
      const auto want = it->second.size() * static_cast<std::size_t>(options.negatives_per_positive);
      if (want > 0 && pool.empty()) ++cd.empty_pools;
      auto negs = draft_negatives(mid, pool, want, rng);
      cd.train.insert(cd.train.end(), negs.begin(), negs.end());
    }
    auto& test_ex = cd.test_storage;
    for (const auto& [mid, mentions] : pc.split.test) {
      for (const auto& m : mentions) {
        Extracted ex = extract(m, mid, config);
        if (ex.items.empty()) {
          ++cd.skipped_test;
          continue;
        }
        test_ex.push_back(std::move(ex));
        cd.test.emplace_back(&test_ex.back(), mid);
      }
    }
  }

  // Pass 2: vocabulary over all training items, ids in sorted item order.
  std::set<std::string> items;
  for (std::size_t ci = 0; ci < n; ++ci) {
    for (const auto& mid : plan.collections[ci].candidate_mids) items.insert(mid_item(mid));
    for (const auto& d : drafts[ci].train) {
      items.insert(d.source->items.begin(), d.source->items.end());
      if (options.pairing == Pairing::conjoined)
        for (const auto& item : d.source->items) items.insert(pair_item(d.candidate, item));
    }
  }
  Dataset ds;
  ds.config = config;
  ds.options = options;
  ds.stats = plan.stats;
  for (const auto& item : items) ds.vocab.add(item);

  // Pass 3: intern against the frozen vocabulary.
  ds.collections.resize(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long ci = 0; ci < static_cast<long>(n); ++ci) {
    const auto& pc = plan.collections[static_cast<std::size_t>(ci)];
    const auto& cd = drafts[static_cast<std::size_t>(ci)];
    auto& col = ds.collections[static_cast<std::size_t>(ci)];
    col.name = pc.name;
    col.candidate_mids = pc.candidate_mids;
    for (const auto& d : cd.train) col.train.push_back(finalize(d, ds.vocab, options.pairing, true));
    for (const auto& [ex, gold] : cd.test) {
      TestGroup g;
      g.gold_mid = gold;
      for (const auto& cand : pc.candidate_mids)
        g.candidates.push_back(finalize(Draft{ex, cand, cand == gold ? 1 : 0}, ds.vocab, options.pairing, true));
      col.test.push_back(std::move(g));
    }
  }

  std::size_t next_group = 0;
  auto& st = ds.stats;
  st.collections = n;
  for (std::size_t ci = 0; ci < n; ++ci) {
    auto& col = ds.collections[ci];
    for (auto& g : col.test) {
      g.group_id = next_group++;
      st.test_samples += g.candidates.size();
    }
    st.test_groups += col.test.size();
    for (const auto& s : col.train) (s.label ? st.positives : st.negatives)++;
    st.skipped_positives += drafts[ci].skipped_positives;
    st.skipped_test += drafts[ci].skipped_test;
    st.empty_negative_pools += drafts[ci].empty_pools;
  }
  return ds;
}

Dataset build_dataset(const Repository& repo, const Corpus& corpus, const FeatureConfig& config,
                      const BuildOptions& options) {
  auto alignment = align(repo, corpus, options.case_policy);
  return build_dataset(plan_collections(repo, alignment, options), config, options);
}

std::vector<Example> training_examples(const Dataset& dataset) {
  std::vector<Example> out;
  for (const auto& col : dataset.collections)
    for (const auto& s : col.train) out.push_back(Example{s.features(), s.label});
  return out;
}

}  // namespace dsel
