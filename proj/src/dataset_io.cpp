#include <charconv>
#include <filesystem>
#include <json.hpp>

#include "dsel/dataset.hpp"

namespace dsel {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

void append_ids(std::string& line, const SparseVector& ids) {
  for (auto id : ids) {
    line += ' ';
    line += std::to_string(id);
    line += ":1";
  }
}

json provenance_json(const Provenance& p) {
  return json::array({p.source_mid, p.page_id, p.sentence_idx, p.start, p.end});
}

Provenance provenance_from(const json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 5) fail(ErrorKind::data, "manifest: malformed provenance entry");
  return Provenance{name, j[0].get<std::string>(), j[1].get<std::string>(), j[2].get<std::size_t>(),
                    j[3].get<std::size_t>(), j[4].get<std::size_t>()};
}

json stats_json(const BuildStats& s) {
  return {{"collections", s.collections},
          {"positives", s.positives},
          {"negatives", s.negatives},
          {"train_samples", s.positives + s.negatives},
          {"test_groups", s.test_groups},
          {"test_samples", s.test_samples},
          {"skipped_positives", s.skipped_positives},
          {"skipped_test", s.skipped_test},
          {"excluded_names", s.excluded_names},
          {"excluded_mids", s.excluded_mids},
          {"empty_negative_pools", s.empty_negative_pools},
          {"capped_collections", s.capped_collections}};
}

BuildStats stats_from(const json& j) {
  BuildStats s;
  s.collections = j.at("collections").get<std::size_t>();
  s.positives = j.at("positives").get<std::size_t>();
  s.negatives = j.at("negatives").get<std::size_t>();
  s.test_groups = j.at("test_groups").get<std::size_t>();
  s.test_samples = j.at("test_samples").get<std::size_t>();
  s.skipped_positives = j.at("skipped_positives").get<std::size_t>();
  s.skipped_test = j.at("skipped_test").get<std::size_t>();
  s.excluded_names = j.at("excluded_names").get<std::size_t>();
  s.excluded_mids = j.at("excluded_mids").get<std::size_t>();
  s.empty_negative_pools = j.at("empty_negative_pools").get<std::size_t>();
  s.capped_collections = j.at("capped_collections").get<std::size_t>();
  return s;
}

std::uint32_t parse_feature(std::string_view tok, std::size_t line) {
  auto colon = tok.find(':');
  const auto where = "line " + std::to_string(line) + ": ";
  if (colon == std::string_view::npos) fail(ErrorKind::data, where + "expected <id>:<value>, got '" + std::string(tok) + "'");
  std::uint32_t id = 0;
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + colon, id);
  if (ec != std::errc{} || end != tok.data() + colon || id == 0)
    fail(ErrorKind::data, where + "bad feature id in '" + std::string(tok) + "'");
  if (tok.substr(colon + 1) != "1") fail(ErrorKind::data, where + "only binary features (value 1) are supported");
  return id;
}

int parse_label(std::string_view tok, std::size_t line) {
  if (tok == "1" || tok == "+1") return 1;
  if (tok == "0" || tok == "-1") return 0;
  fail(ErrorKind::data, "line " + std::to_string(line) + ": bad label '" + std::string(tok) + "'");
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty()) fn(line_no, line);
  }
}

SparseVector parse_ids(const std::vector<std::string>& toks, std::size_t from, std::size_t line) {
  SparseVector ids;
  for (std::size_t i = from; i < toks.size(); ++i) {
    auto id = parse_feature(toks[i], line);
    if (!ids.empty() && id <= ids.back())
      fail(ErrorKind::data, "line " + std::to_string(line) + ": feature ids must be strictly ascending");
    ids.push_back(id);
  }
  return ids;
}

// Splits a full feature vector back into its lexical, MID and pair parts.
Sample decompose(const SparseVector& ids, const Vocabulary& vocab, std::size_t line) {
  Sample s;
  for (auto id : ids) {
    if (id > vocab.size())
      fail(ErrorKind::data, "line " + std::to_string(line) + ": feature id " + std::to_string(id) + " not in vocabulary");
    const auto& item = vocab.item(id);
    if (is_pair_item(item)) {
      s.pair_ids.push_back(id);
    } else if (is_mid_item(item)) {
      if (s.mid_id != Vocabulary::invalid) fail(ErrorKind::data, "line " + std::to_string(line) + ": two MID features");
      s.mid_id = id;
      s.candidate_mid = mid_of_item(item);
    } else {
      s.context_ids.push_back(id);
    }
  }
  return s;
}

}  // namespace

std::string format_train_line(const Sample& sample) {
  std::string line = sample.label ? "1" : "0";
  append_ids(line, sample.features());
  return line;
}

std::string format_test_line(const TestGroup& group, const Sample& sample) {
  std::string line = std::to_string(group.group_id);
  line += sample.label ? " 1 " : " 0 ";
  line += sample.candidate_mid;
  append_ids(line, sample.features());
  return line;
}

void export_dataset(const Dataset& dataset, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create directory '" + dir + "': " + ec.message());

  std::string train, test;
  json collections = json::array();
  for (const auto& col : dataset.collections) {
    json train_prov = json::array();
    for (const auto& s : col.train) {
      train += format_train_line(s);
      train += '\n';
      train_prov.push_back(provenance_json(s.provenance));
    }
    json groups = json::array();
    for (const auto& g : col.test) {
      for (const auto& s : g.candidates) {
        test += format_test_line(g, s);
        test += '\n';
      }
      const auto& p = g.candidates.front().provenance;
      groups.push_back({{"group_id", g.group_id}, {"gold", g.gold_mid}, {"provenance", provenance_json(p)}});
    }
    collections.push_back({{"name", col.name},
                           {"candidates", col.candidate_mids},
                           {"train_count", col.train.size()},
                           {"train_provenance", std::move(train_prov)},
                           {"groups", std::move(groups)}});
  }

  const auto& o = dataset.options;
  json manifest = {{"tool", "dsel"},
                   {"format_version", 1},
                   {"version", version},
                   {"config", describe(dataset.config)},
                   {"pairing", pairing_name(o.pairing)},
                   {"seed", o.seed},
                   {"ratio", o.ratio},
                   {"negatives_per_positive", o.negatives_per_positive},
                   {"max_collections", o.max_collections},
                   {"case_policy", o.case_policy == CasePolicy::sensitive ? "sensitive" : "insensitive"},
                   {"vocab_size", dataset.vocab.size()},
                   {"vocab_hash", dataset.vocab.hash()},
                   {"counts", stats_json(dataset.stats)},
                   {"collections", std::move(collections)}};

  const fs::path root(dir);
  write_file((root / train_file).string(), train);
  write_file((root / test_file).string(), test);
  write_file((root / vocab_file).string(), dataset.vocab.serialize());
  write_file((root / manifest_file).string(), manifest.dump(1) + "\n");
}

Dataset import_dataset(const std::string& dir) {
  const fs::path root(dir);
  Dataset ds;
  ds.vocab = Vocabulary::parse(read_file((root / vocab_file).string()));

  json manifest;
  try {
    manifest = json::parse(read_file((root / manifest_file).string()));
  } catch (const json::exception& e) {
    fail(ErrorKind::data, std::string(manifest_file) + ": " + e.what());
  }
  try {
    ds.config = parse_description(manifest.at("config").get<std::string>());
    auto& o = ds.options;
    o.pairing = parse_pairing(manifest.at("pairing").get<std::string>());
    o.seed = manifest.at("seed").get<std::uint64_t>();
    o.ratio = manifest.at("ratio").get<double>();
    o.negatives_per_positive = manifest.at("negatives_per_positive").get<int>();
    o.max_collections = manifest.at("max_collections").get<std::size_t>();
    o.case_policy = manifest.at("case_policy").get<std::string>() == "insensitive" ? CasePolicy::insensitive
                                                                                 : CasePolicy::sensitive;
    ds.stats = stats_from(manifest.at("counts"));
    if (manifest.at("vocab_hash").get<std::string>() != ds.vocab.hash())
      fail(ErrorKind::data, "vocabulary hash does not match the manifest");

    // train file: lines belong to collections in manifest order
    std::vector<std::pair<Sample, std::size_t>> train;
    for_each_line(read_file((root / train_file).string()), [&](std::size_t line, std::string_view text) {
      auto toks = split_ws(text);
      if (toks.empty()) return;
      Sample s = decompose(parse_ids(toks, 1, line), ds.vocab, line);
      s.label = parse_label(toks[0], line);
      train.emplace_back(std::move(s), line);
    });

    std::map<std::size_t, std::vector<std::pair<Sample, std::size_t>>> test;
    for_each_line(read_file((root / test_file).string()), [&](std::size_t line, std::string_view text) {
      auto toks = split_ws(text);
      if (toks.size() < 3) fail(ErrorKind::data, "test line " + std::to_string(line) + ": too few fields");
      std::size_t group = 0;
      auto [end, ec] = std::from_chars(toks[0].data(), toks[0].data() + toks[0].size(), group);
      if (ec != std::errc{} || end != toks[0].data() + toks[0].size())
        fail(ErrorKind::data, "test line " + std::to_string(line) + ": bad group id");
      Sample s = decompose(parse_ids(toks, 3, line), ds.vocab, line);
      s.label = parse_label(toks[1], line);
      s.candidate_mid = toks[2];
      test[group].emplace_back(std::move(s), line);
    });

    std::size_t next_train = 0;
    for (const auto& jc : manifest.at("collections")) {
      Collection col;
      col.name = jc.at("name").get<std::string>();
      col.candidate_mids = jc.at("candidates").get<std::vector<std::string>>();
      const auto count = jc.at("train_count").get<std::size_t>();
      const auto& prov = jc.at("train_provenance");
      if (prov.size() != count || next_train + count > train.size())
        fail(ErrorKind::data, "manifest train counts disagree with " + std::string(train_file));
      for (std::size_t i = 0; i < count; ++i) {
        Sample s = std::move(train[next_train + i].first);
        s.provenance = provenance_from(prov[i], col.name);
        col.train.push_back(std::move(s));
      }
      next_train += count;
      for (const auto& jg : jc.at("groups")) {
        TestGroup g;
        g.group_id = jg.at("group_id").get<std::size_t>();
        g.gold_mid = jg.at("gold").get<std::string>();
        auto it = test.find(g.group_id);
        if (it == test.end()) fail(ErrorKind::data, "test group " + std::to_string(g.group_id) + " missing from test file");
        const auto p = provenance_from(jg.at("provenance"), col.name);
        for (auto& [s, line] : it->second) {
          s.provenance = p;
          g.candidates.push_back(std::move(s));
        }
        test.erase(it);
        col.test.push_back(std::move(g));
      }
      ds.collections.push_back(std::move(col));
    }
    if (next_train != train.size()) fail(ErrorKind::data, "train file has lines not covered by the manifest");
    if (!test.empty()) fail(ErrorKind::data, "test file has groups not covered by the manifest");
  } catch (const json::exception& e) {
    fail(ErrorKind::data, std::string(manifest_file) + ": " + e.what());
  }
  return ds;
}

std::vector<Example> parse_sparse_examples(std::string_view text) {
  std::vector<Example> out;
  for_each_line(text, [&](std::size_t line, std::string_view body) {
    auto toks = split_ws(body);
    if (toks.empty()) return;
    out.push_back(Example{parse_ids(toks, 1, line), parse_label(toks[0], line)});
  });
  return out;
}

}  // namespace dsel
