#include "dsel/repo_corpus.hpp"

#include <algorithm>
#include <cctype>
#include <json.hpp>
#include <sstream>
#include <tuple>

#include "dsel/util.hpp"

namespace dsel {

using json = nlohmann::json;

namespace {

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

[[noreturn]] void bad_record(std::size_t line, const std::string& what) {
  fail(ErrorKind::data, "line " + std::to_string(line) + ": " + what);
}

// Calls fn(line_no, json) for every non-blank line.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
      continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      bad_record(line_no, std::string("malformed record: ") + e.what());
    }
    if (!record.is_object()) bad_record(line_no, "record is not an object");
    fn(line_no, record);
  }
}

std::string string_field(const json& record, const char* key, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) bad_record(line, std::string("missing field '") + key + "'");
  if (!it->is_string()) bad_record(line, std::string("field '") + key + "' is not a string");
  return it->get<std::string>();
}

bool equal_token(std::string_view a, std::string_view b, CasePolicy policy) {
  if (policy == CasePolicy::sensitive) return a == b;
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

}  // namespace

NameIndex build_name_index(const std::vector<Entity>& entities) {
  NameIndex index;
  for (const auto& e : entities) index[e.name].insert(e.mid);
  return index;
}

Repository::Repository(std::vector<Entity> entities) : entities_(std::move(entities)) {
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    const auto& e = entities_[i];
    if (e.mid.empty()) fail(ErrorKind::data, "entity " + std::to_string(i) + ": empty mid");
    if (has_space(e.mid) || e.mid.find('|') != std::string::npos)
      fail(ErrorKind::data, "entity '" + e.mid + "': mid may not contain whitespace or '|'");
    if (split_ws(e.name).empty()) fail(ErrorKind::data, "entity '" + e.mid + "': empty name");
    if (!by_mid_.emplace(e.mid, i).second) fail(ErrorKind::data, "duplicate mid '" + e.mid + "'");
  }
  name_index_ = build_name_index(entities_);
}

const Entity* Repository::find(std::string_view mid) const {
  auto it = by_mid_.find(mid);
  return it == by_mid_.end() ? nullptr : &entities_[it->second];
}

std::vector<std::string> Repository::mids_named(const std::string& name) const {
  auto it = name_index_.find(name);
  if (it == name_index_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

Repository parse_repository(std::string_view text) {
  std::vector<Entity> entities;
  std::map<std::string, std::size_t> seen;
  for_each_record(text, [&](std::size_t line, const json& rec) {
    Entity e;
    e.mid = string_field(rec, "mid", line);
    e.name = string_field(rec, "name", line);
    auto pages = rec.find("pages");
    if (pages == rec.end()) bad_record(line, "missing field 'pages'");
    if (!pages->is_array()) bad_record(line, "field 'pages' is not an array");
    for (const auto& p : *pages) {
      if (!p.is_string()) bad_record(line, "page id is not a string");
      e.page_ids.push_back(p.get<std::string>());
    }
    if (e.mid.empty()) bad_record(line, "empty mid");
    if (split_ws(e.name).empty()) bad_record(line, "empty name for mid '" + e.mid + "'");
    auto [it, inserted] = seen.emplace(e.mid, line);
    if (!inserted)
      bad_record(line, "duplicate mid '" + e.mid + "' (first seen on line " +
                           std::to_string(it->second) + ")");
    entities.push_back(std::move(e));
  });
  return Repository(std::move(entities));
}

Repository load_repository(const std::string& path) {
  try {
    return parse_repository(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    fail(e.kind(), path + ": " + e.what());
  }
}

std::string serialize_repository(const Repository& repo) {
  std::string out;
  for (const auto& e : repo.entities()) {
    json rec = {{"mid", e.mid}, {"name", e.name}, {"pages", e.page_ids}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

Corpus parse_corpus(std::string_view text) {
  Corpus corpus;
  for_each_record(text, [&](std::size_t line, const json& rec) {
    std::string page_id = string_field(rec, "page_id", line);
    if (corpus.count(page_id)) bad_record(line, "duplicate page_id '" + page_id + "'");
    auto sentences = rec.find("sentences");
    if (sentences == rec.end()) bad_record(line, "missing field 'sentences'");
    if (!sentences->is_array()) bad_record(line, "field 'sentences' is not an array");
    std::vector<TaggedSentence> parsed;
    for (const auto& s : *sentences) {
      if (!s.is_array()) bad_record(line, "sentence is not an array of tokens");
      const std::size_t idx = parsed.size();
      if (s.empty()) bad_record(line, "sentence " + std::to_string(idx) + " has zero tokens");
      TaggedSentence sentence{page_id, idx, {}};
      for (const auto& tok : s) {
        if (!tok.is_object()) bad_record(line, "token is not an object");
        TaggedToken t{string_field(tok, "token", line), string_field(tok, "pos", line)};
        if (t.text.empty() || has_space(t.text))
          bad_record(line, "token text must be non-empty without whitespace");
        if (t.pos.empty() || has_space(t.pos))
          bad_record(line, "pos tag must be non-empty without whitespace");
        sentence.tokens.push_back(std::move(t));
      }
      parsed.push_back(std::move(sentence));
    }
    corpus.emplace(std::move(page_id), std::move(parsed));
  });
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  try {
    return parse_corpus(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    fail(e.kind(), path + ": " + e.what());
  }
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& [page_id, sentences] : corpus) {
    json arr = json::array();
    for (const auto& s : sentences) {
      json toks = json::array();
      for (const auto& t : s.tokens) toks.push_back({{"token", t.text}, {"pos", t.pos}});
      arr.push_back(std::move(toks));
    }
    json rec = {{"page_id", page_id}, {"sentences", std::move(arr)}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<Mention> find_mentions(const TaggedSentence& sentence, const std::string& name,
                                   CasePolicy policy) {
  const auto pattern = split_ws(name);
  std::vector<Mention> found;
  if (pattern.empty()) return found;
  const auto& toks = sentence.tokens;
  std::size_t i = 0;
  while (i + pattern.size() <= toks.size()) {
    bool match = true;
    for (std::size_t j = 0; j < pattern.size() && match; ++j)
      match = equal_token(toks[i + j].text, pattern[j], policy);
    if (match) {
      found.push_back(Mention{&sentence, i, i + pattern.size(), name});
      i += pattern.size();
    } else {
      ++i;
    }
  }
  return found;
}

std::string AlignmentSummary::to_string() const {
  std::ostringstream ss;
  ss << "aligned=" << aligned << " total=" << total << " missing_pages=" << missing_pages;
  return ss.str();
}

const std::vector<Mention>& AlignmentTable::of(const std::string& mid) const {
  static const std::vector<Mention> none;
  auto it = mentions.find(mid);
  return it == mentions.end() ? none : it->second;
}

AlignmentTable align(const Repository& repo, const Corpus& corpus, CasePolicy policy) {
  const auto& entities = repo.entities();
  const auto n = static_cast<long>(entities.size());
  std::vector<std::vector<Mention>> per_entity(entities.size());
  std::vector<std::size_t> missing(entities.size(), 0);

#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) {
    const auto& e = entities[static_cast<std::size_t>(i)];
    auto& out = per_entity[static_cast<std::size_t>(i)];
    // a page listed twice is scanned once
    std::set<std::string> pages(e.page_ids.begin(), e.page_ids.end());
    for (const auto& page : pages) {
      auto it = corpus.find(page);
      if (it == corpus.end()) {
        ++missing[static_cast<std::size_t>(i)];
        continue;
      }
      for (const auto& sentence : it->second) {
        auto found = find_mentions(sentence, e.name, policy);
        out.insert(out.end(), std::make_move_iterator(found.begin()),
                   std::make_move_iterator(found.end()));
      }
    }
    // std::set iteration already yields page_id order; sentences and starts
    // are visited in order within a page.
  }

  AlignmentTable table;
  table.summary.total = entities.size();
  for (std::size_t i = 0; i < entities.size(); ++i) {
    table.summary.missing_pages += missing[i];
    if (!per_entity[i].empty()) ++table.summary.aligned;
    table.mentions.emplace(entities[i].mid, std::move(per_entity[i]));
  }
  return table;
}

std::map<std::size_t, std::size_t> ambiguity_histogram(const Repository& repo) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& [name, mids] : repo.name_index()) ++hist[mids.size()];
  return hist;
}

}  // namespace dsel
