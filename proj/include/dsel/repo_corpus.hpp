#pragma once

// Knowledge repository and tagged text corpus: loading, name->mid grouping,
// mention location and entity-to-page alignment.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dsel {

struct Entity {
  std::string mid;
  std::string name;
  std::vector<std::string> page_ids;

  bool operator==(const Entity&) const = default;
};

using NameIndex = std::map<std::string, std::set<std::string>>;

class Repository {
 public:
  Repository() = default;
  /// Validates uniqueness of mids and non-empty names; throws dsel::Error.
  explicit Repository(std::vector<Entity> entities);

  const std::vector<Entity>& entities() const { return entities_; }
  const NameIndex& name_index() const { return name_index_; }
  /// nullptr when the mid is unknown.
  const Entity* find(std::string_view mid) const;
  /// Mids sharing `name`, ascending; empty when the name is unknown.
  std::vector<std::string> mids_named(const std::string& name) const;

  bool operator==(const Repository& other) const {
    return entities_ == other.entities_ && name_index_ == other.name_index_;
  }

 private:
  std::vector<Entity> entities_;
  NameIndex name_index_;
  std::map<std::string, std::size_t, std::less<>> by_mid_;
};

NameIndex build_name_index(const std::vector<Entity>& entities);

struct TaggedToken {
  std::string text;
  std::string pos;

  bool operator==(const TaggedToken&) const = default;
};

struct TaggedSentence {
  std::string page_id;
  std::size_t sentence_idx = 0;
  std::vector<TaggedToken> tokens;

  bool operator==(const TaggedSentence&) const = default;
};

/// page_id -> sentences in input order.
using Corpus = std::map<std::string, std::vector<TaggedSentence>>;

enum class CasePolicy { sensitive, insensitive };

/// A located occurrence of a name. `sentence` points into a Corpus, which
/// must outlive the mention.
struct Mention {
  const TaggedSentence* sentence = nullptr;
  std::size_t start = 0;  // inclusive token index
  std::size_t end = 0;    // exclusive
  std::string name;
};

Repository load_repository(const std::string& path);
Repository parse_repository(std::string_view text);
std::string serialize_repository(const Repository& repo);

Corpus load_corpus(const std::string& path);
Corpus parse_corpus(std::string_view text);
std::string serialize_corpus(const Corpus& corpus);

/// Non-overlapping, left-to-right greedy matches of the whitespace tokens of
/// `name` against the sentence's token texts.
std::vector<Mention> find_mentions(const TaggedSentence& sentence, const std::string& name,
                                   CasePolicy policy = CasePolicy::sensitive);

struct AlignmentSummary {
  std::size_t aligned = 0;        // entities with at least one mention
  std::size_t total = 0;          // entities
  std::size_t missing_pages = 0;  // page references absent from the corpus

  std::string to_string() const;
};

struct AlignmentTable {
  /// mid -> mentions ordered by (page_id, sentence_idx, start).
  std::map<std::string, std::vector<Mention>> mentions;
  AlignmentSummary summary;

  const std::vector<Mention>& of(const std::string& mid) const;
};

/// Scans each entity's own topic-equivalent pages for mentions of its name.
/// Entities are processed in parallel; the merged table is order-deterministic.
AlignmentTable align(const Repository& repo, const Corpus& corpus,
                     CasePolicy policy = CasePolicy::sensitive);

/// bucket size (mids sharing a name) -> number of names with that size.
std::map<std::size_t, std::size_t> ambiguity_histogram(const Repository& repo);

// --- naive tagger (convenience for untagged text) ---

using Lexicon = std::map<std::string, std::string>;

/// Lowercase word -> tag for common closed-class words and auxiliaries.
const Lexicon& default_lexicon();

/// Whitespace-and-punctuation tokenizer with lexicon/suffix tagging.
/// Throws dsel::Error(usage) on empty or blank input.
TaggedSentence naive_tag(std::string_view raw_sentence, const Lexicon& lexicon);

std::vector<std::string> tokenize(std::string_view raw_sentence);

}  // namespace dsel
