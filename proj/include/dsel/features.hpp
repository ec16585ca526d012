#pragma once

// Lexical context features: open-class windows around a mention, composed as
// bag-of-words or word sequence, optionally with POS tags attached.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dsel/repo_corpus.hpp"

namespace dsel {

enum class FeatureFamily { bow, ws, bow_pos, ws_pos };

inline constexpr FeatureFamily all_families[] = {FeatureFamily::bow, FeatureFamily::ws,
                                                 FeatureFamily::bow_pos, FeatureFamily::ws_pos};

struct FeatureConfig {
  FeatureFamily family = FeatureFamily::bow;
  int k = 1;
  bool lowercase = false;

  bool operator==(const FeatureConfig&) const = default;

  bool with_pos() const { return family == FeatureFamily::bow_pos || family == FeatureFamily::ws_pos; }
  bool sequence() const { return family == FeatureFamily::ws || family == FeatureFamily::ws_pos; }
};

/// Throws dsel::Error(usage) unless k is 1..3 (or >= 1 with allow_large_k).
FeatureConfig make_feature_config(FeatureFamily family, int k, bool allow_large_k = false);

/// CLI notation: bow | ws | bow+pos | ws+pos
FeatureFamily parse_family(std::string_view text);
std::string family_cli_name(FeatureFamily family);
/// Table notation: BOW | WS | BOW+POS | WS+POS
std::string family_display_name(FeatureFamily family);
/// e.g. "ws+pos k=1" / "ws+pos k=1 lowercase"
std::string describe(const FeatureConfig& config);
FeatureConfig parse_description(std::string_view text);

/// Noun, verb, adjective or adverb in the Penn Treebank tagset.
bool is_open_class(std::string_view pos);

struct ContextWindow {
  std::vector<TaggedToken> left;   // sentence order
  std::vector<TaggedToken> right;  // sentence order
};

ContextWindow context_window(const TaggedSentence& sentence, const Mention& mention, int k);

/// Escapes '\\', '-', '/' and ':' so that joined feature items decode uniquely.
std::string escape_token(std::string_view text);
std::string unescape_token(std::string_view text);

std::vector<std::string> compose(const std::vector<TaggedToken>& left,
                                 const std::vector<TaggedToken>& right, const FeatureConfig& config);

/// context_window + compose.
std::vector<std::string> extract_items(const TaggedSentence& sentence, const Mention& mention,
                                       const FeatureConfig& config);

/// Strictly increasing feature ids; every present feature has value 1.
using SparseVector = std::vector<std::uint32_t>;

/// Dense 1-based ids; 0 is reserved as invalid.
class Vocabulary {
 public:
  static constexpr std::uint32_t invalid = 0;

  std::size_t size() const { return items_.size(); }
  /// 0 when absent.
  std::uint32_t id_of(std::string_view item) const;
  const std::string& item(std::uint32_t id) const;  // id in 1..size()
  std::uint32_t add(const std::string& item);

  const std::vector<std::string>& items() const { return items_; }

  /// `<id>\t<item>` per line, ids ascending.
  std::string serialize() const;
  static Vocabulary parse(std::string_view text);
  /// FNV-1a of the serialized form; ties models to the vocabulary they were trained on.
  std::string hash() const;

  bool operator==(const Vocabulary& other) const { return items_ == other.items_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> ids_;
  std::vector<std::string> items_;
};

/// Maps items to ids (adding unseen ones unless frozen), dedups and sorts.
SparseVector intern(Vocabulary& vocab, std::span<const std::string> items, bool frozen);
SparseVector intern(const Vocabulary& vocab, std::span<const std::string> items);

/// Sorted union of two sparse vectors.
SparseVector merge(const SparseVector& a, const SparseVector& b);

}  // namespace dsel
