#include "dsel/features.hpp"

#include <algorithm>
#include <cctype>

#include "dsel/util.hpp"

namespace dsel {

FeatureConfig make_feature_config(FeatureFamily family, int k, bool allow_large_k) {
  if (k < 1 || (!allow_large_k && k > 3))
    fail(ErrorKind::usage, "window size k must be 1, 2 or 3 (got " + std::to_string(k) + ")");
  return FeatureConfig{family, k, false};
}

FeatureFamily parse_family(std::string_view text) {
  std::string t(text);
  for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "bow") return FeatureFamily::bow;
  if (t == "ws") return FeatureFamily::ws;
  if (t == "bow+pos") return FeatureFamily::bow_pos;
  if (t == "ws+pos") return FeatureFamily::ws_pos;
  fail(ErrorKind::usage, "unknown feature family '" + std::string(text) +
                             "' (expected bow, ws, bow+pos or ws+pos)");
}

std::string family_cli_name(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::bow: return "bow";
    case FeatureFamily::ws: return "ws";
    case FeatureFamily::bow_pos: return "bow+pos";
    case FeatureFamily::ws_pos: return "ws+pos";
  }
  return "?";
}

std::string family_display_name(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::bow: return "BOW";
    case FeatureFamily::ws: return "WS";
    case FeatureFamily::bow_pos: return "BOW+POS";
    case FeatureFamily::ws_pos: return "WS+POS";
  }
  return "?";
}

std::string describe(const FeatureConfig& config) {
  std::string out = family_cli_name(config.family) + " k=" + std::to_string(config.k);
  if (config.lowercase) out += " lowercase";
  return out;
}

FeatureConfig parse_description(std::string_view text) {
  auto parts = split_ws(text);
  if (parts.size() < 2 || parts.size() > 3 || parts[1].rfind("k=", 0) != 0)
    fail(ErrorKind::data, "bad feature config '" + std::string(text) + "'");
  FeatureConfig config{parse_family(parts[0]), 0, false};
  try {
    config.k = std::stoi(parts[1].substr(2));
  } catch (const std::exception&) {
    fail(ErrorKind::data, "bad window size in '" + std::string(text) + "'");
  }
  if (config.k < 1) fail(ErrorKind::data, "bad window size in '" + std::string(text) + "'");
  if (parts.size() == 3) {
    if (parts[2] != "lowercase") fail(ErrorKind::data, "bad feature config '" + std::string(text) + "'");
    config.lowercase = true;
  }
  return config;
}

bool is_open_class(std::string_view pos) {
  if (pos.size() < 2) return false;
  auto head = pos.substr(0, 2);
  return head == "NN" || head == "VB" || head == "JJ" || head == "RB";
}

ContextWindow context_window(const TaggedSentence& sentence, const Mention& mention, int k) {
  ContextWindow window;
  const auto& toks = sentence.tokens;
  const auto want = static_cast<std::size_t>(std::max(k, 0));
  for (std::size_t i = std::min(mention.start, toks.size()); i > 0 && window.left.size() < want; --i)
    if (is_open_class(toks[i - 1].pos)) window.left.push_back(toks[i - 1]);
  std::reverse(window.left.begin(), window.left.end());
  for (std::size_t i = mention.end; i < toks.size() && window.right.size() < want; ++i)
    if (is_open_class(toks[i].pos)) window.right.push_back(toks[i]);
  return window;
}

std::string escape_token(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '\\' || c == '-' || c == '/' || c == ':') out += '\\';
    out += c;
  }
  return out;
}

std::string unescape_token(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) ++i;
    out += text[i];
  }
  return out;
}

namespace {

std::string render(const TaggedToken& tok, const FeatureConfig& config) {
  std::string word = tok.text;
  if (config.lowercase)
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::string out = escape_token(word);
  if (config.with_pos()) {
    out += '/';
    out += escape_token(tok.pos);
  }
  return out;
}

void compose_side(const std::vector<TaggedToken>& side, const FeatureConfig& config,
                  std::vector<std::string>& out) {
  if (side.empty()) return;
  if (!config.sequence()) {
    for (const auto& tok : side) out.push_back(render(tok, config));
    return;
  }
  std::string joined;
  for (std::size_t i = 0; i < side.size(); ++i) {
    if (i) joined += '-';
    joined += render(side[i], config);
  }
  out.push_back(std::move(joined));
}

}  // namespace

std::vector<std::string> compose(const std::vector<TaggedToken>& left,
                                 const std::vector<TaggedToken>& right, const FeatureConfig& config) {
  std::vector<std::string> items;
  compose_side(left, config, items);
  compose_side(right, config, items);
  return items;
}

std::vector<std::string> extract_items(const TaggedSentence& sentence, const Mention& mention,
                                       const FeatureConfig& config) {
  auto window = context_window(sentence, mention, config.k);
  return compose(window.left, window.right, config);
}

SparseVector merge(const SparseVector& a, const SparseVector& b) {
  SparseVector out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace dsel
