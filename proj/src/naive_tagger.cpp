#include <algorithm>
#include <cctype>

#include "dsel/repo_corpus.hpp"
#include "dsel/util.hpp"

namespace dsel {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

std::string punctuation_tag(const std::string& tok) {
  if (tok == "(" || tok == "[" || tok == "{") return "-LRB-";
  if (tok == ")" || tok == "]" || tok == "}") return "-RRB-";
  if (tok == "\"") return "''";
  return tok;
}

std::string guess_tag(const std::string& tok, const Lexicon& lexicon) {
  const std::string low = lower(tok);
  if (auto it = lexicon.find(low); it != lexicon.end()) return it->second;
  if (std::none_of(tok.begin(), tok.end(), [](unsigned char c) { return is_word_char(c); }))
    return punctuation_tag(tok);
  if (std::all_of(tok.begin(), tok.end(),
                  [](unsigned char c) { return std::isdigit(c) || c == '.' || c == ','; }))
    return "CD";
  if (ends_with(low, "ly")) return "RB";
  if (ends_with(low, "ing")) return "VBG";
  if (ends_with(low, "ed")) return "VBD";
  if (ends_with(low, "s") && !ends_with(low, "ss")) return "NNS";
  if (std::isupper(static_cast<unsigned char>(tok.front()))) return "NNP";
  return "NN";
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < raw.size()) {
    const auto c = static_cast<unsigned char>(raw[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (is_word_char(c)) {
      // word chars, keeping hyphens and apostrophes that sit between word chars
      while (j < raw.size()) {
        const auto d = static_cast<unsigned char>(raw[j]);
        if (is_word_char(d)) {
          ++j;
        } else if ((d == '-' || d == '\'') && j + 1 < raw.size() &&
                   is_word_char(static_cast<unsigned char>(raw[j + 1]))) {
          j += 2;
        } else {
          break;
        }
      }
    } else {
      // runs of one punctuation char collapse: `` '' ...
      while (j < raw.size() && raw[j] == raw[i]) ++j;
    }
    tokens.emplace_back(raw.substr(i, j - i));
    i = j;
  }
  return tokens;
}

TaggedSentence naive_tag(std::string_view raw_sentence, const Lexicon& lexicon) {
  auto words = tokenize(raw_sentence);
  if (words.empty()) fail(ErrorKind::usage, "naive_tag: empty sentence");
  TaggedSentence sentence;
  sentence.page_id = "<input>";
  for (auto& w : words) {
    auto tag = guess_tag(w, lexicon);
    sentence.tokens.push_back(TaggedToken{std::move(w), std::move(tag)});
  }
  return sentence;
}

const Lexicon& default_lexicon() {
  static const Lexicon lexicon = [] {
    Lexicon lx;
    auto add = [&lx](std::initializer_list<const char*> words, const char* tag) {
      for (const char* w : words) lx.emplace(w, tag);
    };
    add({"a", "an", "the", "this", "that", "these", "those", "all", "every", "each", "some",
         "any", "no", "another"},
        "DT");
    add({"of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "about", "as",
         "after", "before", "during", "over", "under", "between", "through", "against",
         "without", "within", "since", "until", "among", "like", "than", "because", "while",
         "if", "although", "though", "whether"},
        "IN");
    add({"and", "or", "but", "nor", "yet", "so"}, "CC");
    add({"i", "you", "he", "she", "it", "we", "they", "me", "him", "us", "them"}, "PRP");
    add({"my", "your", "his", "her", "its", "our", "their"}, "PRP$");
    add({"who", "whom"}, "WP");
    add({"whose"}, "WP$");
    add({"which", "what"}, "WDT");
    add({"when", "where", "why", "how"}, "WRB");
    add({"can", "could", "will", "would", "shall", "should", "may", "might", "must"}, "MD");
    add({"is", "has", "does"}, "VBZ");
    add({"are", "am", "have", "do"}, "VBP");
    add({"was", "were", "had", "did"}, "VBD");
    add({"be"}, "VB");
    add({"been"}, "VBN");
    add({"being"}, "VBG");
    add({"not", "n't"}, "RB");
    add({"there"}, "EX");
    add({"'s"}, "POS");
    return lx;
  }();
  return lexicon;
}

}  // namespace dsel
