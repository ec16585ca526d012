#include <doctest.h>

#include <algorithm>

#include "dsel/features.hpp"
#include "dsel/synthetic.hpp"
#include "dsel/util.hpp"

using namespace dsel;

namespace {

using Items = std::vector<std::string>;

Mention jordan_in(const TaggedSentence& s) {
  auto ms = find_mentions(s, "Michael Jordan");
  REQUIRE(ms.size() == 1);
  return ms.front();
}

std::vector<TaggedToken> toks(std::initializer_list<std::pair<const char*, const char*>> list) {
  std::vector<TaggedToken> out;
  for (auto [w, p] : list) out.push_back({w, p});
  return out;
}

Items words(const std::vector<TaggedToken>& ts) {
  Items out;
  for (const auto& t : ts) out.push_back(t.text);
  return out;
}

std::string strip_tags(const std::string& item) {
  // drop every unescaped "/TAG" run up to the next unescaped '-'
  std::string out;
  bool in_tag = false;
  for (std::size_t i = 0; i < item.size(); ++i) {
    char ch = item[i];
    if (ch == '\\' && i + 1 < item.size()) {
      if (!in_tag) {
        out += ch;
        out += item[i + 1];
      }
      ++i;
      continue;
    }
    if (ch == '/') {
      in_tag = true;
      continue;
    }
    if (ch == '-') in_tag = false;
    if (!in_tag) out += ch;
  }
  return out;
}

const char* const pos_pool[] = {"NN", "NNS", "NNP", "VB", "VBZ", "VBD", "JJ", "JJS", "RB", "DT", "IN", ",", "CD", "PRP"};
const char* const word_pool[] = {"a", "b-c", "d/e", "f", "g\\h", "i:j", "k", "l"};

TaggedSentence random_sentence(Rng& rng, std::size_t len) {
  TaggedSentence s{"p", 0, {}};
  for (std::size_t i = 0; i < len; ++i)
    s.tokens.push_back({word_pool[rng.below(std::size(word_pool))], pos_pool[rng.below(std::size(pos_pool))]});
  return s;
}

}  // namespace

TEST_CASE("twelve feature vectors of the acclamation sentence") {
  const auto sentence = acclamation_sentence();
  const auto mention = jordan_in(sentence);
  struct Row {
    FeatureFamily family;
    int k;
    Items items;
  };
  const std::vector<Row> table = {
      {FeatureFamily::bow, 1, {"acclamation", "is"}},
      {FeatureFamily::bow, 2, {"states", "acclamation", "is", "greatest"}},
      {FeatureFamily::bow, 3, {"website", "states", "acclamation", "is", "greatest", "basketball"}},
      {FeatureFamily::ws, 1, {"acclamation", "is"}},
      {FeatureFamily::ws, 2, {"states-acclamation", "is-greatest"}},
      {FeatureFamily::ws, 3, {"website-states-acclamation", "is-greatest-basketball"}},
      {FeatureFamily::bow_pos, 1, {"acclamation/NN", "is/VBZ"}},
      {FeatureFamily::bow_pos, 2, {"states/NNS", "acclamation/NN", "is/VBZ", "greatest/JJS"}},
      {FeatureFamily::bow_pos, 3,
       {"website/NN", "states/NNS", "acclamation/NN", "is/VBZ", "greatest/JJS", "basketball/NN"}},
      {FeatureFamily::ws_pos, 1, {"acclamation/NN", "is/VBZ"}},
      {FeatureFamily::ws_pos, 2, {"states/NNS-acclamation/NN", "is/VBZ-greatest/JJS"}},
      {FeatureFamily::ws_pos, 3, {"website/NN-states/NNS-acclamation/NN", "is/VBZ-greatest/JJS-basketball/NN"}},
  };
  for (const auto& row : table) {
    CAPTURE(family_display_name(row.family));
    CAPTURE(row.k);
    CHECK(extract_items(sentence, mention, make_feature_config(row.family, row.k)) == row.items);
  }
}

TEST_CASE("open-class tags") {
  CHECK(is_open_class("NN"));
  CHECK(is_open_class("VBZ"));
  CHECK(is_open_class("JJS"));
  CHECK(is_open_class("RB"));
  CHECK_FALSE(is_open_class("IN"));
  CHECK_FALSE(is_open_class("DT"));
  CHECK_FALSE(is_open_class(""));
}

TEST_CASE("context windows on the acclamation sentence") {
  const auto sentence = acclamation_sentence();
  const auto mention = jordan_in(sentence);
  auto w3 = context_window(sentence, mention, 3);
  CHECK(words(w3.left) == Items{"website", "states", "acclamation"});
  CHECK(words(w3.right) == Items{"is", "greatest", "basketball"});
  auto w1 = context_window(sentence, mention, 1);
  CHECK(words(w1.left) == Items{"acclamation"});
  CHECK(words(w1.right) == Items{"is"});
}

TEST_CASE("window at the sentence start") {
  TaggedSentence s{"p", 0, toks({{"Michael", "NNP"}, {"Jordan", "NNP"}, {"is", "VBZ"}, {"an", "DT"},
                                 {"English", "JJ"}, {"mycologist", "NN"}, {".", "."}})};
  auto w = context_window(s, jordan_in(s), 2);
  CHECK(w.left.empty());
  CHECK(words(w.right) == Items{"is", "English"});
  CHECK(extract_items(s, jordan_in(s), make_feature_config(FeatureFamily::bow, 3)) ==
        Items{"is", "English", "mycologist"});
}

TEST_CASE("compose examples") {
  auto left = toks({{"states", "NNS"}, {"acclamation", "NN"}});
  auto right = toks({{"is", "VBZ"}, {"greatest", "JJS"}});
  CHECK(compose(left, right, make_feature_config(FeatureFamily::ws, 2)) == Items{"states-acclamation", "is-greatest"});

  auto l3 = toks({{"website", "NN"}, {"states", "NNS"}, {"acclamation", "NN"}});
  auto r3 = toks({{"is", "VBZ"}, {"greatest", "JJS"}, {"basketball", "NN"}});
  CHECK(compose(l3, r3, make_feature_config(FeatureFamily::ws_pos, 3)) ==
        Items{"website/NN-states/NNS-acclamation/NN", "is/VBZ-greatest/JJS-basketball/NN"});

  auto l1 = toks({{"acclamation", "NN"}});
  auto r1 = toks({{"is", "VBZ"}});
  CHECK(compose(l1, r1, make_feature_config(FeatureFamily::bow, 1)) == Items{"acclamation", "is"});
  CHECK(compose(l1, r1, make_feature_config(FeatureFamily::ws, 1)) == Items{"acclamation", "is"});

  CHECK(compose({}, r1, make_feature_config(FeatureFamily::ws, 2)) == Items{"is"});
  CHECK(compose({}, {}, make_feature_config(FeatureFamily::ws, 2)).empty());
}

TEST_CASE("lowercase option") {
  auto l = toks({{"Website", "NN"}});
  auto cfg = make_feature_config(FeatureFamily::bow_pos, 1);
  CHECK(compose(l, {}, cfg) == Items{"Website/NN"});
  cfg.lowercase = true;
  CHECK(compose(l, {}, cfg) == Items{"website/NN"});
}

TEST_CASE("escaping keeps joined items unambiguous") {
  CHECK(escape_token("plain") == "plain");
  CHECK(escape_token("a-b") == "a\\-b");
  CHECK(escape_token("a/b") == "a\\/b");
  CHECK(escape_token("a\\b") == "a\\\\b");
  CHECK(escape_token("a:b") == "a\\:b");
  for (std::string s : {"", "x", "a-b/c", "\\-\\", "::", "-/-"}) CHECK(unescape_token(escape_token(s)) == s);

  auto ab = toks({{"a-b", "NN"}});
  auto a_b = toks({{"a", "NN"}, {"b", "NN"}});
  auto cfg = make_feature_config(FeatureFamily::ws, 2);
  CHECK(compose(ab, {}, cfg) != compose(a_b, {}, cfg));
}

TEST_CASE("feature config parsing") {
  CHECK(parse_family("bow") == FeatureFamily::bow);
  CHECK(parse_family("ws+pos") == FeatureFamily::ws_pos);
  CHECK_THROWS_AS(parse_family("trigram"), Error);
  CHECK_THROWS_AS(make_feature_config(FeatureFamily::bow, 0), Error);
  CHECK_THROWS_AS(make_feature_config(FeatureFamily::bow, 4), Error);
  CHECK(make_feature_config(FeatureFamily::bow, 4, true).k == 4);
  for (auto f : all_families) {
    CHECK(parse_family(family_cli_name(f)) == f);
    for (int k = 1; k <= 3; ++k) {
      auto cfg = make_feature_config(f, k);
      CHECK(parse_description(describe(cfg)) == cfg);
      cfg.lowercase = true;
      CHECK(parse_description(describe(cfg)) == cfg);
    }
  }
  CHECK(describe(make_feature_config(FeatureFamily::ws_pos, 1)) == "ws+pos k=1");
}

TEST_CASE("extraction properties on random sentences") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    auto s = random_sentence(rng, 1 + rng.below(14));
    const auto start = rng.below(s.tokens.size());
    const auto end = start + 1 + rng.below(std::min<std::uint64_t>(2, s.tokens.size() - start));
    Mention m{&s, start, end, "x"};
    for (int k = 1; k <= 3; ++k) {
      auto w = context_window(s, m, k);
      CHECK(w.left.size() <= static_cast<std::size_t>(k));
      CHECK(w.right.size() <= static_cast<std::size_t>(k));
      for (const auto& t : w.left) CHECK(is_open_class(t.pos));
      for (const auto& t : w.right) CHECK(is_open_class(t.pos));

      // oracle: scan outward from the mention
      std::vector<TaggedToken> left, right;
      for (std::size_t i = start; i-- > 0 && left.size() < static_cast<std::size_t>(k);)
        if (is_open_class(s.tokens[i].pos)) left.insert(left.begin(), s.tokens[i]);
      for (std::size_t i = end; i < s.tokens.size() && right.size() < static_cast<std::size_t>(k); ++i)
        if (is_open_class(s.tokens[i].pos)) right.push_back(s.tokens[i]);
      CHECK(w.left == left);
      CHECK(w.right == right);

      auto bow = extract_items(s, m, make_feature_config(FeatureFamily::bow, k));
      auto ws = extract_items(s, m, make_feature_config(FeatureFamily::ws, k));
      auto bow_pos = extract_items(s, m, make_feature_config(FeatureFamily::bow_pos, k));
      auto ws_pos = extract_items(s, m, make_feature_config(FeatureFamily::ws_pos, k));
      CHECK(bow.size() <= static_cast<std::size_t>(2 * k));
      CHECK(ws.size() <= 2);

      Items stripped;
      for (const auto& item : bow_pos) stripped.push_back(strip_tags(item));
      CHECK(stripped == bow);
      stripped.clear();
      for (const auto& item : ws_pos) stripped.push_back(strip_tags(item));
      CHECK(stripped == ws);

      if (k == 1) {
        auto a = bow, b = ws;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
      }
      CHECK(extract_items(s, m, make_feature_config(FeatureFamily::ws_pos, k)) == ws_pos);
    }
  }
}

TEST_CASE("intern") {
  Vocabulary v;
  Items abA{"a", "b", "a"};
  CHECK(intern(v, abA, false) == SparseVector{1, 2});
  CHECK(v.size() == 2);

  Vocabulary a;
  a.add("a");
  Items az{"a", "z"};
  CHECK(intern(a, az, true) == SparseVector{1});
  CHECK(a.size() == 1);
  CHECK(intern(std::as_const(a), az) == SparseVector{1});

  Vocabulary ab;
  ab.add("a");
  ab.add("b");
  Items ba{"b", "a"};
  CHECK(intern(ab, ba, true) == SparseVector{1, 2});
  CHECK(ab.id_of("b") == 2);
  CHECK(ab.id_of("q") == Vocabulary::invalid);
}

TEST_CASE("merge is a sorted union") {
  CHECK(merge({1, 4, 9}, {2, 4, 10}) == SparseVector{1, 2, 4, 9, 10});
  CHECK(merge({}, {3}) == SparseVector{3});
}

TEST_CASE("vocabulary round-trip") {
  Vocabulary v;
  for (std::string item : {"acclamation", "is/VBZ", "a\\-b", "MID:054c1", "MID:054c1|is", "ünïcode"}) v.add(item);
  const auto text = v.serialize();
  CHECK(text.substr(0, 14) == "1\tacclamation\n");
  auto back = Vocabulary::parse(text);
  CHECK(back == v);
  for (std::uint32_t id = 1; id <= v.size(); ++id) CHECK(back.id_of(v.item(id)) == id);
  CHECK(back.hash() == v.hash());
  Vocabulary other = v;
  other.add("extra");
  CHECK(other.hash() != v.hash());

  CHECK_THROWS_AS(Vocabulary::parse("2\ta\n"), Error);
  CHECK_THROWS_AS(Vocabulary::parse("1\ta\n2\ta\n"), Error);
}
