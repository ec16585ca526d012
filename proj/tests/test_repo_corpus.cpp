#include <doctest.h>

#include <algorithm>
#include <set>

#include "dsel/repo_corpus.hpp"
#include "dsel/synthetic.hpp"
#include "dsel/util.hpp"

using namespace dsel;

namespace {

TaggedSentence sentence_of(std::vector<std::string> words, std::string page = "p") {
  TaggedSentence s{std::move(page), 0, {}};
  for (auto& w : words) s.tokens.push_back({std::move(w), "NN"});
  return s;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("repository groups mids by name") {
  auto repo = parse_repository(
      R"({"mid":"m1","name":"Michael Jordan","pages":["p1"]})"
      "\n"
      R"({"mid":"m2","name":"Michael Jordan","pages":["p2"]})"
      "\n");
  CHECK(repo.entities().size() == 2);
  CHECK(repo.name_index().at("Michael Jordan") == std::set<std::string>{"m1", "m2"});
  CHECK(repo.mids_named("Michael Jordan") == std::vector<std::string>{"m1", "m2"});
  CHECK(repo.mids_named("Chicago").empty());
  REQUIRE(repo.find("m2") != nullptr);
  CHECK(repo.find("m2")->page_ids == std::vector<std::string>{"p2"});
  CHECK(repo.find("m9") == nullptr);
}

TEST_CASE("empty repository") {
  auto repo = parse_repository("");
  CHECK(repo.entities().empty());
  CHECK(repo.name_index().empty());
}

TEST_CASE("duplicate mid names the offending line") {
  const std::string text =
      R"({"mid":"m1","name":"A","pages":[]})"
      "\n"
      R"({"mid":"m2","name":"A","pages":[]})"
      "\n"
      R"({"mid":"m1","name":"B","pages":[]})"
      "\n";
  auto msg = error_of([&] { parse_repository(text); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("m1") != std::string::npos);
}

TEST_CASE("malformed repository records") {
  CHECK_THROWS_AS(parse_repository("{\"mid\":\"m1\",\"pages\":[]}\n"), Error);
  CHECK_THROWS_AS(parse_repository("not json\n"), Error);
  CHECK_THROWS_AS(parse_repository(R"({"mid":"m 1","name":"A","pages":[]})"), Error);
  CHECK_THROWS_AS(parse_repository(R"({"mid":"m1","name":"  ","pages":[]})"), Error);
}

TEST_CASE("corpus indexes sentences per page") {
  auto corpus = parse_corpus(
      R"({"page_id":"p1","sentences":[[{"token":"a","pos":"DT"}],[{"token":"b","pos":"NN"}]]})"
      "\n");
  REQUIRE(corpus.size() == 1);
  const auto& page = corpus.at("p1");
  REQUIRE(page.size() == 2);
  CHECK(page[0].sentence_idx == 0);
  CHECK(page[1].sentence_idx == 1);
  CHECK(page[1].tokens[0] == TaggedToken{"b", "NN"});
}

TEST_CASE("corpus preserves per-page order and counts") {
  auto corpus = parse_corpus(
      R"({"page_id":"p1","sentences":[[{"token":"x","pos":"NN"}]]})"
      "\n"
      R"({"page_id":"p2","sentences":[[{"token":"y","pos":"NN"}],[{"token":"z","pos":"NN"}]]})"
      "\n");
  CHECK(corpus.at("p1").size() == 1);
  CHECK(corpus.at("p2").size() == 2);
  CHECK(corpus.at("p2")[1].tokens[0].text == "z");
}

TEST_CASE("token without pos reports its line") {
  auto msg = error_of([] {
    parse_corpus(
        R"({"page_id":"p1","sentences":[[{"token":"a","pos":"DT"}]]})"
        "\n"
        R"({"page_id":"p2","sentences":[[{"token":"a"}]]})"
        "\n");
  });
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("pos") != std::string::npos);
}

TEST_CASE("find_mentions") {
  auto s = sentence_of({"By", "acclamation", ",", "Michael", "Jordan", "is", "the", "greatest", "basketball", "player"});
  auto m = find_mentions(s, "Michael Jordan");
  REQUIRE(m.size() == 1);
  CHECK(m[0].start == 3);
  CHECK(m[0].end == 5);
  CHECK(m[0].sentence == &s);
  CHECK(find_mentions(s, "Chicago").empty());

  auto twice = sentence_of({"Jordan", "met", "Jordan"});
  auto two = find_mentions(twice, "Jordan");
  REQUIRE(two.size() == 2);
  CHECK(two[0].start == 0);
  CHECK(two[0].end == 1);
  CHECK(two[1].start == 2);
  CHECK(two[1].end == 3);

  CHECK(find_mentions(s, "michael jordan").empty());
  CHECK(find_mentions(s, "michael jordan", CasePolicy::insensitive).size() == 1);
}

TEST_CASE("find_mentions never overlaps") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> words;
    const auto len = 1 + rng.below(12);
    for (std::size_t i = 0; i < len; ++i) words.push_back(rng.below(2) ? "a" : "b");
    auto s = sentence_of(words);
    for (const char* name : {"a", "a a", "a b a", "b b"}) {
      auto ms = find_mentions(s, name);
      for (std::size_t i = 1; i < ms.size(); ++i) CHECK(ms[i - 1].end <= ms[i].start);
      for (const auto& m : ms) {
        CHECK(m.end - m.start == split_ws(name).size());
        for (std::size_t t = m.start; t < m.end; ++t) CHECK(s.tokens[t].text == split_ws(name)[t - m.start]);
      }
    }
  }
}

TEST_CASE("align uses only each entity's own pages") {
  auto data = jordan_pair_fixture();
  auto table = align(data.repo, data.corpus);
  CHECK(table.summary.total == 2);
  CHECK(table.summary.aligned == 2);
  CHECK(table.summary.missing_pages == 0);
  for (const auto& e : data.repo.entities()) {
    CHECK(table.of(e.mid).size() == 1);
    for (const auto& m : table.of(e.mid))
      CHECK(std::find(e.page_ids.begin(), e.page_ids.end(), m.sentence->page_id) != e.page_ids.end());
  }
}

TEST_CASE("align counts missing pages") {
  Repository repo({{"m1", "Jordan", {"p1"}}, {"m3", "Jordan", {"missing"}}});
  Corpus corpus;
  corpus["p1"] = {sentence_of({"Jordan", "won"}, "p1")};
  auto table = align(repo, corpus);
  CHECK(table.of("m1").size() == 1);
  CHECK(table.of("m3").empty());
  CHECK(table.summary.missing_pages == 1);
  CHECK(table.summary.aligned == 1);
  CHECK(table.summary.to_string() == "aligned=1 total=2 missing_pages=1");
}

TEST_CASE("align provenance on a generated corpus") {
  SyntheticSpec spec;
  spec.names = 10;
  auto data = make_synthetic(spec);
  auto table = align(data.repo, data.corpus);
  CHECK(table.summary.aligned == table.summary.total);
  for (const auto& e : data.repo.entities()) {
    CHECK(table.of(e.mid).size() == spec.mentions_per_entity);
    for (const auto& m : table.of(e.mid)) {
      CHECK(std::find(e.page_ids.begin(), e.page_ids.end(), m.sentence->page_id) != e.page_ids.end());
      CHECK(m.name == e.name);
    }
  }
}

TEST_CASE("ambiguity histogram") {
  Repository repo({{"a1", "A", {}}, {"a2", "A", {}}, {"b1", "B", {}}, {"b2", "B", {}},
                   {"c1", "C", {}}, {"c2", "C", {}}, {"c3", "C", {}}});
  CHECK(ambiguity_histogram(repo) == std::map<std::size_t, std::size_t>{{2, 2}, {3, 1}});
  CHECK(ambiguity_histogram(Repository{}).empty());

  std::vector<Entity> toy;
  for (int n = 0; n < 4; ++n)
    for (int m = 0; m < 2; ++m) toy.push_back({"n" + std::to_string(n) + "m" + std::to_string(m), "N" + std::to_string(n), {}});
  for (int m = 0; m < 3; ++m) toy.push_back({"x" + std::to_string(m), "X", {}});
  CHECK(ambiguity_histogram(Repository(toy)) == std::map<std::size_t, std::size_t>{{2, 4}, {3, 1}});
}

TEST_CASE("histogram and index invariants on generated repositories") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticSpec spec;
    spec.names = 20;
    spec.seed = seed;
    auto repo = make_synthetic(spec).repo;
    CHECK(build_name_index(repo.entities()) == repo.name_index());
    std::size_t names = 0, entities = 0;
    for (auto [size, count] : ambiguity_histogram(repo)) {
      names += count;
      entities += size * count;
    }
    CHECK(names == repo.name_index().size());
    CHECK(entities == repo.entities().size());
  }
}

TEST_CASE("repository and corpus round-trip") {
  auto data = make_synthetic(SyntheticSpec{.names = 5});
  auto repo = parse_repository(serialize_repository(data.repo));
  auto corpus = parse_corpus(serialize_corpus(data.corpus));
  CHECK(repo == data.repo);
  CHECK(corpus == data.corpus);
  CHECK(serialize_corpus(corpus) == serialize_corpus(data.corpus));
}

TEST_CASE("load reports missing files as io errors") {
  try {
    load_repository("/nonexistent/repo.jsonl");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
    CHECK(std::string(e.what()).find("/nonexistent/repo.jsonl") != std::string::npos);
  }
}

TEST_CASE("naive_tag") {
  auto s = naive_tag("He ran quickly", Lexicon{});
  REQUIRE(s.tokens.size() == 3);
  CHECK(s.tokens[0] == TaggedToken{"He", "NNP"});
  CHECK(s.tokens[1] == TaggedToken{"ran", "NN"});
  CHECK(s.tokens[2] == TaggedToken{"quickly", "RB"});

  auto is = naive_tag("is", Lexicon{{"is", "VBZ"}});
  REQUIRE(is.tokens.size() == 1);
  CHECK(is.tokens[0] == TaggedToken{"is", "VBZ"});
  CHECK(naive_tag("IS", Lexicon{{"is", "VBZ"}}).tokens[0].pos == "VBZ");

  CHECK_THROWS_AS(naive_tag("", Lexicon{}), Error);
  CHECK_THROWS_AS(naive_tag("   ", Lexicon{}), Error);
}

TEST_CASE("naive_tag suffix rules and punctuation") {
  auto s = naive_tag("walking talked cats glass (NBA), 23", Lexicon{});
  std::vector<std::string> tags;
  for (const auto& t : s.tokens) tags.push_back(t.pos);
  CHECK(tokenize("walking talked cats glass (NBA), 23") ==
        std::vector<std::string>{"walking", "talked", "cats", "glass", "(", "NBA", ")", ",", "23"});
  CHECK(tags == std::vector<std::string>{"VBG", "VBD", "NNS", "NN", "-LRB-", "NNP", "-RRB-", ",", "CD"});
}
