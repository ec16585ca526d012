#include "dsel/synthetic.hpp"

#include <array>

#include "dsel/util.hpp"

namespace dsel {

namespace {

constexpr std::array<const char*, 12> onsets = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t"};
constexpr std::array<const char*, 5> vowels = {"a", "e", "i", "o", "u"};

// Pronounceable pseudo-word; index-unique for a given prefix.
std::string pseudo_word(std::size_t index, std::size_t syllables) {
  std::string w;
  std::size_t x = index;
  for (std::size_t s = 0; s < syllables; ++s) {
    w += onsets[x % onsets.size()];
    x /= onsets.size();
    w += vowels[x % vowels.size()];
    x /= vowels.size();
  }
  // remaining high digits keep words distinct
  for (; x; x /= 10) w += static_cast<char>('a' + x % 10);
  return w;
}

std::string capitalize(std::string w) {
  w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  return w;
}

std::vector<TaggedToken> tag_all(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  std::vector<TaggedToken> out;
  for (auto [t, p] : pairs) out.push_back(TaggedToken{t, p});
  return out;
}

const char* open_tag(std::size_t i) {
  static constexpr std::array<const char*, 4> tags = {"NN", "VBD", "JJ", "RB"};
  return tags[i % tags.size()];
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  std::vector<TaggedToken> noise;
  for (std::size_t i = 0; i < spec.noise_vocabulary; ++i)
    noise.push_back(TaggedToken{"n" + pseudo_word(i, 2), open_tag(i)});
  const std::array<TaggedToken, 4> fillers = {TaggedToken{"the", "DT"}, TaggedToken{"of", "IN"},
                                              TaggedToken{"and", "CC"}, TaggedToken{"a", "DT"}};

  std::vector<Entity> entities;
  Corpus corpus;
  std::size_t signature_counter = 0;
  std::size_t mid_counter = 0;

  auto add_noise = [&](std::vector<TaggedToken>& out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(noise[rng.below(noise.size())]);
      if (rng.below(3) == 0) out.push_back(fillers[rng.below(fillers.size())]);
    }
  };

  for (std::size_t ni = 0; ni < spec.names; ++ni) {
    const std::string name = capitalize(pseudo_word(ni, 2)) + " " + capitalize(pseudo_word(ni * 7 + 3, 3));
    const auto span = spec.max_entities - spec.min_entities + 1;
    const std::size_t count = spec.min_entities + rng.below(span);
    for (std::size_t ei = 0; ei < count; ++ei) {
      Entity e;
      e.mid = "m." + hex64(0x1000 + mid_counter++).substr(11);
      e.name = name;
      const std::string page = "wiki/" + e.mid;
      e.page_ids.push_back(page);

      std::vector<TaggedToken> left_sig, right_sig;
      for (std::size_t s = 0; s < spec.signature_words; ++s) {
        left_sig.push_back(TaggedToken{"s" + pseudo_word(signature_counter++, 2), "NN"});
        right_sig.push_back(TaggedToken{"s" + pseudo_word(signature_counter++, 2), s % 2 ? "JJ" : "VBD"});
      }

      std::vector<TaggedSentence> sentences;
      auto push = [&](std::vector<TaggedToken> toks) {
        sentences.push_back(TaggedSentence{page, sentences.size(), std::move(toks)});
      };
      for (std::size_t m = 0; m < spec.mentions_per_entity; ++m) {
        std::vector<TaggedToken> toks;
        add_noise(toks, spec.noise_per_side);
        toks.push_back(left_sig[rng.below(left_sig.size())]);
        if (rng.below(2) == 0) toks.push_back(TaggedToken{",", ","});
        for (const auto& w : split_ws(name)) toks.push_back(TaggedToken{w, "NNP"});
        if (rng.below(2) == 0) toks.push_back(fillers[rng.below(fillers.size())]);
        toks.push_back(right_sig[rng.below(right_sig.size())]);
        add_noise(toks, spec.noise_per_side);
        toks.push_back(TaggedToken{".", "."});
        push(std::move(toks));
        if (m < spec.filler_sentences) {
          std::vector<TaggedToken> filler;
          add_noise(filler, 2 * spec.noise_per_side + 2);
          filler.push_back(TaggedToken{".", "."});
          push(std::move(filler));
        }
      }
      corpus.emplace(page, std::move(sentences));
      entities.push_back(std::move(e));
    }
  }
  return SyntheticData{Repository(std::move(entities)), std::move(corpus)};
}

TaggedSentence acclamation_sentence() {
  return TaggedSentence{"wiki/Michael_Jordan", 0,
                        tag_all({{"His", "PRP$"},       {"biography", "NN"},   {"on", "IN"},
                                 {"the", "DT"},         {"National", "NNP"},   {"Basketball", "NNP"},
                                 {"Association", "NNP"}, {"(", "-LRB-"},        {"NBA", "NNP"},
                                 {")", "-RRB-"},        {"website", "NN"},     {"states", "NNS"},
                                 {",", ","},            {"``", "``"},          {"By", "IN"},
                                 {"acclamation", "NN"}, {",", ","},            {"Michael", "NNP"},
                                 {"Jordan", "NNP"},     {"is", "VBZ"},         {"the", "DT"},
                                 {"greatest", "JJS"},   {"basketball", "NN"},  {"player", "NN"},
                                 {"of", "IN"},          {"all", "DT"},         {"time", "NN"},
                                 {".", "."},            {"''", "''"}})};
}

TaggedSentence mycologist_sentence() {
  return TaggedSentence{"wiki/Michael_Jordan_(mycologist)", 0,
                        tag_all({{"Michael", "NNP"},
                                 {"Jordan", "NNP"},
                                 {"is", "VBZ"},
                                 {"an", "DT"},
                                 {"English", "JJ"},
                                 {"mycologist", "NN"},
                                 {".", "."}})};
}

SyntheticData jordan_pair_fixture() {
  std::vector<Entity> entities = {{"054c1", "Michael Jordan", {"wiki/Michael_Jordan"}},
                                  {"0bby3vs", "Michael Jordan", {"wiki/Michael_Jordan_(mycologist)"}}};
  Corpus corpus;
  corpus.emplace("wiki/Michael_Jordan", std::vector<TaggedSentence>{acclamation_sentence()});
  corpus.emplace("wiki/Michael_Jordan_(mycologist)", std::vector<TaggedSentence>{mycologist_sentence()});
  return SyntheticData{Repository(std::move(entities)), std::move(corpus)};
}

SyntheticData jordan_training_fixture(std::uint64_t seed) {
  struct Persona {
    const char* mid;
    const char* page;
    std::vector<TaggedToken> before;  // nearest open-class word before the name
    std::vector<TaggedToken> after;   // nearest open-class word after the name
  };
  const std::vector<Persona> personas = {
      {"054c1",
       "wiki/Michael_Jordan",
       tag_all({{"acclamation", "NN"}, {"guard", "NN"}, {"superstar", "NN"}, {"Bulls", "NNPS"}, {"dunk", "NN"}}),
       tag_all({{"dunked", "VBD"}, {"scored", "VBD"}, {"won", "VBD"}, {"retired", "VBD"}, {"averaged", "VBD"}})},
      {"0bby3vs",
       "wiki/Michael_Jordan_(mycologist)",
       tag_all({{"mycologist", "NN"}, {"botanist", "NN"}, {"naturalist", "NN"}, {"fungi", "NNS"}, {"Kew", "NNP"}}),
       tag_all({{"catalogued", "VBD"}, {"collected", "VBD"}, {"described", "VBD"}, {"published", "VBD"}, {"surveyed", "VBD"}})},
      {"0gs6m",
       "wiki/Michael_I._Jordan",
       tag_all({{"professor", "NN"}, {"statistician", "NN"}, {"Berkeley", "NNP"}, {"researcher", "NN"}, {"inference", "NN"}}),
       tag_all({{"proposed", "VBD"}, {"advised", "VBD"}, {"lectured", "VBD"}, {"derived", "VBD"}, {"developed", "VBD"}})},
  };
  const auto shared = tag_all({{"later", "RB"}, {"famous", "JJ"}, {"career", "NN"}, {"often", "RB"},
                               {"work", "NN"}, {"years", "NNS"}, {"early", "JJ"}, {"also", "RB"}});
  Rng rng(seed);
  std::vector<Entity> entities;
  Corpus corpus;
  for (const auto& p : personas) {
    entities.push_back(Entity{p.mid, "Michael Jordan", {p.page}});
    std::vector<TaggedSentence> sentences;
    for (std::size_t i = 0; i < 30; ++i) {
      std::vector<TaggedToken> toks;
      toks.push_back(shared[rng.below(shared.size())]);
      toks.push_back(TaggedToken{"the", "DT"});
      toks.push_back(p.before[i % p.before.size()]);
      toks.push_back(TaggedToken{",", ","});
      toks.push_back(TaggedToken{"Michael", "NNP"});
      toks.push_back(TaggedToken{"Jordan", "NNP"});
      toks.push_back(p.after[rng.below(p.after.size())]);
      toks.push_back(TaggedToken{"the", "DT"});
      toks.push_back(shared[rng.below(shared.size())]);
      toks.push_back(TaggedToken{".", "."});
      sentences.push_back(TaggedSentence{p.page, sentences.size(), std::move(toks)});
    }
    corpus.emplace(p.page, std::move(sentences));
  }
  return SyntheticData{Repository(std::move(entities)), std::move(corpus)};
}

}  // namespace dsel
