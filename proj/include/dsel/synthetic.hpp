#pragma once

// Generated repositories and corpora with known answers, for tests, the
// acceptance suite and benchmarks.

#include <cstdint>

#include "dsel/repo_corpus.hpp"

namespace dsel {

struct SyntheticSpec {
  std::size_t names = 50;
  std::size_t min_entities = 2;  // per ambiguous name
  std::size_t max_entities = 4;
  std::size_t mentions_per_entity = 10;
  std::size_t signature_words = 3;  // entity-specific words per side, placed adjacent to the mention
  std::size_t noise_per_side = 3;   // shared open-class noise words beyond the adjacent slot
  std::size_t noise_vocabulary = 300;
  std::size_t filler_sentences = 2;  // mention-free sentences per page
  std::uint64_t seed = 7;
};

struct SyntheticData {
  Repository repo;
  Corpus corpus;
};

/// Every mention's nearest open-class neighbours are signature words of its
/// own entity; all other open-class context is drawn from a shared pool.
SyntheticData make_synthetic(const SyntheticSpec& spec);

/// "His biography on the National Basketball Association (NBA) website
/// states, ``By acclamation, Michael Jordan is the greatest basketball player
/// of all time.''" with Penn Treebank tags.
TaggedSentence acclamation_sentence();

/// "Michael Jordan is an English mycologist ."
TaggedSentence mycologist_sentence();

/// Two entities named "Michael Jordan": 054c1 (basketball player) and
/// 0bby3vs (mycologist), one page each holding the two sentences above.
SyntheticData jordan_pair_fixture();

/// Larger "Michael Jordan" collection (basketball player, mycologist, machine
/// learning researcher) with many generated sentences per page, enough to
/// train a linker on.
SyntheticData jordan_training_fixture(std::uint64_t seed = 11);

}  // namespace dsel
