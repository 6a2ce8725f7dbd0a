#pragma once

#include <cstdint>
#include <vector>

#include "cder/data/document.hpp"

namespace cder::data {

struct SyntheticCorpusOptions {
  std::size_t documents = 20;
  std::size_t min_entities = 3;
  std::size_t max_entities = 5;
  std::size_t min_sentences = 4;
  std::size_t max_sentences = 6;
  std::size_t min_sentence_length = 6;
  std::size_t max_sentence_length = 10;
  std::size_t max_mentions_per_sentence = 2;
  std::size_t max_mentions_per_entity = 0;  // 0: no cap
  std::size_t entity_pool = 40;  // distinct names shared across documents
  std::size_t relation_count = 4;
  double positive_rate = 0.6;  // chance a co-occurring ordered pair gets a fact
  std::uint64_t seed = 7;
};

// Documents whose facts hold between entities that co-occur in a sentence;
// every fact's evidence is exactly the set of sentences mentioning both its
// head and tail. Every document has at least one fact.
std::vector<Document> synthetic_corpus(const SyntheticCorpusOptions& options);

}  // namespace cder::data
