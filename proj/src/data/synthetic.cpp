#include "cder/data/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <tuple>

#include "cder/errors.hpp"

namespace cder::data {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Document make_document(std::size_t doc_index, const SyntheticCorpusOptions& opt, std::mt19937_64& rng) {
  Document doc;
  doc.title = "synthetic-" + std::to_string(doc_index);
  const std::size_t n_entities = uniform(rng, opt.min_entities, opt.max_entities);
  const std::size_t n_sentences = uniform(rng, opt.min_sentences, opt.max_sentences);

  std::vector<std::size_t> pool(opt.entity_pool);
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<std::string> names;
  for (std::size_t e = 0; e < n_entities; ++e) names.push_back("Entity" + std::to_string(pool[e]));

  // Which entities each sentence mentions; every entity appears somewhere.
  std::vector<std::vector<std::size_t>> sentence_entities(n_sentences);
  std::vector<std::size_t> mention_counts(n_entities, 0);
  const std::size_t cap = opt.max_mentions_per_entity ? opt.max_mentions_per_entity : n_sentences;
  for (std::size_t s = 0; s < n_sentences; ++s) {
    const std::size_t k = uniform(rng, 1, std::min(opt.max_mentions_per_sentence, n_entities));
    std::vector<std::size_t> order(n_entities);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t e : order) {
      if (sentence_entities[s].size() == k) break;
      if (mention_counts[e] < cap) {
        sentence_entities[s].push_back(e);
        ++mention_counts[e];
      }
    }
  }
  for (std::size_t e = 0; e < n_entities; ++e) {
    bool seen = false;
    for (const auto& ents : sentence_entities)
      seen = seen || std::find(ents.begin(), ents.end(), e) != ents.end();
    if (!seen) sentence_entities[uniform(rng, 0, n_sentences - 1)].push_back(e);
  }

  doc.entities.resize(n_entities);
  for (std::size_t e = 0; e < n_entities; ++e) {
    doc.entities[e].index = e;
    doc.entities[e].type_tag = "MISC";
  }
  for (std::size_t s = 0; s < n_sentences; ++s) {
    // a sentence always has room for its mentions
    const std::size_t length =
        std::max(uniform(rng, opt.min_sentence_length, opt.max_sentence_length), sentence_entities[s].size());
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < length; ++i) tokens.push_back("w" + std::to_string(uniform(rng, 0, 199)));
    // Each mention is a single token placed at a distinct position.
    std::vector<std::size_t> slots(length);
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    for (std::size_t k = 0; k < sentence_entities[s].size(); ++k) {
      const std::size_t e = sentence_entities[s][k];
      const std::size_t pos = slots[k];
      tokens[pos] = names[e];
      doc.entities[e].mentions.push_back({e, s, pos, pos + 1, names[e], "MISC"});
    }
    tokens.push_back(".");
    doc.sentences.push_back(std::move(tokens));
  }
  for (auto& entity : doc.entities) {
    std::sort(entity.mentions.begin(), entity.mentions.end(), [](const Mention& a, const Mention& b) {
      return std::tie(a.sentence_index, a.start) < std::tie(b.sentence_index, b.start);
    });
  }

  const auto mentions_entity = [&](std::size_t s, std::size_t e) {
    const auto& ents = sentence_entities[s];
    return std::find(ents.begin(), ents.end(), e) != ents.end();
  };
  std::bernoulli_distribution keep(opt.positive_rate);
  std::vector<RelationFact> candidates;
  for (std::size_t h = 0; h < n_entities; ++h) {
    for (std::size_t t = 0; t < n_entities; ++t) {
      if (h == t) continue;
      RelationFact fact{h, t, "R" + std::to_string(uniform(rng, 0, opt.relation_count - 1)), {}};
      for (std::size_t s = 0; s < n_sentences; ++s)
        if (mentions_entity(s, h) && mentions_entity(s, t)) fact.evidence.insert(s);
      if (fact.evidence.empty()) continue;
      candidates.push_back(fact);
      if (keep(rng)) doc.facts.push_back(std::move(fact));
    }
  }
  if (doc.facts.empty() && !candidates.empty()) doc.facts.push_back(candidates.front());
  return doc;
}

}  // namespace

std::vector<Document> synthetic_corpus(const SyntheticCorpusOptions& options) {
  const auto& o = options;
  if (o.min_entities < 2 || o.min_entities > o.max_entities) throw ConfigError("synthetic: need 2 <= min_entities <= max_entities");
  if (o.min_sentences < 1 || o.min_sentences > o.max_sentences) throw ConfigError("synthetic: need 1 <= min_sentences <= max_sentences");
  if (o.min_sentence_length < 1 || o.min_sentence_length > o.max_sentence_length)
    throw ConfigError("synthetic: need 1 <= min_sentence_length <= max_sentence_length");
  if (o.max_mentions_per_sentence < 2) throw ConfigError("synthetic: max_mentions_per_sentence must be >= 2");
  if (o.entity_pool < o.max_entities) throw ConfigError("synthetic: entity_pool smaller than max_entities");
  if (o.relation_count == 0) throw ConfigError("synthetic: relation_count must be positive");
  std::mt19937_64 rng(options.seed);
  std::vector<Document> corpus;
  while (corpus.size() < options.documents) {
    Document doc = make_document(corpus.size(), options, rng);
    // Documents where no two entities ever share a sentence carry no facts.
    if (!doc.facts.empty()) corpus.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace cder::data
