#include "cder/data/markers.hpp"

#include <algorithm>

namespace cder::data {

std::vector<std::size_t> MarkedDocument::entity_marker_indices(std::size_t entity) const {
  std::vector<std::size_t> out;
  for (std::size_t m = 0; m < mention_entity.size(); ++m)
    if (mention_entity[m] == entity) out.push_back(mention_marker_index[m]);
  return out;
}

MarkedDocument insert_markers(const Document& doc) {
  MarkedDocument marked;
  const auto mentions = doc.mentions_in_order();
  marked.mention_marker_index.assign(mentions.size(), 0);
  for (const auto* m : mentions) {
    marked.mention_entity.push_back(m->entity_index);
    marked.mention_sentence.push_back(m->sentence_index);
  }

  const auto emit = [&marked](const std::string& token, bool marker) {
    marked.tokens.push_back(token);
    marked.is_marker.push_back(marker);
  };

  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& sentence = doc.sentences[s];
    std::vector<std::size_t> in_sentence;
    for (std::size_t k = 0; k < mentions.size(); ++k)
      if (mentions[k]->sentence_index == s) in_sentence.push_back(k);

    // Outer mentions first: earlier start, then longer span, then entity index.
    std::sort(in_sentence.begin(), in_sentence.end(), [&](std::size_t a, std::size_t b) {
      const auto& ma = *mentions[a];
      const auto& mb = *mentions[b];
      if (ma.start != mb.start) return ma.start < mb.start;
      if (ma.end != mb.end) return ma.end > mb.end;
      if (ma.entity_index != mb.entity_index) return ma.entity_index < mb.entity_index;
      return a < b;
    });

    const std::size_t span_start = marked.tokens.size();
    for (std::size_t pos = 0; pos <= sentence.size(); ++pos) {
      // Closing markers at pos: innermost first, i.e. reverse of opening order.
      for (auto it = in_sentence.rbegin(); it != in_sentence.rend(); ++it) {
        if (mentions[*it]->end == pos) emit(kEntityMarker, true);
      }
      if (pos == sentence.size()) break;
      for (auto k : in_sentence) {
        if (mentions[k]->start == pos) {
          marked.mention_marker_index[k] = marked.tokens.size();
          emit(kEntityMarker, true);
        }
      }
      emit(sentence[pos], false);
    }
    marked.sentence_spans.emplace_back(span_start, marked.tokens.size());
  }
  return marked;
}

std::vector<std::string> strip_markers(const MarkedDocument& marked) {
  std::vector<std::string> out;
  out.reserve(marked.tokens.size());
  for (std::size_t i = 0; i < marked.tokens.size(); ++i)
    if (!marked.is_marker[i]) out.push_back(marked.tokens[i]);
  return out;
}

}  // namespace cder::data
