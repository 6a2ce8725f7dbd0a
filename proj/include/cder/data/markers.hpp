#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cder/data/document.hpp"

namespace cder::data {

inline constexpr const char* kEntityMarker = "*";

// Document tokens with an entity marker before and after every mention.
struct MarkedDocument {
  std::vector<std::string> tokens;
  std::vector<bool> is_marker;  // true for inserted markers only
  // [start, end) per sentence, in marked coordinates.
  std::vector<std::pair<std::size_t, std::size_t>> sentence_spans;
  // Per mention (Document::mentions_in_order), flat index of its opening marker.
  std::vector<std::size_t> mention_marker_index;
  std::vector<std::size_t> mention_entity;
  std::vector<std::size_t> mention_sentence;

  std::size_t size() const { return tokens.size(); }
  // Marker positions of every mention of one entity.
  std::vector<std::size_t> entity_marker_indices(std::size_t entity) const;
};

// Mentions sharing a start position open outermost-first (longer span, then
// lower entity index) and close in reverse, so nesting is well formed and
// identical spans nest by entity index.
MarkedDocument insert_markers(const Document& doc);

// Inverse of insert_markers: the original flat token sequence.
std::vector<std::string> strip_markers(const MarkedDocument& marked);

}  // namespace cder::data
