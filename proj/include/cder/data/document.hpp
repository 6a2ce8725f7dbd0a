#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace cder::data {

struct Mention {
  std::size_t entity_index = 0;
  std::size_t sentence_index = 0;
  std::size_t start = 0;  // [start, end) within the sentence
  std::size_t end = 0;
  std::string surface;
  std::string type_tag;
};

struct Entity {
  std::size_t index = 0;
  std::vector<Mention> mentions;
  std::string type_tag;

  // Key used to identify the entity across documents: first mention surface.
  const std::string& name() const { return mentions.front().surface; }
};

struct RelationFact {
  std::size_t head = 0;
  std::size_t tail = 0;
  std::string relation;
  std::set<std::size_t> evidence;
};

struct Document {
  std::string title;
  std::vector<std::vector<std::string>> sentences;
  std::vector<Entity> entities;
  std::vector<RelationFact> facts;

  std::size_t token_count() const;
  std::size_t mention_count() const;
  // Mentions in vertexSet order: entity 0's mentions first.
  std::vector<const Mention*> mentions_in_order() const;
};

using EntityPair = std::pair<std::size_t, std::size_t>;  // (head, tail)

// Ordered positive pairs with their training target: the union of evidence
// sets over every fact of that pair.
std::map<EntityPair, std::set<std::size_t>> positive_pairs(const Document& doc);

// Throws ValidationError naming the document and entity on any broken invariant.
void validate(const Document& doc);

// DocRED JSON: array of {title, sents, vertexSet, labels?}.
std::vector<Document> parse_corpus(const std::filesystem::path& path);
std::vector<Document> parse_corpus_json(const nlohmann::json& corpus);
Document document_from_json(const nlohmann::json& doc, std::size_t doc_index);

nlohmann::json document_to_json(const Document& doc);
nlohmann::json corpus_to_json(const std::vector<Document>& corpus);
void write_corpus(const std::filesystem::path& path, const std::vector<Document>& corpus);

bool operator==(const Mention& a, const Mention& b);
bool operator==(const Entity& a, const Entity& b);
bool operator==(const RelationFact& a, const RelationFact& b);
bool operator==(const Document& a, const Document& b);

}  // namespace cder::data
