#include "cder/data/document.hpp"

#include <fstream>
#include <sstream>

#include "cder/errors.hpp"

namespace cder::data {

using nlohmann::json;

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::size_t Document::mention_count() const {
  std::size_t n = 0;
  for (const auto& e : entities) n += e.mentions.size();
  return n;
}

std::vector<const Mention*> Document::mentions_in_order() const {
  std::vector<const Mention*> out;
  for (const auto& e : entities)
    for (const auto& m : e.mentions) out.push_back(&m);
  return out;
}

std::map<EntityPair, std::set<std::size_t>> positive_pairs(const Document& doc) {
  std::map<EntityPair, std::set<std::size_t>> out;
  for (const auto& fact : doc.facts) {
    auto& target = out[{fact.head, fact.tail}];
    target.insert(fact.evidence.begin(), fact.evidence.end());
  }
  return out;
}

namespace {

[[noreturn]] void fail(const Document& doc, const std::string& what) {
  throw ValidationError("document '" + doc.title + "': " + what);
}

}  // namespace

void validate(const Document& doc) {
  if (doc.sentences.empty()) fail(doc, "no sentences");
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    if (doc.sentences[s].empty()) fail(doc, "sentence " + std::to_string(s) + " has no tokens");
  }
  for (std::size_t e = 0; e < doc.entities.size(); ++e) {
    const auto& entity = doc.entities[e];
    if (entity.index != e) fail(doc, "entity indices are not dense at " + std::to_string(e));
    if (entity.mentions.empty()) fail(doc, "entity " + std::to_string(e) + " has no mentions");
    for (const auto& m : entity.mentions) {
      const std::string who = "entity " + std::to_string(e) + " ('" + m.surface + "')";
      if (m.entity_index != e) fail(doc, who + " mention carries wrong entity index");
      if (m.sentence_index >= doc.sentences.size()) {
        fail(doc, who + " mention sentence " + std::to_string(m.sentence_index) + " out of range");
      }
      const auto len = doc.sentences[m.sentence_index].size();
      if (!(m.start < m.end && m.end <= len)) {
        fail(doc, who + " span [" + std::to_string(m.start) + "," + std::to_string(m.end) +
                      ") out of range for sentence of length " + std::to_string(len));
      }
    }
  }
  for (const auto& f : doc.facts) {
    if (f.head >= doc.entities.size() || f.tail >= doc.entities.size()) fail(doc, "fact refers to unknown entity");
    if (f.head == f.tail) fail(doc, "fact with head == tail (" + std::to_string(f.head) + ")");
    if (f.relation.empty()) fail(doc, "fact with empty relation");
    for (auto ev : f.evidence) {
      if (ev >= doc.sentences.size()) fail(doc, "evidence sentence " + std::to_string(ev) + " out of range");
    }
  }
}

Document document_from_json(const json& j, std::size_t doc_index) {
  Document doc;
  try {
    doc.title = j.at("title").get<std::string>();
    doc.sentences = j.at("sents").get<std::vector<std::vector<std::string>>>();
    const auto& vertex_set = j.at("vertexSet");
    for (std::size_t e = 0; e < vertex_set.size(); ++e) {
      Entity entity;
      entity.index = e;
      for (const auto& mj : vertex_set[e]) {
        Mention m;
        m.entity_index = e;
        m.sentence_index = mj.at("sent_id").get<std::size_t>();
        const auto pos = mj.at("pos").get<std::vector<std::size_t>>();
        if (pos.size() != 2) throw ParseError("mention 'pos' must have two elements");
        m.start = pos[0];
        m.end = pos[1];
        m.surface = mj.value("name", std::string{});
        m.type_tag = mj.value("type", std::string{});
        entity.mentions.push_back(std::move(m));
      }
      if (!entity.mentions.empty()) entity.type_tag = entity.mentions.front().type_tag;
      doc.entities.push_back(std::move(entity));
    }
    if (j.contains("labels")) {
      for (const auto& lj : j.at("labels")) {
        RelationFact f;
        f.head = lj.at("h").get<std::size_t>();
        f.tail = lj.at("t").get<std::size_t>();
        f.relation = lj.at("r").get<std::string>();
        for (auto ev : lj.value("evidence", std::vector<std::size_t>{})) f.evidence.insert(ev);
        doc.facts.push_back(std::move(f));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError("document " + std::to_string(doc_index) + ": " + e.what());
  }
  validate(doc);
  return doc;
}

std::vector<Document> parse_corpus_json(const json& corpus) {
  if (!corpus.is_array()) throw ParseError("corpus root must be a JSON array");
  std::vector<Document> docs;
  docs.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) docs.push_back(document_from_json(corpus[i], i));
  return docs;
}

std::vector<Document> parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file " + path.string());
  json corpus;
  try {
    corpus = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return parse_corpus_json(corpus);
}

json document_to_json(const Document& doc) {
  json vertex_set = json::array();
  for (const auto& entity : doc.entities) {
    json mentions = json::array();
    for (const auto& m : entity.mentions) {
      mentions.push_back({{"name", m.surface},
                          {"sent_id", m.sentence_index},
                          {"pos", {m.start, m.end}},
                          {"type", m.type_tag}});
    }
    vertex_set.push_back(std::move(mentions));
  }
  json labels = json::array();
  for (const auto& f : doc.facts) {
    labels.push_back({{"h", f.head},
                      {"t", f.tail},
                      {"r", f.relation},
                      {"evidence", std::vector<std::size_t>(f.evidence.begin(), f.evidence.end())}});
  }
  return {{"title", doc.title}, {"sents", doc.sentences}, {"vertexSet", std::move(vertex_set)}, {"labels", std::move(labels)}};
}

json corpus_to_json(const std::vector<Document>& corpus) {
  json out = json::array();
  for (const auto& d : corpus) out.push_back(document_to_json(d));
  return out;
}

void write_corpus(const std::filesystem::path& path, const std::vector<Document>& corpus) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write corpus file " + path.string());
  out << corpus_to_json(corpus).dump();
}

bool operator==(const Mention& a, const Mention& b) {
  return a.entity_index == b.entity_index && a.sentence_index == b.sentence_index && a.start == b.start &&
         a.end == b.end && a.surface == b.surface && a.type_tag == b.type_tag;
}

bool operator==(const Entity& a, const Entity& b) {
  return a.index == b.index && a.mentions == b.mentions && a.type_tag == b.type_tag;
}

bool operator==(const RelationFact& a, const RelationFact& b) {
  return a.head == b.head && a.tail == b.tail && a.relation == b.relation && a.evidence == b.evidence;
}

bool operator==(const Document& a, const Document& b) {
  return a.title == b.title && a.sentences == b.sentences && a.entities == b.entities && a.facts == b.facts;
}

}  // namespace cder::data
