#include "cder/graph/document_graph.hpp"

#include <cmath>

#include "cder/errors.hpp"

namespace cder::graph {

namespace {

// Entities mentioned in each sentence.
std::vector<std::set<std::size_t>> sentence_entities(const data::Document& doc) {
  std::vector<std::set<std::size_t>> out(doc.sentences.size());
  for (const auto& e : doc.entities)
    for (const auto& m : e.mentions) out[m.sentence_index].insert(e.index);
  return out;
}

}  // namespace

std::vector<double> DocumentGraph::pp_mask() const {
  const std::size_t n = pair_count();
  std::vector<double> m(n * n, 0.0);
  for (const auto& [i, j] : pp_edges) m[i * n + j] = m[j * n + i] = 1.0;
  return m;
}

std::vector<double> DocumentGraph::ps_mask() const {
  const std::size_t s = sentence_count();
  std::vector<double> m(pair_count() * s, 0.0);
  for (const auto& [p, j] : ps_edges) m[p * s + j] = 1.0;
  return m;
}

std::vector<double> DocumentGraph::sp_mask() const {
  const std::size_t n = pair_count();
  std::vector<double> m(sentence_count() * n, 0.0);
  for (const auto& [p, j] : ps_edges) m[j * n + p] = 1.0;
  return m;
}

std::vector<double> DocumentGraph::ss_adjacency() const {
  const std::size_t s = sentence_count();
  std::vector<double> m(s * s, 0.0);
  for (const auto& [i, j] : ss_edges) m[i * s + j] = m[j * s + i] = 1.0;
  return m;
}

nlohmann::json DocumentGraph::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [h, t] : pair_nodes) pairs.push_back({{"h", h}, {"t", t}});
  const auto edges = [](const std::set<Edge>& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [a, b] : set) arr.push_back({a, b});
    return arr;
  };
  return {{"mode", mode == GraphMode::kTrain ? "train" : "inference"},
          {"pair_nodes", pairs},
          {"sentence_nodes", sentence_nodes},
          {"pp_edges", edges(pp_edges)},
          {"ps_edges", edges(ps_edges)},
          {"ss_edges", edges(ss_edges)}};
}

DocumentGraph build_static(const data::Document& doc, GraphMode mode) {
  DocumentGraph g;
  g.mode = mode;
  if (mode == GraphMode::kTrain) {
    for (const auto& [pair, evidence] : data::positive_pairs(doc)) g.pair_nodes.push_back(pair);
  } else {
    for (std::size_t h = 0; h < doc.entities.size(); ++h)
      for (std::size_t t = 0; t < doc.entities.size(); ++t)
        if (h != t) g.pair_nodes.emplace_back(h, t);
  }
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) g.sentence_nodes.push_back(s);

  const auto mentioned = sentence_entities(doc);

  for (std::size_t i = 0; i < g.pair_nodes.size(); ++i) {
    const auto [hi, ti] = g.pair_nodes[i];
    for (std::size_t j = i + 1; j < g.pair_nodes.size(); ++j) {
      const auto [hj, tj] = g.pair_nodes[j];
      if (hi == hj || hi == tj || ti == hj || ti == tj) g.pp_edges.emplace(i, j);
    }
    for (std::size_t s = 0; s < mentioned.size(); ++s) {
      if (mentioned[s].count(hi) || mentioned[s].count(ti)) g.ps_edges.emplace(i, s);
    }
  }
  // Sentence pairs sharing an entity, from each entity's sentence set.
  for (const auto& e : doc.entities) {
    std::set<std::size_t> sents;
    for (const auto& m : e.mentions) sents.insert(m.sentence_index);
    for (auto a = sents.begin(); a != sents.end(); ++a)
      for (auto b = std::next(a); b != sents.end(); ++b) g.ss_edges.emplace(*a, *b);
  }
  return g;
}

std::vector<double> pair_relational_vector(const data::Document& doc, const data::EntityPair& pair,
                                           const TransEModel& transe) {
  const auto h = transe.entity_vector(doc.entities.at(pair.first).name());
  const auto t = transe.entity_vector(doc.entities.at(pair.second).name());
  std::vector<double> r(h.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = t[i] - h[i];
    norm += r[i] * r[i];
  }
  norm = std::sqrt(norm);
  if (norm <= 1e-12) return std::vector<double>(r.size(), 0.0);
  for (double& x : r) x /= norm;
  return r;
}

std::vector<std::vector<double>> relational_vectors(const data::Document& doc, const DocumentGraph& graph,
                                                    const TransEModel& transe) {
  std::vector<std::vector<double>> out;
  out.reserve(graph.pair_count());
  for (const auto& p : graph.pair_nodes) out.push_back(pair_relational_vector(doc, p, transe));
  return out;
}

double relevance(const std::vector<double>& r_i, const std::vector<double>& r_j) {
  if (r_i.size() != r_j.size()) throw DimensionError("relevance: relational vectors differ in length");
  double s = 0.0;
  for (std::size_t k = 0; k < r_i.size(); ++k) s += r_i[k] * r_j[k];
  return s;
}

DocumentGraph restructure(const DocumentGraph& graph, const std::vector<std::vector<double>>& relational,
                          double theta) {
  if (relational.size() != graph.pair_count()) {
    throw DimensionError("restructure: " + std::to_string(relational.size()) + " relational vectors for " +
                         std::to_string(graph.pair_count()) + " pair nodes");
  }
  DocumentGraph out = graph;
  out.pp_edges.clear();
  for (std::size_t i = 0; i < graph.pair_count(); ++i) {
    for (std::size_t j = i + 1; j < graph.pair_count(); ++j) {
      const double sim = relevance(relational[i], relational[j]);
      const bool connected = graph.pp_edges.count({i, j}) > 0;
      // remove when connected and below threshold; add when disconnected and at/above it
      if (connected && sim < theta) continue;
      if (connected || sim >= theta) out.pp_edges.emplace(i, j);
    }
  }
  return out;
}

}  // namespace cder::graph
