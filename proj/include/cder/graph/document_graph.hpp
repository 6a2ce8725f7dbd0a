#pragma once

#include <set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cder/data/document.hpp"
#include "cder/graph/transe.hpp"

namespace cder::graph {

enum class GraphMode { kTrain, kInference };

using Edge = std::pair<std::size_t, std::size_t>;

// Bipartite document graph over entity-pair nodes and sentence nodes.
//   pp_edges: (i, j) with i < j, indices into pair_nodes
//   ps_edges: (pair index, sentence index)
//   ss_edges: (i, j) with i < j, sentence indices
struct DocumentGraph {
  GraphMode mode = GraphMode::kTrain;
  std::vector<data::EntityPair> pair_nodes;
  std::vector<std::size_t> sentence_nodes;
  std::set<Edge> pp_edges;
  std::set<Edge> ps_edges;
  std::set<Edge> ss_edges;

  std::size_t pair_count() const { return pair_nodes.size(); }
  std::size_t sentence_count() const { return sentence_nodes.size(); }

  // Dense 0/1 adjacency masks, row-major.
  std::vector<double> pp_mask() const;          // [pairs x pairs]
  std::vector<double> ps_mask() const;          // [pairs x sentences]
  std::vector<double> sp_mask() const;          // [sentences x pairs]
  std::vector<double> ss_adjacency() const;     // [sentences x sentences]

  nlohmann::json to_json() const;
};

// Pair nodes are the positive pairs in train mode and every ordered pair of
// distinct entities in inference mode. Edges:
//   pp: pairs sharing at least one entity
//   ps: sentence mentions the pair's head or tail
//   ss: sentences mentioning a common entity
DocumentGraph build_static(const data::Document& doc, GraphMode mode);

// normalize(t - h) of the pair's TransE entity vectors; a zero residual
// stays the zero vector.
std::vector<double> pair_relational_vector(const data::Document& doc, const data::EntityPair& pair,
                                           const TransEModel& transe);
std::vector<std::vector<double>> relational_vectors(const data::Document& doc, const DocumentGraph& graph,
                                                    const TransEModel& transe);

double relevance(const std::vector<double>& r_i, const std::vector<double>& r_j);

// Rewrites pp_edges to exactly {(i, j) : relevance(r_i, r_j) >= theta}; ps
// and ss edges are kept.
DocumentGraph restructure(const DocumentGraph& graph, const std::vector<std::vector<double>>& relational,
                          double theta);

}  // namespace cder::graph
