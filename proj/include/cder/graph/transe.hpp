#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cder/data/document.hpp"

namespace cder::graph {

struct TransEConfig {
  std::size_t dim = 100;
  double margin = 1.0;
  std::size_t epochs = 200;
  std::size_t negatives_per_positive = 1;
  double learning_rate = 0.01;
  int norm_order = 2;  // 1 or 2
  std::uint64_t seed = 1;
};

// (head, relation, tail) with corpus-global ids.
struct Triple {
  std::size_t head = 0;
  std::size_t relation = 0;
  std::size_t tail = 0;
};

// Translation embedding: head + relation ~ tail.
struct TransEModel {
  std::size_t dim = 0;
  double margin = 1.0;
  int norm_order = 2;
  std::vector<std::vector<double>> entity_vectors;
  std::vector<std::vector<double>> relation_vectors;
  std::unordered_map<std::string, std::size_t> entity_ids;
  std::unordered_map<std::string, std::size_t> relation_ids;

  double distance(const std::vector<double>& h, const std::vector<double>& r, const std::vector<double>& t) const;
  // Known entity vector, or the mean entity vector for unseen names.
  std::vector<double> entity_vector(const std::string& name) const;
  std::vector<double> mean_entity_vector() const;

  nlohmann::json to_json() const;
  static TransEModel from_json(const nlohmann::json& j);
};

// Hinge loss max(0, margin + d(pos) - d(neg)).
double margin_ranking_loss(double margin, double positive_distance, double negative_distance);

// Facts of a corpus with entities keyed globally by name.
struct TripleSet {
  std::vector<Triple> triples;
  std::unordered_map<std::string, std::size_t> entity_ids;
  std::unordered_map<std::string, std::size_t> relation_ids;
};
TripleSet collect_triples(const std::vector<data::Document>& corpus);

// SGD on the margin ranking loss with uniform head-or-tail corruption;
// entity vectors are renormalised to unit L2 norm after every update.
// Throws ConfigError when there are no triples.
TransEModel train_transe(const TripleSet& triples, const TransEConfig& config);
TransEModel train_transe(const std::vector<data::Document>& corpus, const TransEConfig& config);

// Mean margin loss of every triple against its own corruptions (diagnostic).
double transe_mean_loss(const TransEModel& model, const std::vector<Triple>& triples, std::uint64_t seed);

}  // namespace cder::graph
