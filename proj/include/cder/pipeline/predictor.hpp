#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cder/data/document.hpp"
#include "cder/encoding/providers.hpp"
#include "cder/graph/transe.hpp"
#include "cder/model/params.hpp"

namespace cder::pipeline {

struct EvidencePrediction {
  std::string title;
  std::size_t head = 0;
  std::size_t tail = 0;
  std::vector<double> probs;          // one per sentence
  std::vector<std::size_t> evidence;  // sentences with prob >= threshold, ascending
};

// Which pair nodes the inference graph holds. kAll is the deployable
// setting; kPositive uses the gold positive pairs, as the graph does in
// training, and needs labelled documents.
enum class PairNodes { kAll, kPositive };

struct PredictOptions {
  PairNodes pair_nodes = PairNodes::kAll;
  double theta = 0.5;
  double decision_threshold = 0.5;
  bool static_structure = false;
  std::size_t workers = 1;
};

// One prediction per pair node of every document, in document order and
// then in graph pair order. With PairNodes::kAll that is every ordered pair
// of distinct entities.
std::vector<EvidencePrediction> predict(const model::ModelParams& params, const model::ModelConfig& config,
                                        const graph::TransEModel& transe, const std::vector<data::Document>& corpus,
                                        const encoding::EmbeddingProvider& provider, const PredictOptions& options);

// [{title, h_idx, t_idx, probs, evidence}]
nlohmann::json predictions_to_json(const std::vector<EvidencePrediction>& predictions);
std::vector<EvidencePrediction> predictions_from_json(const nlohmann::json& j);

PairNodes parse_pair_nodes(const std::string& name);  // "all" | "positive"

}  // namespace cder::pipeline
