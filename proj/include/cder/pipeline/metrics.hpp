#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cder/data/document.hpp"
#include "cder/pipeline/predictor.hpp"

namespace cder::pipeline {

// Micro-averaged counts over (pair, sentence) evidence decisions.
struct EvidenceScore {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  // 0/0 is taken as 0 throughout.
  double precision() const;
  double recall() const;
  double f1() const;
};

struct MetricsReport {
  EvidenceScore pos_evi;
  std::optional<EvidenceScore> evi;

  nlohmann::json to_json() const;
};

// Scores predicted evidence on gold positive pairs only. A positive pair
// with no prediction counts as an empty evidence set; predictions for
// other pairs are ignored. Throws ValidationError for an unknown title.
EvidenceScore evaluate_pos_evi(const std::vector<EvidencePrediction>& predictions,
                               const std::vector<data::Document>& gold);

// A pair an external relation extractor predicted.
struct PredictedPair {
  std::string title;
  std::size_t head = 0;
  std::size_t tail = 0;
  std::string relation;
};

// [{title, h_idx, t_idx, r}]. Throws ConfigError if the file is missing.
std::vector<PredictedPair> read_predicted_pairs(const std::filesystem::path& path);

// Scores evidence on the externally predicted pairs, each (title, head,
// tail) counted once. Gold is the union of evidence over the gold facts of
// that pair, empty when the pair is not positive.
EvidenceScore evaluate_evi(const std::vector<EvidencePrediction>& predictions, const std::vector<data::Document>& gold,
                           const std::vector<PredictedPair>& pairs);

}  // namespace cder::pipeline
