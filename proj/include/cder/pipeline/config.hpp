#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "cder/graph/transe.hpp"
#include "cder/model/loss.hpp"
#include "cder/model/params.hpp"

namespace cder::pipeline {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size_train = 4;
  std::size_t batch_size_eval = 1;
  double lr_encoder = 5e-5;  // W_p, b_p
  double lr_other = 1e-4;    // graph layers and classifier
  double warmup_fraction = 0.06;
  double max_grad_norm = 1.0;
  double weight_decay = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  double theta = 0.5;               // pair-edge relevance threshold
  model::FocalParams focal;         // alpha 0.25, gamma 2
  double decision_threshold = 0.5;  // evidence cutoff on P(s|p)
  std::size_t workers = 1;          // evaluation threads

  model::ModelConfig model;
  graph::TransEConfig transe;

  std::string provider = "toy";
  std::filesystem::path embeddings;

  void validate() const;
};

// Keys are the kebab-case flag names (e.g. "lr-encoder", "batch-size-train").
nlohmann::json to_json(const TrainConfig& config);
// Applies every recognised key present in `j`; unknown keys are a ConfigError.
void apply_json(TrainConfig& config, const nlohmann::json& j);

}  // namespace cder::pipeline
