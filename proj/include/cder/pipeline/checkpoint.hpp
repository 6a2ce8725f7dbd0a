#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "cder/graph/transe.hpp"
#include "cder/model/params.hpp"
#include "cder/pipeline/config.hpp"

namespace cder::pipeline {

// Everything predict needs: the training configuration, trained weights and
// the TransE model the graphs were built with.
struct Checkpoint {
  TrainConfig config;
  model::ModelParams params;
  graph::TransEModel transe;
};

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
// Throws ConfigError when the file is missing, ParseError when malformed.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cder::pipeline
