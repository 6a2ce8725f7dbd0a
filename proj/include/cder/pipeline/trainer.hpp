#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "cder/data/document.hpp"
#include "cder/data/markers.hpp"
#include "cder/encoding/providers.hpp"
#include "cder/encoding/representations.hpp"
#include "cder/graph/transe.hpp"
#include "cder/model/network.hpp"
#include "cder/pipeline/config.hpp"

namespace cder::pipeline {

// A document with its embeddings and parameter-free features. Held behind a
// pointer because the features point into `marked` and `bundle`.
struct PreparedDocument {
  const data::Document* doc = nullptr;
  data::MarkedDocument marked;
  encoding::EmbeddingBundle bundle;
  encoding::DocumentFeatures features;
};

std::unique_ptr<PreparedDocument> prepare_document(const data::Document& doc,
                                                   const encoding::EmbeddingProvider& provider);

// Graph inputs for one document: static graph in the given mode, TransE
// relational vectors, and relevance rewiring unless `static_structure`.
model::GraphInputs document_inputs(const PreparedDocument& prepared, graph::GraphMode mode,
                                   const graph::TransEModel& transe, double theta, bool static_structure);

// A document ready for training: graph over its positive pairs and the 0/1
// evidence targets for every (pair node, sentence).
struct TrainingExample {
  std::unique_ptr<PreparedDocument> prepared;
  model::GraphInputs inputs;
  std::vector<double> targets;
};

// Loss of one example under the current parameters.
ad::Tensor example_loss(const TrainingExample& example, const model::ModelParams& params, const TrainConfig& config);

struct StepRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double loss = 0.0;  // summed over the batch
  double lr = 0.0;    // lr_other at this step
};

struct TrainResult {
  model::ModelParams params;
  graph::TransEModel transe;
  std::vector<StepRecord> steps;
  std::vector<double> epoch_losses;  // mean per-document loss
  std::size_t skipped_documents = 0;
  std::size_t epochs_run = 0;
};

// Called after each epoch (1-based); returning false stops training.
using EpochCallback = std::function<bool(std::size_t epoch, const model::ModelParams& params)>;

// Trains on `corpus`. When `transe` is empty a TransE model is first trained
// on the corpus facts. Throws LookupError before training if the provider
// lacks any document.
TrainResult train(const TrainConfig& config, const std::vector<data::Document>& corpus,
                  const encoding::EmbeddingProvider& provider, std::optional<graph::TransEModel> transe = {},
                  const EpochCallback& on_epoch = {});

void write_loss_trace(std::ostream& out, const std::vector<StepRecord>& steps);

}  // namespace cder::pipeline
