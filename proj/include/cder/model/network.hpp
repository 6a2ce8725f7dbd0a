#pragma once

#include <vector>

#include "cder/autodiff/tensor.hpp"
#include "cder/encoding/representations.hpp"
#include "cder/graph/document_graph.hpp"
#include "cder/model/params.hpp"

namespace cder::model {

// Everything parameter-free the forward pass needs for one document.
struct GraphInputs {
  const encoding::DocumentFeatures* features = nullptr;
  graph::DocumentGraph graph;
  ad::Tensor pair_features;  // [pairs x 3d] rows [e_h; e_t; c]
  ad::Tensor contexts;       // [pairs x d] localized contexts
  ad::Tensor relational;     // [pairs x k] TransE relational vectors
};

GraphInputs make_graph_inputs(const encoding::DocumentFeatures& features, graph::DocumentGraph graph,
                              const std::vector<std::vector<double>>& relational);

// Per-layer internals, recorded when a trace is requested.
struct LayerTrace {
  std::vector<ad::Tensor> pair_from_sentence;  // per head [pairs x sentences]
  std::vector<ad::Tensor> sentence_from_pair;  // per head [sentences x pairs]
  std::vector<ad::Tensor> pair_from_pair;      // per head [pairs x pairs]
  ad::Tensor pairs;
  ad::Tensor sentences;
};

struct ForwardTrace {
  ad::Tensor initial_pairs;
  ad::Tensor initial_sentences;
  std::vector<LayerTrace> layers;
  ad::Tensor final_pairs;
  ad::Tensor final_sentences;
};

// Evidence probabilities [pairs x sentences] for every (pair node, sentence
// node) of the graph. Each layer runs pair<->sentence attention in both
// directions, pair<->pair attention, a GCN over sentences, then fuses.
ad::Tensor forward(const GraphInputs& inputs, const ModelParams& params, const ModelConfig& config,
                   ForwardTrace* trace = nullptr);

}  // namespace cder::model
