#pragma once

#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "cder/autodiff/ops.hpp"
#include "cder/autodiff/tensor.hpp"
#include "cder/encoding/representations.hpp"

namespace cder::model {

// Switches that remove one component each.
struct Ablations {
  bool uniform_p2s = false;       // pair<->sentence attention replaced by uniform weights
  bool uniform_p2p = false;       // pair<->pair attention replaced by uniform weights
  bool raw_unit_weights = false;  // with the two above: weight 1 instead of 1/|N|
  bool static_structure = false;  // keep the shared-entity pair edges, no relevance rewiring
  bool use_bce = false;           // binary cross-entropy instead of focal loss
};

struct ModelConfig {
  std::size_t dim = 32;           // d
  std::size_t relation_dim = 100; // TransE dimension k
  std::size_t layers = 2;         // L
  std::size_t heads = 2;          // H
  std::size_t attention_dim = 0;  // d_a; 0 means d / H
  double leaky_slope = ad::kDefaultLeakySlope;
  Ablations ablations;

  std::size_t projection_dim() const;
  void validate() const;
};

// One attention head: query and key projections, each two stacked matrices.
struct AttentionHead {
  ad::Tensor query_inner;  // W_c1 [d_a x d_query]
  ad::Tensor query_outer;  // W_c2 [d_a x d_a]
  ad::Tensor key_inner;    // W_s1 [d_a x d_key]
  ad::Tensor key_outer;    // W_s2 [d_a x d_a]
};

struct GcnParams {
  ad::Tensor W;  // [d x d]
  ad::Tensor b;  // [d]
};

// Per layer. Pair<->sentence attention shares one head set in both
// directions (queries project pair contexts, keys project sentences).
struct LayerParams {
  std::vector<AttentionHead> ps_heads;
  ad::Tensor ps_pair_bias;      // added to pair updates from sentences
  ad::Tensor ps_sentence_bias;  // added to sentence updates from pairs
  std::vector<AttentionHead> pp_heads;  // both sides project relational vectors
  ad::Tensor pp_bias;
  GcnParams gcn;
};

struct ModelParams {
  encoding::EncoderParams encoder;
  std::vector<LayerParams> layers;
  ad::Tensor W_er;  // [d x d]
  ad::Tensor b_er;  // [1]

  static ModelParams init(const ModelConfig& config, std::mt19937_64& rng);

  // W_p, b_p: the encoder-side learning-rate group.
  std::vector<ad::Tensor> encoder_parameters() const;
  // Everything else.
  std::vector<ad::Tensor> graph_parameters() const;
  std::vector<ad::Tensor> parameters() const;

  nlohmann::json to_json() const;
  // Loads values into freshly shaped parameters matching `config`.
  static ModelParams from_json(const nlohmann::json& j, const ModelConfig& config);
};

nlohmann::json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::json& j);

}  // namespace cder::model
