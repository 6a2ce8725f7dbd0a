#pragma once

#include <random>
#include <vector>

#include "cder/autodiff/tensor.hpp"
#include "cder/data/document.hpp"
#include "cder/data/markers.hpp"
#include "cder/encoding/bundle.hpp"

namespace cder::encoding {

inline constexpr double kContextEpsilon = 1e-12;

// Projection W_p [d x 3d], b_p [d] mapping (head, tail, context) to a pair vector.
struct EncoderParams {
  ad::Tensor W_p;
  ad::Tensor b_p;

  static EncoderParams init(std::size_t dim, std::mt19937_64& rng);
  std::vector<ad::Tensor> parameters() const { return {W_p, b_p}; }
};

// logsumexp over the opening-marker embeddings of the entity's mentions.
ad::Tensor entity_embedding(std::size_t entity, const EmbeddingBundle& bundle, const data::MarkedDocument& marked);

// Normalised product of mean head and tail attentions; c = H^T q.
struct ContextWeights {
  std::vector<double> q;  // sums to 1
  bool fallback = false;  // supports were disjoint, q is uniform
};
ContextWeights context_weights(std::size_t head, std::size_t tail, const EmbeddingBundle& bundle,
                               const data::MarkedDocument& marked);
ad::Tensor localized_context(std::size_t head, std::size_t tail, const EmbeddingBundle& bundle,
                             const data::MarkedDocument& marked);

// tanh(W_p [e_h; e_t; c] + b_p)
ad::Tensor pair_rep(const ad::Tensor& e_h, const ad::Tensor& e_t, const ad::Tensor& c, const EncoderParams& params);
// Batched form: rows of `features` are [e_h; e_t; c] -> [pairs x d].
ad::Tensor pair_reps(const ad::Tensor& features, const EncoderParams& params);

// Mean of H over the sentence's marked span.
ad::Tensor sentence_rep(std::size_t sentence, const EmbeddingBundle& bundle, const data::MarkedDocument& marked);

// Parameter-free quantities of one document, computed once.
struct DocumentFeatures {
  ad::Tensor entities;   // [|E| x d]
  ad::Tensor sentences;  // [|S| x d]
  const EmbeddingBundle* bundle = nullptr;
  const data::MarkedDocument* marked = nullptr;

  // [pairs x 3d] rows of [e_h; e_t; c_{h,t}] and the contexts alone [pairs x d].
  ad::Tensor pair_features(const std::vector<data::EntityPair>& pairs) const;
  ad::Tensor pair_contexts(const std::vector<data::EntityPair>& pairs) const;
};

DocumentFeatures compute_features(const data::Document& doc, const EmbeddingBundle& bundle,
                                  const data::MarkedDocument& marked);

}  // namespace cder::encoding
