#pragma once

#include <optional>
#include <vector>

#include "cder/autodiff/tensor.hpp"
#include "cder/model/params.hpp"

namespace cder::model {

// h = W_outer (W_inner x) for every row x of `features` -> [rows x d_a].
ad::Tensor project(const ad::Tensor& features, const ad::Tensor& inner, const ad::Tensor& outer);

// Attention of one query over its neighbours for one head:
// softmax_j LeakyReLU(W_c2 W_c1 query . W_s2 W_s1 neighbour_j).
// Returns std::nullopt for an empty neighbour set (no contribution).
std::optional<ad::Tensor> epgat_attention(const ad::Tensor& query, const ad::Tensor& neighbors,
                                          const AttentionHead& head, double slope = ad::kDefaultLeakySlope);

// Batched logits LeakyReLU(h_q . h_k) for all (query, key) pairs -> [m x n].
ad::Tensor attention_logits(const ad::Tensor& queries, const ad::Tensor& keys, const AttentionHead& head,
                            double slope = ad::kDefaultLeakySlope);

// [sum_heads sum_j w_hj * v_j + bias] / (H * |N|) for one node; nullopt if |N| = 0.
std::optional<ad::Tensor> epgat_aggregate(const ad::Tensor& neighbor_values, const std::vector<ad::Tensor>& head_weights,
                                          const ad::Tensor& bias);

// Batched form. head_weights are [m x n] matrices over the same mask;
// rows with no neighbour come out as zeros (the caller masks them).
ad::Tensor aggregate_rows(const std::vector<ad::Tensor>& head_weights, const ad::Tensor& values,
                          const ad::Tensor& bias, const std::vector<std::size_t>& neighbor_counts);

// Symmetrically normalised adjacency with self loops, D^-1/2 (A + I) D^-1/2.
std::vector<double> normalized_adjacency(const std::vector<double>& adjacency, std::size_t n);
// X' = N X W + b.
ad::Tensor gcn_layer(const ad::Tensor& features, const std::vector<double>& adjacency, const GcnParams& params);

// Mean of LeakyReLU over the members present: prev always, the two
// sub-graph outputs only when given.
ad::Tensor fuse_layer(const ad::Tensor& prev, const std::optional<ad::Tensor>& first,
                      const std::optional<ad::Tensor>& second, double slope = ad::kDefaultLeakySlope);
// Batched: rows of `first`/`second` count only where the matching flag is true.
ad::Tensor fuse_rows(const ad::Tensor& prev, const ad::Tensor& first, const std::vector<bool>& has_first,
                     const ad::Tensor& second, const std::vector<bool>& has_second,
                     double slope = ad::kDefaultLeakySlope);

// Mean of the per-layer representations 1..L.
ad::Tensor final_rep(const std::vector<ad::Tensor>& layer_reps);

// sigma(s^T W_er p + b_er) for one (sentence, pair).
ad::Tensor evidence_prob(const ad::Tensor& sentence, const ad::Tensor& pair, const ad::Tensor& W_er,
                         const ad::Tensor& b_er);
// All pairs against all sentences -> [pairs x sentences].
ad::Tensor evidence_probs(const ad::Tensor& sentences, const ad::Tensor& pairs, const ad::Tensor& W_er,
                          const ad::Tensor& b_er);

}  // namespace cder::model
