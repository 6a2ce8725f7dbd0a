#include "cder/model/layers.hpp"

#include <cmath>

#include "cder/autodiff/ops.hpp"
#include "cder/errors.hpp"

namespace cder::model {

ad::Tensor project(const ad::Tensor& features, const ad::Tensor& inner, const ad::Tensor& outer) {
  return ad::matmul(ad::matmul(features, ad::transpose(inner)), ad::transpose(outer));
}

ad::Tensor attention_logits(const ad::Tensor& queries, const ad::Tensor& keys, const AttentionHead& head,
                            double slope) {
  const auto hq = project(queries, head.query_inner, head.query_outer);
  const auto hk = project(keys, head.key_inner, head.key_outer);
  return ad::leaky_relu(ad::matmul(hq, ad::transpose(hk)), slope);
}

std::optional<ad::Tensor> epgat_attention(const ad::Tensor& query, const ad::Tensor& neighbors,
                                          const AttentionHead& head, double slope) {
  if (neighbors.rank() != 2) throw DimensionError("epgat_attention: neighbours must be a matrix");
  const std::size_t k = neighbors.rows();
  if (k == 0) return std::nullopt;
  const auto logits = attention_logits(ad::reshape(query, {1, query.size()}), neighbors, head, slope);
  const auto weights = ad::masked_softmax_rows(logits, std::vector<double>(k, 1.0));
  return ad::reshape(weights, {k});
}

std::optional<ad::Tensor> epgat_aggregate(const ad::Tensor& neighbor_values, const std::vector<ad::Tensor>& head_weights,
                                          const ad::Tensor& bias) {
  const std::size_t k = neighbor_values.rows();
  if (k == 0 || head_weights.empty()) return std::nullopt;
  ad::Tensor total = bias;
  for (const auto& w : head_weights) {
    // messages alpha_j * v_j summed over neighbours
    const auto messages = ad::matmul(ad::reshape(w, {1, k}), neighbor_values);
    total = ad::add(total, ad::reshape(messages, {neighbor_values.cols()}));
  }
  return ad::scale(total, 1.0 / static_cast<double>(head_weights.size() * k));
}

ad::Tensor aggregate_rows(const std::vector<ad::Tensor>& head_weights, const ad::Tensor& values, const ad::Tensor& bias,
                          const std::vector<std::size_t>& neighbor_counts) {
  ad::Tensor total;
  for (const auto& w : head_weights) {
    const auto messages = ad::matmul(w, values);
    total = total.defined() ? ad::add(total, messages) : messages;
  }
  std::vector<double> factors(neighbor_counts.size());
  const double heads = static_cast<double>(head_weights.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    factors[i] = neighbor_counts[i] ? 1.0 / (heads * static_cast<double>(neighbor_counts[i])) : 0.0;
  }
  return ad::scale_rows(ad::add_row(total, bias), factors);
}

std::vector<double> normalized_adjacency(const std::vector<double>& adjacency, std::size_t n) {
  if (adjacency.size() != n * n) throw DimensionError("normalized_adjacency: adjacency is not n x n");
  std::vector<double> a_hat(adjacency);
  for (std::size_t i = 0; i < n; ++i) a_hat[i * n + i] += 1.0;
  std::vector<double> inv_sqrt_degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += a_hat[i * n + j];
    inv_sqrt_degree[i] = 1.0 / std::sqrt(deg);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a_hat[i * n + j] *= inv_sqrt_degree[i] * inv_sqrt_degree[j];
  return a_hat;
}

ad::Tensor gcn_layer(const ad::Tensor& features, const std::vector<double>& adjacency, const GcnParams& params) {
  const std::size_t n = features.rows();
  const auto norm = ad::Tensor::from({n, n}, normalized_adjacency(adjacency, n));
  return ad::add_row(ad::matmul(ad::matmul(norm, features), params.W), params.b);
}

ad::Tensor fuse_layer(const ad::Tensor& prev, const std::optional<ad::Tensor>& first,
                      const std::optional<ad::Tensor>& second, double slope) {
  ad::Tensor total = ad::leaky_relu(prev, slope);
  double count = 1.0;
  for (const auto* member : {&first, &second}) {
    if (!member->has_value()) continue;
    total = ad::add(total, ad::leaky_relu(**member, slope));
    count += 1.0;
  }
  return ad::scale(total, 1.0 / count);
}

ad::Tensor fuse_rows(const ad::Tensor& prev, const ad::Tensor& first, const std::vector<bool>& has_first,
                     const ad::Tensor& second, const std::vector<bool>& has_second, double slope) {
  const std::size_t m = prev.rows();
  std::vector<double> keep_first(m), keep_second(m), inv_count(m);
  for (std::size_t i = 0; i < m; ++i) {
    keep_first[i] = has_first[i] ? 1.0 : 0.0;
    keep_second[i] = has_second[i] ? 1.0 : 0.0;
    inv_count[i] = 1.0 / (1.0 + keep_first[i] + keep_second[i]);
  }
  auto total = ad::leaky_relu(prev, slope);
  total = ad::add(total, ad::scale_rows(ad::leaky_relu(first, slope), keep_first));
  total = ad::add(total, ad::scale_rows(ad::leaky_relu(second, slope), keep_second));
  return ad::scale_rows(total, inv_count);
}

ad::Tensor final_rep(const std::vector<ad::Tensor>& layer_reps) {
  if (layer_reps.empty()) throw DomainError("final_rep: no layers");
  ad::Tensor total = layer_reps.front();
  for (std::size_t l = 1; l < layer_reps.size(); ++l) total = ad::add(total, layer_reps[l]);
  return ad::scale(total, 1.0 / static_cast<double>(layer_reps.size()));
}

ad::Tensor evidence_prob(const ad::Tensor& sentence, const ad::Tensor& pair, const ad::Tensor& W_er,
                         const ad::Tensor& b_er) {
  const auto wp = ad::reshape(ad::matmul(W_er, ad::reshape(pair, {pair.size(), 1})), {sentence.size()});
  return ad::sigmoid(ad::add(ad::dot(sentence, wp), ad::reshape(b_er, {})));
}

ad::Tensor evidence_probs(const ad::Tensor& sentences, const ad::Tensor& pairs, const ad::Tensor& W_er,
                          const ad::Tensor& b_er) {
  // logits[p, s] = s^T W_er p
  const auto logits = ad::matmul(ad::matmul(pairs, ad::transpose(W_er)), ad::transpose(sentences));
  const auto bias = ad::gather_rows(b_er, std::vector<std::size_t>(sentences.rows(), 0));
  return ad::sigmoid(ad::add_row(logits, bias));
}

}  // namespace cder::model
