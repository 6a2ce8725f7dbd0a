#include "cder/encoding/representations.hpp"

#include "cder/autodiff/init.hpp"
#include "cder/autodiff/ops.hpp"
#include "cder/errors.hpp"

namespace cder::encoding {

EncoderParams EncoderParams::init(std::size_t dim, std::mt19937_64& rng) {
  return {ad::xavier_uniform(dim, 3 * dim, rng), ad::zeros_parameter({dim})};
}

ad::Tensor entity_embedding(std::size_t entity, const EmbeddingBundle& bundle, const data::MarkedDocument& marked) {
  return ad::logsumexp(ad::gather_rows(bundle.H, marked.entity_marker_indices(entity)), 0);
}

ContextWeights context_weights(std::size_t head, std::size_t tail, const EmbeddingBundle& bundle,
                               const data::MarkedDocument& marked) {
  const std::size_t n = bundle.tokens();
  const auto mean_attention = [&](std::size_t entity) {
    std::vector<double> a(n, 0.0);
    std::size_t count = 0;
    for (std::size_t m = 0; m < marked.mention_entity.size(); ++m) {
      if (marked.mention_entity[m] != entity) continue;
      const auto& row = bundle.attention[m];
      for (std::size_t i = 0; i < n; ++i) a[i] += row[i];
      ++count;
    }
    for (double& v : a) v /= static_cast<double>(count);
    return a;
  };
  const auto a_h = mean_attention(head);
  const auto a_t = mean_attention(tail);

  ContextWeights w;
  w.q.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (w.q[i] = a_h[i] * a_t[i]);
  if (total <= kContextEpsilon) {
    w.fallback = true;
    std::fill(w.q.begin(), w.q.end(), 1.0 / static_cast<double>(n));
    return w;
  }
  for (double& v : w.q) v /= total;
  return w;
}

ad::Tensor localized_context(std::size_t head, std::size_t tail, const EmbeddingBundle& bundle,
                             const data::MarkedDocument& marked) {
  const auto w = context_weights(head, tail, bundle, marked);
  const std::size_t n = bundle.tokens();
  const ad::Tensor q = ad::Tensor::from({1, n}, w.q);
  return ad::reshape(ad::matmul(q, bundle.H), {bundle.dim()});
}

ad::Tensor pair_rep(const ad::Tensor& e_h, const ad::Tensor& e_t, const ad::Tensor& c, const EncoderParams& params) {
  const auto x = ad::concat({e_h, e_t, c}, 0);
  const auto projected = ad::matmul(params.W_p, ad::reshape(x, {x.size(), 1}));
  return ad::tanh(ad::add(ad::reshape(projected, {params.b_p.size()}), params.b_p));
}

ad::Tensor pair_reps(const ad::Tensor& features, const EncoderParams& params) {
  return ad::tanh(ad::add_row(ad::matmul(features, ad::transpose(params.W_p)), params.b_p));
}

ad::Tensor sentence_rep(std::size_t sentence, const EmbeddingBundle& bundle, const data::MarkedDocument& marked) {
  const auto [start, end] = marked.sentence_spans.at(sentence);
  if (start >= end) throw ValidationError("sentence " + std::to_string(sentence) + " has an empty span");
  std::vector<std::size_t> rows(end - start);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = start + i;
  return ad::mean(ad::gather_rows(bundle.H, rows), 0);
}

ad::Tensor DocumentFeatures::pair_contexts(const std::vector<data::EntityPair>& pairs) const {
  const std::size_t n = bundle->tokens();
  std::vector<double> Q;
  Q.reserve(pairs.size() * n);
  for (const auto& [h, t] : pairs) {
    const auto w = context_weights(h, t, *bundle, *marked);
    Q.insert(Q.end(), w.q.begin(), w.q.end());
  }
  return ad::matmul(ad::Tensor::from({pairs.size(), n}, std::move(Q)), bundle->H);
}

ad::Tensor DocumentFeatures::pair_features(const std::vector<data::EntityPair>& pairs) const {
  std::vector<std::size_t> heads, tails;
  for (const auto& [h, t] : pairs) {
    heads.push_back(h);
    tails.push_back(t);
  }
  return ad::concat({ad::gather_rows(entities, heads), ad::gather_rows(entities, tails), pair_contexts(pairs)}, 1);
}

DocumentFeatures compute_features(const data::Document& doc, const EmbeddingBundle& bundle,
                                  const data::MarkedDocument& marked) {
  DocumentFeatures f;
  f.bundle = &bundle;
  f.marked = &marked;
  std::vector<ad::Tensor> entities, sentences;
  for (std::size_t e = 0; e < doc.entities.size(); ++e) entities.push_back(entity_embedding(e, bundle, marked));
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) sentences.push_back(sentence_rep(s, bundle, marked));
  f.entities = ad::stack_rows(entities);
  f.sentences = ad::stack_rows(sentences);
  return f;
}

}  // namespace cder::encoding
