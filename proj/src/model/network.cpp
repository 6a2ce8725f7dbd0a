#include "cder/model/network.hpp"

#include "cder/autodiff/ops.hpp"
#include "cder/errors.hpp"
#include "cder/model/layers.hpp"

namespace cder::model {

namespace {

std::vector<std::size_t> row_counts(const std::vector<double>& mask, std::size_t rows, std::size_t cols) {
  std::vector<std::size_t> counts(rows, 0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) counts[i] += mask[i * cols + j] != 0.0;
  return counts;
}

std::vector<bool> nonzero(const std::vector<std::size_t>& counts) {
  std::vector<bool> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] > 0;
  return out;
}

// Attention replaced by fixed weights: 1/|N| (or 1) on every neighbour.
ad::Tensor uniform_weights(const std::vector<double>& mask, std::size_t rows, std::size_t cols, bool raw) {
  std::vector<double> w(mask);
  const auto counts = row_counts(mask, rows, cols);
  if (!raw) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (counts[i]) w[i * cols + j] /= static_cast<double>(counts[i]);
  }
  return ad::Tensor::from({rows, cols}, std::move(w));
}

}  // namespace

GraphInputs make_graph_inputs(const encoding::DocumentFeatures& features, graph::DocumentGraph graph,
                              const std::vector<std::vector<double>>& relational) {
  GraphInputs in;
  in.features = &features;
  const std::size_t pairs = graph.pair_count();
  if (relational.size() != pairs) throw DimensionError("make_graph_inputs: one relational vector per pair required");
  if (pairs > 0) {
    in.pair_features = features.pair_features(graph.pair_nodes);
    in.contexts = features.pair_contexts(graph.pair_nodes);
    const std::size_t k = relational.front().size();
    std::vector<double> r;
    r.reserve(pairs * k);
    for (const auto& v : relational) r.insert(r.end(), v.begin(), v.end());
    in.relational = ad::Tensor::from({pairs, k}, std::move(r));
  }
  in.graph = std::move(graph);
  return in;
}

ad::Tensor forward(const GraphInputs& inputs, const ModelParams& params, const ModelConfig& config,
                   ForwardTrace* trace) {
  const auto& g = inputs.graph;
  const std::size_t np = g.pair_count();
  const std::size_t ns = g.sentence_count();
  if (np == 0) return ad::Tensor::zeros({0, ns});
  if (params.layers.size() != config.layers) throw ConfigError("forward: parameter layer count differs from config");
  const double slope = config.leaky_slope;
  const auto& ablate = config.ablations;

  const auto ps_mask = g.ps_mask();
  const auto sp_mask = g.sp_mask();
  const auto pp_mask = g.pp_mask();
  const auto ss_adj = g.ss_adjacency();
  const auto ps_counts = row_counts(ps_mask, np, ns);
  const auto sp_counts = row_counts(sp_mask, ns, np);
  const auto pp_counts = row_counts(pp_mask, np, np);
  const auto ss_counts = row_counts(ss_adj, ns, ns);

  ad::Tensor pairs = encoding::pair_reps(inputs.pair_features, params.encoder);
  ad::Tensor sentences = inputs.features->sentences;
  if (trace) {
    trace->initial_pairs = pairs;
    trace->initial_sentences = sentences;
    trace->layers.clear();
  }

  std::vector<ad::Tensor> pair_layers, sentence_layers;
  for (const auto& layer : params.layers) {
    LayerTrace lt;
    for (std::size_t h = 0; h < layer.ps_heads.size(); ++h) {
      if (ablate.uniform_p2s) {
        lt.pair_from_sentence.push_back(uniform_weights(ps_mask, np, ns, ablate.raw_unit_weights));
        lt.sentence_from_pair.push_back(uniform_weights(sp_mask, ns, np, ablate.raw_unit_weights));
      } else {
        const auto logits = attention_logits(inputs.contexts, sentences, layer.ps_heads[h], slope);
        lt.pair_from_sentence.push_back(ad::masked_softmax_rows(logits, ps_mask));
        lt.sentence_from_pair.push_back(ad::masked_softmax_rows(ad::transpose(logits), sp_mask));
      }
    }
    for (std::size_t h = 0; h < layer.pp_heads.size(); ++h) {
      if (ablate.uniform_p2p) {
        lt.pair_from_pair.push_back(uniform_weights(pp_mask, np, np, ablate.raw_unit_weights));
      } else {
        const auto logits = attention_logits(inputs.relational, inputs.relational, layer.pp_heads[h], slope);
        lt.pair_from_pair.push_back(ad::masked_softmax_rows(logits, pp_mask));
      }
    }

    const auto pair_ps = aggregate_rows(lt.pair_from_sentence, sentences, layer.ps_pair_bias, ps_counts);
    const auto sentence_ps = aggregate_rows(lt.sentence_from_pair, pairs, layer.ps_sentence_bias, sp_counts);
    const auto pair_pp = aggregate_rows(lt.pair_from_pair, pairs, layer.pp_bias, pp_counts);
    const auto sentence_ss = gcn_layer(sentences, ss_adj, layer.gcn);

    const auto next_pairs = fuse_rows(pairs, pair_ps, nonzero(ps_counts), pair_pp, nonzero(pp_counts), slope);
    const auto next_sentences =
        fuse_rows(sentences, sentence_ps, nonzero(sp_counts), sentence_ss, nonzero(ss_counts), slope);
    pairs = next_pairs;
    sentences = next_sentences;
    pair_layers.push_back(pairs);
    sentence_layers.push_back(sentences);
    if (trace) {
      lt.pairs = pairs;
      lt.sentences = sentences;
      trace->layers.push_back(std::move(lt));
    }
  }

  const auto final_pairs = final_rep(pair_layers);
  const auto final_sentences = final_rep(sentence_layers);
  if (trace) {
    trace->final_pairs = final_pairs;
    trace->final_sentences = final_sentences;
  }
  return evidence_probs(final_sentences, final_pairs, params.W_er, params.b_er);
}

}  // namespace cder::model
