#include "cder/model/params.hpp"

#include "cder/autodiff/init.hpp"
#include "cder/errors.hpp"

namespace cder::model {

std::size_t ModelConfig::projection_dim() const { return attention_dim ? attention_dim : dim / heads; }

void ModelConfig::validate() const {
  if (dim == 0) throw ConfigError("model dimension d must be positive");
  if (layers < 1) throw ConfigError("layer count L must be >= 1");
  if (heads < 1) throw ConfigError("head count H must be >= 1");
  if (relation_dim == 0) throw ConfigError("relation dimension must be positive");
  if (projection_dim() == 0) throw ConfigError("attention width d/H is zero; lower H or set attention_dim");
}

namespace {

std::vector<AttentionHead> make_heads(std::size_t count, std::size_t width, std::size_t query_dim,
                                      std::size_t key_dim, std::mt19937_64& rng) {
  std::vector<AttentionHead> heads;
  for (std::size_t h = 0; h < count; ++h) {
    heads.push_back({ad::xavier_uniform(width, query_dim, rng), ad::xavier_uniform(width, width, rng),
                     ad::xavier_uniform(width, key_dim, rng), ad::xavier_uniform(width, width, rng)});
  }
  return heads;
}

void append_heads(std::vector<ad::Tensor>& out, const std::vector<AttentionHead>& heads) {
  for (const auto& h : heads) {
    out.insert(out.end(), {h.query_inner, h.query_outer, h.key_inner, h.key_outer});
  }
}

nlohmann::json tensor_json(const ad::Tensor& t) {
  return {{"shape", t.shape()}, {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

void load_tensor(ad::Tensor& t, const nlohmann::json& j) {
  const auto shape = j.at("shape").get<ad::Shape>();
  if (shape != t.shape()) {
    throw ConfigError("checkpoint tensor shape " + ad::to_string(shape) + " does not match model shape " +
                      ad::to_string(t.shape()));
  }
  const auto data = j.at("data").get<std::vector<double>>();
  std::copy(data.begin(), data.end(), t.mutable_data().begin());
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& config, std::mt19937_64& rng) {
  config.validate();
  const std::size_t d = config.dim;
  const std::size_t width = config.projection_dim();
  ModelParams p;
  p.encoder = encoding::EncoderParams::init(d, rng);
  for (std::size_t l = 0; l < config.layers; ++l) {
    LayerParams layer;
    layer.ps_heads = make_heads(config.heads, width, d, d, rng);
    layer.ps_pair_bias = ad::zeros_parameter({d});
    layer.ps_sentence_bias = ad::zeros_parameter({d});
    layer.pp_heads = make_heads(config.heads, width, config.relation_dim, config.relation_dim, rng);
    layer.pp_bias = ad::zeros_parameter({d});
    layer.gcn = {ad::xavier_uniform(d, d, rng), ad::zeros_parameter({d})};
    p.layers.push_back(std::move(layer));
  }
  p.W_er = ad::xavier_uniform(d, d, rng);
  p.b_er = ad::zeros_parameter({1});
  return p;
}

std::vector<ad::Tensor> ModelParams::encoder_parameters() const { return encoder.parameters(); }

std::vector<ad::Tensor> ModelParams::graph_parameters() const {
  std::vector<ad::Tensor> out;
  for (const auto& layer : layers) {
    append_heads(out, layer.ps_heads);
    out.insert(out.end(), {layer.ps_pair_bias, layer.ps_sentence_bias});
    append_heads(out, layer.pp_heads);
    out.push_back(layer.pp_bias);
    out.insert(out.end(), {layer.gcn.W, layer.gcn.b});
  }
  out.insert(out.end(), {W_er, b_er});
  return out;
}

std::vector<ad::Tensor> ModelParams::parameters() const {
  auto out = encoder_parameters();
  auto rest = graph_parameters();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

nlohmann::json ModelParams::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : parameters()) arr.push_back(tensor_json(t));
  return arr;
}

ModelParams ModelParams::from_json(const nlohmann::json& j, const ModelConfig& config) {
  std::mt19937_64 rng(0);
  ModelParams p = init(config, rng);
  auto params = p.parameters();
  if (j.size() != params.size()) {
    throw ConfigError("checkpoint has " + std::to_string(j.size()) + " tensors, model expects " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) load_tensor(params[i], j[i]);
  return p;
}

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"d", c.dim},
          {"relation_dim", c.relation_dim},
          {"L", c.layers},
          {"H", c.heads},
          {"d_a", c.attention_dim},
          {"leaky_slope", c.leaky_slope},
          {"uniform_p2s", c.ablations.uniform_p2s},
          {"uniform_p2p", c.ablations.uniform_p2p},
          {"raw_unit_weights", c.ablations.raw_unit_weights},
          {"static_structure", c.ablations.static_structure},
          {"use_bce", c.ablations.use_bce}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.dim = j.at("d").get<std::size_t>();
  c.relation_dim = j.at("relation_dim").get<std::size_t>();
  c.layers = j.at("L").get<std::size_t>();
  c.heads = j.at("H").get<std::size_t>();
  c.attention_dim = j.at("d_a").get<std::size_t>();
  c.leaky_slope = j.at("leaky_slope").get<double>();
  c.ablations.uniform_p2s = j.at("uniform_p2s").get<bool>();
  c.ablations.uniform_p2p = j.at("uniform_p2p").get<bool>();
  c.ablations.raw_unit_weights = j.at("raw_unit_weights").get<bool>();
  c.ablations.static_structure = j.at("static_structure").get<bool>();
  c.ablations.use_bce = j.at("use_bce").get<bool>();
  return c;
}

}  // namespace cder::model
