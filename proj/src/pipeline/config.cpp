#include "cder/pipeline/config.hpp"

#include "cder/errors.hpp"

namespace cder::pipeline {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size_train == 0 || batch_size_eval == 0) throw ConfigError("batch sizes must be positive");
  if (lr_encoder < 0 || lr_other < 0) throw ConfigError("learning rates must be nonnegative");
  if (warmup_fraction < 0 || warmup_fraction > 1) throw ConfigError("warmup fraction must lie in [0, 1]");
  if (max_grad_norm <= 0) throw ConfigError("max gradient norm must be positive");
  if (theta < 0) throw ConfigError("theta must be >= 0");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  focal.validate();
  model.validate();
  if (model.relation_dim != transe.dim) throw ConfigError("model relation dimension must equal the TransE dimension");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch-size-train", c.batch_size_train},
          {"batch-size-eval", c.batch_size_eval},
          {"lr-encoder", c.lr_encoder},
          {"lr-other", c.lr_other},
          {"warmup-fraction", c.warmup_fraction},
          {"max-grad-norm", c.max_grad_norm},
          {"weight-decay", c.weight_decay},
          {"seed", c.seed},
          {"theta", c.theta},
          {"alpha", c.focal.alpha},
          {"gamma", c.focal.gamma},
          {"decision-threshold", c.decision_threshold},
          {"workers", c.workers},
          {"d", c.model.dim},
          {"L", c.model.layers},
          {"H", c.model.heads},
          {"d-a", c.model.attention_dim},
          {"leaky-slope", c.model.leaky_slope},
          {"uniform-p2s", c.model.ablations.uniform_p2s},
          {"uniform-p2p", c.model.ablations.uniform_p2p},
          {"raw-unit-weights", c.model.ablations.raw_unit_weights},
          {"static-structure", c.model.ablations.static_structure},
          {"use-bce", c.model.ablations.use_bce},
          {"transe-dim", c.transe.dim},
          {"transe-margin", c.transe.margin},
          {"transe-epochs", c.transe.epochs},
          {"transe-lr", c.transe.learning_rate},
          {"transe-negatives", c.transe.negatives_per_positive},
          {"provider", c.provider},
          {"embeddings", c.embeddings.string()}};
}

void apply_json(TrainConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "batch-size-train") c.batch_size_train = value.get<std::size_t>();
      else if (key == "batch-size-eval") c.batch_size_eval = value.get<std::size_t>();
      else if (key == "lr-encoder") c.lr_encoder = value.get<double>();
      else if (key == "lr-other") c.lr_other = value.get<double>();
      else if (key == "warmup-fraction") c.warmup_fraction = value.get<double>();
      else if (key == "max-grad-norm") c.max_grad_norm = value.get<double>();
      else if (key == "weight-decay") c.weight_decay = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "theta") c.theta = value.get<double>();
      else if (key == "alpha") c.focal.alpha = value.get<double>();
      else if (key == "gamma") c.focal.gamma = value.get<double>();
      else if (key == "decision-threshold") c.decision_threshold = value.get<double>();
      else if (key == "workers") c.workers = value.get<std::size_t>();
      else if (key == "d") c.model.dim = value.get<std::size_t>();
      else if (key == "L") c.model.layers = value.get<std::size_t>();
      else if (key == "H") c.model.heads = value.get<std::size_t>();
      else if (key == "d-a") c.model.attention_dim = value.get<std::size_t>();
      else if (key == "leaky-slope") c.model.leaky_slope = value.get<double>();
      else if (key == "uniform-p2s") c.model.ablations.uniform_p2s = value.get<bool>();
      else if (key == "uniform-p2p") c.model.ablations.uniform_p2p = value.get<bool>();
      else if (key == "raw-unit-weights") c.model.ablations.raw_unit_weights = value.get<bool>();
      else if (key == "static-structure") c.model.ablations.static_structure = value.get<bool>();
      else if (key == "use-bce") c.model.ablations.use_bce = value.get<bool>();
      else if (key == "transe-dim") c.transe.dim = c.model.relation_dim = value.get<std::size_t>();
      else if (key == "transe-margin") c.transe.margin = value.get<double>();
      else if (key == "transe-epochs") c.transe.epochs = value.get<std::size_t>();
      else if (key == "transe-lr") c.transe.learning_rate = value.get<double>();
      else if (key == "transe-negatives") c.transe.negatives_per_positive = value.get<std::size_t>();
      else if (key == "provider") c.provider = value.get<std::string>();
      else if (key == "embeddings") c.embeddings = value.get<std::string>();
      else throw ConfigError("unknown configuration key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("configuration key '" + key + "': " + e.what());
    }
  }
}

}  // namespace cder::pipeline
