#include "cder/pipeline/checkpoint.hpp"

#include <fstream>

#include "cder/errors.hpp"

namespace cder::pipeline {

namespace {
constexpr const char* kFormat = "cder-checkpoint";
constexpr int kVersion = 1;
}  // namespace

nlohmann::json checkpoint_to_json(const Checkpoint& c) {
  auto config = to_json(c.config);
  config["relation-dim"] = c.config.model.relation_dim;
  return {{"format", kFormat},
          {"version", kVersion},
          {"config", config},
          {"params", c.params.to_json()},
          {"transe", c.transe.to_json()}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != kFormat) throw ParseError("not a checkpoint");
    if (j.at("version") != kVersion) throw ParseError("unsupported checkpoint version");
    Checkpoint c;
    auto config = j.at("config");
    const auto relation_dim = config.at("relation-dim").get<std::size_t>();
    config.erase("relation-dim");
    apply_json(c.config, config);
    c.config.model.relation_dim = relation_dim;
    c.params = model::ModelParams::from_json(j.at("params"), c.config.model);
    c.transe = graph::TransEModel::from_json(j.at("transe"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint '" + path.string() + "'");
  const auto bytes = nlohmann::json::to_cbor(checkpoint_to_json(checkpoint));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint '" + path.string() + "'");
  try {
    return checkpoint_from_json(nlohmann::json::from_cbor(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace cder::pipeline
