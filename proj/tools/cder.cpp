// cder: train, predict, eval, build-graph, transe.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cder/data/document.hpp"
#include "cder/encoding/providers.hpp"
#include "cder/errors.hpp"
#include "cder/graph/document_graph.hpp"
#include "cder/graph/transe.hpp"
#include "cder/pipeline/checkpoint.hpp"
#include "cder/pipeline/config.hpp"
#include "cder/pipeline/metrics.hpp"
#include "cder/pipeline/predictor.hpp"
#include "cder/pipeline/trainer.hpp"

using namespace cder;
using nlohmann::json;

namespace {

// Converts a flag or TOML string to the JSON type of the key's default.
json typed_value(const json& like, std::string text, const std::string& key) {
  if (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') && text.back() == text.front())
    text = text.substr(1, text.size() - 2);
  try {
    if (like.is_boolean()) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ConfigError("expected true or false");
    }
    if (like.is_number_unsigned() || like.is_number_integer()) {
      std::size_t used = 0;
      const auto v = std::stoull(text, &used);
      if (used != text.size() || text.front() == '-') throw ConfigError("expected a nonnegative integer");
      return v;
    }
    if (like.is_number_float()) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw ConfigError("expected a number");
      return v;
    }
  } catch (const std::logic_error& e) {
    throw ConfigError("value '" + text + "' for '" + key + "': " + e.what());
  }
  return text;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json read_config_file(const std::filesystem::path& path, const json& defaults) {
  if (path.extension() == ".json") return read_json_file(path);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json out = json::object();
  for (const auto& item : CLI::ConfigTOML().from_config(in)) {
    const std::string key = item.fullname();
    if (key == "++" || key == "--") continue;  // section markers
    if (!defaults.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
    if (item.inputs.size() != 1) throw ConfigError("configuration key '" + key + "' needs one value");
    out[key] = typed_value(defaults.at(key), item.inputs.front(), key);
  }
  return out;
}

// Every TrainConfig key as a --flag, plus --config.
struct ConfigFlags {
  json defaults = pipeline::to_json(pipeline::TrainConfig{});
  std::map<std::string, std::string> values;
  std::string config_path;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "TOML or JSON file with TrainConfig keys");
    for (const auto& [key, value] : defaults.items()) {
      std::ostringstream help;
      help << "default " << value.dump();
      app.add_option("--" + key, values[key], help.str());
    }
  }

  pipeline::TrainConfig resolve(const CLI::App& app) const {
    pipeline::TrainConfig config;
    if (!config_path.empty()) pipeline::apply_json(config, read_config_file(config_path, defaults));
    json overrides = json::object();
    for (const auto& [key, text] : values)
      if (app.count("--" + key) > 0) overrides[key] = typed_value(defaults.at(key), text, key);
    pipeline::apply_json(config, overrides);
    config.validate();
    return config;
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw ConfigError("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

graph::TransEModel load_transe(const std::string& path) {
  try {
    return graph::TransEModel::from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative evidence retrieval for document-level relation extraction"};
  app.require_subcommand(1);

  // transe
  auto* transe_cmd = app.add_subcommand("transe", "Train TransE on the corpus facts");
  ConfigFlags transe_flags;
  std::string transe_corpus, transe_out;
  transe_cmd->add_option("--corpus", transe_corpus, "DocRED-style corpus JSON")->required();
  transe_cmd->add_option("--out", transe_out, "model JSON (default stdout)");
  transe_flags.attach(*transe_cmd);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the evidence model");
  ConfigFlags train_flags;
  std::string train_corpus, train_checkpoint, train_trace, train_transe, train_out;
  train_cmd->add_option("--corpus", train_corpus, "training corpus JSON")->required();
  train_cmd->add_option("--checkpoint", train_checkpoint, "where to write the trained model")->required();
  train_cmd->add_option("--loss-trace", train_trace, "CSV of epoch,step,loss,lr");
  train_cmd->add_option("--transe", train_transe, "pretrained TransE JSON (otherwise trained here)");
  train_cmd->add_option("--out", train_out, "summary JSON (default stdout)");
  train_flags.attach(*train_cmd);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Evidence probabilities for every pair");
  std::string predict_corpus, predict_checkpoint, predict_out, pair_nodes = "all";
  std::optional<double> predict_threshold;
  std::optional<std::size_t> predict_workers;
  predict_cmd->add_option("--corpus", predict_corpus, "corpus JSON")->required();
  predict_cmd->add_option("--checkpoint", predict_checkpoint, "trained model")->required();
  predict_cmd->add_option("--out", predict_out, "predictions JSON (default stdout)");
  predict_cmd->add_option("--pair-nodes", pair_nodes, "all | positive (positive needs gold labels)")
      ->check(CLI::IsMember({"all", "positive"}));
  predict_cmd->add_option("--decision-threshold", predict_threshold, "evidence cutoff on P(s|p)");
  predict_cmd->add_option("--workers", predict_workers, "threads");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Pos Evi F1, and Evi F1 given predicted pairs");
  std::string eval_predictions, eval_gold, eval_pairs, eval_out;
  eval_cmd->add_option("--predictions", eval_predictions, "output of predict")->required();
  eval_cmd->add_option("--gold", eval_gold, "labelled corpus JSON")->required();
  eval_cmd->add_option("--predicted-pairs", eval_pairs, "[{title, h_idx, t_idx, r}] from a relation extractor");
  eval_cmd->add_option("--out", eval_out, "metrics JSON (default stdout)");

  // build-graph
  auto* graph_cmd = app.add_subcommand("build-graph", "Dump document graphs as JSON");
  std::string graph_corpus, graph_transe, graph_out, graph_title, graph_mode = "inference";
  double graph_theta = 0.5;
  graph_cmd->add_option("--corpus", graph_corpus, "corpus JSON")->required();
  graph_cmd->add_option("--transe", graph_transe, "TransE JSON; enables relevance rewiring of pair edges");
  graph_cmd->add_option("--mode", graph_mode, "train | inference")->check(CLI::IsMember({"train", "inference"}));
  graph_cmd->add_option("--theta", graph_theta, "pair-edge relevance threshold");
  graph_cmd->add_option("--title", graph_title, "only this document");
  graph_cmd->add_option("--out", graph_out, "JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*transe_cmd) {
      const auto config = transe_flags.resolve(*transe_cmd);
      const auto corpus = data::parse_corpus(transe_corpus);
      const auto model = graph::train_transe(corpus, config.transe);
      Output out(transe_out);
      out.stream() << model.to_json().dump() << "\n";
    } else if (*train_cmd) {
      if (train_cmd->count("--seed") == 0) throw ConfigError("train needs --seed");
      const auto config = train_flags.resolve(*train_cmd);
      const auto corpus = data::parse_corpus(train_corpus);
      const auto provider = encoding::make_provider(config.provider, config.model.dim, config.embeddings);
      std::optional<graph::TransEModel> transe;
      if (!train_transe.empty()) transe = load_transe(train_transe);
      auto result = pipeline::train(config, corpus, *provider, transe, [](std::size_t epoch, const model::ModelParams&) {
        std::cerr << "epoch " << epoch << " done\n";
        return true;
      });
      pipeline::save_checkpoint({config, result.params, result.transe}, train_checkpoint);
      if (!train_trace.empty()) {
        std::ofstream trace(train_trace);
        if (!trace) throw ConfigError("cannot write '" + train_trace + "'");
        pipeline::write_loss_trace(trace, result.steps);
      }
      json summary = {{"epochs", result.epochs_run},
                      {"steps", result.steps.size()},
                      {"skipped_documents", result.skipped_documents},
                      {"epoch_losses", result.epoch_losses},
                      {"checkpoint", train_checkpoint}};
      Output out(train_out);
      out.stream() << summary.dump(2) << "\n";
    } else if (*predict_cmd) {
      const auto checkpoint = pipeline::load_checkpoint(predict_checkpoint);
      const auto& config = checkpoint.config;
      const auto corpus = data::parse_corpus(predict_corpus);
      const auto provider = encoding::make_provider(config.provider, config.model.dim, config.embeddings);
      pipeline::PredictOptions options;
      options.pair_nodes = pipeline::parse_pair_nodes(pair_nodes);
      options.theta = config.theta;
      options.static_structure = config.model.ablations.static_structure;
      options.decision_threshold = predict_threshold.value_or(config.decision_threshold);
      options.workers = predict_workers.value_or(config.workers);
      if (options.workers == 0) throw ConfigError("workers must be >= 1");
      const auto predictions =
          pipeline::predict(checkpoint.params, config.model, checkpoint.transe, corpus, *provider, options);
      Output out(predict_out);
      out.stream() << pipeline::predictions_to_json(predictions).dump() << "\n";
    } else if (*eval_cmd) {
      const auto gold = data::parse_corpus(eval_gold);
      const auto predictions = pipeline::predictions_from_json(read_json_file(eval_predictions));
      pipeline::MetricsReport report;
      report.pos_evi = pipeline::evaluate_pos_evi(predictions, gold);
      if (!eval_pairs.empty())
        report.evi = pipeline::evaluate_evi(predictions, gold, pipeline::read_predicted_pairs(eval_pairs));
      Output out(eval_out);
      out.stream() << report.to_json().dump(2) << "\n";
    } else if (*graph_cmd) {
      const auto corpus = data::parse_corpus(graph_corpus);
      const auto mode = graph_mode == "train" ? graph::GraphMode::kTrain : graph::GraphMode::kInference;
      std::optional<graph::TransEModel> transe;
      if (!graph_transe.empty()) transe = load_transe(graph_transe);
      json dump = json::array();
      for (const auto& doc : corpus) {
        if (!graph_title.empty() && doc.title != graph_title) continue;
        auto g = graph::build_static(doc, mode);
        if (transe) g = graph::restructure(g, graph::relational_vectors(doc, g, *transe), graph_theta);
        json entry = g.to_json();
        entry["title"] = doc.title;
        dump.push_back(std::move(entry));
      }
      if (!graph_title.empty() && dump.empty()) throw LookupError("no document titled '" + graph_title + "'");
      Output out(graph_out);
      out.stream() << dump.dump(2) << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
