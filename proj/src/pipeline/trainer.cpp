#include "cder/pipeline/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "cder/errors.hpp"
#include "cder/model/loss.hpp"
#include "cder/pipeline/optimizer.hpp"

namespace cder::pipeline {

std::unique_ptr<PreparedDocument> prepare_document(const data::Document& doc,
                                                   const encoding::EmbeddingProvider& provider) {
  auto p = std::make_unique<PreparedDocument>();
  p->doc = &doc;
  p->marked = data::insert_markers(doc);
  p->bundle = provider.provide(doc, p->marked);
  p->features = encoding::compute_features(doc, p->bundle, p->marked);
  return p;
}

model::GraphInputs document_inputs(const PreparedDocument& prepared, graph::GraphMode mode,
                                   const graph::TransEModel& transe, double theta, bool static_structure) {
  auto g = graph::build_static(*prepared.doc, mode);
  auto relational = graph::relational_vectors(*prepared.doc, g, transe);
  if (!static_structure) g = graph::restructure(g, relational, theta);
  return model::make_graph_inputs(prepared.features, std::move(g), relational);
}

ad::Tensor example_loss(const TrainingExample& example, const model::ModelParams& params, const TrainConfig& config) {
  const auto probs = model::forward(example.inputs, params, config.model);
  return model::focal_loss(probs, example.targets, config.focal, config.model.ablations.use_bce);
}

namespace {

std::vector<TrainingExample> build_examples(const TrainConfig& config, const std::vector<data::Document>& corpus,
                                            const encoding::EmbeddingProvider& provider,
                                            const graph::TransEModel& transe, std::size_t& skipped) {
  for (const auto& doc : corpus)
    if (!provider.has(doc)) throw LookupError("no embeddings for document '" + doc.title + "'");

  std::vector<TrainingExample> examples;
  skipped = 0;
  for (const auto& doc : corpus) {
    const auto positives = data::positive_pairs(doc);
    if (positives.empty()) {
      ++skipped;
      continue;
    }
    TrainingExample ex;
    ex.prepared = prepare_document(doc, provider);
    ex.inputs = document_inputs(*ex.prepared, graph::GraphMode::kTrain, transe, config.theta,
                                config.model.ablations.static_structure);
    std::vector<std::set<std::size_t>> evidence;
    for (const auto& pair : ex.inputs.graph.pair_nodes) evidence.push_back(positives.at(pair));
    ex.targets = model::evidence_targets(evidence, doc.sentences.size());
    examples.push_back(std::move(ex));
  }
  return examples;
}

}  // namespace

TrainResult train(const TrainConfig& config, const std::vector<data::Document>& corpus,
                  const encoding::EmbeddingProvider& provider, std::optional<graph::TransEModel> transe,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (provider.dim() != config.model.dim)
    throw ConfigError("provider dimension " + std::to_string(provider.dim()) + " differs from model d " +
                      std::to_string(config.model.dim));

  TrainResult result;
  result.transe = transe ? std::move(*transe) : graph::train_transe(corpus, config.transe);
  if (result.transe.dim != config.model.relation_dim) throw ConfigError("TransE dimension differs from model k");

  auto examples = build_examples(config, corpus, provider, result.transe, result.skipped_documents);

  std::mt19937_64 rng(config.seed);
  result.params = model::ModelParams::init(config.model, rng);
  if (examples.empty()) return result;

  const std::size_t batches_per_epoch = (examples.size() + config.batch_size_train - 1) / config.batch_size_train;
  LinearWarmupSchedule schedule(batches_per_epoch * config.epochs, config.warmup_fraction);
  AdamW optimizer({{result.params.encoder_parameters(), config.lr_encoder},
                   {result.params.graph_parameters(), config.lr_other}},
                  {config.adam_beta1, config.adam_beta2, config.adam_eps, config.weight_decay});
  const auto all_params = result.params.parameters();

  std::vector<std::size_t> order(examples.size());
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size_train) {
      optimizer.zero_grad();
      const std::size_t end = std::min(order.size(), b + config.batch_size_train);
      double batch_loss = 0.0;
      for (std::size_t i = b; i < end; ++i) {
        auto loss = example_loss(examples[order[i]], result.params, config);
        loss.backward();  // leaves accumulate across the batch
        batch_loss += loss.item();
      }
      clip_grad_norm(all_params, config.max_grad_norm);
      const double factor = schedule.factor(step);
      optimizer.step(factor);
      result.steps.push_back({epoch, step, batch_loss, config.lr_other * factor});
      epoch_loss += batch_loss;
      ++step;
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(examples.size()));
    result.epochs_run = epoch;
    if (on_epoch && !on_epoch(epoch, result.params)) break;
  }
  return result;
}

void write_loss_trace(std::ostream& out, const std::vector<StepRecord>& steps) {
  out << "epoch,step,loss,lr\n";
  out.precision(17);
  for (const auto& s : steps) out << s.epoch << ',' << s.step << ',' << s.loss << ',' << s.lr << '\n';
}

}  // namespace cder::pipeline
