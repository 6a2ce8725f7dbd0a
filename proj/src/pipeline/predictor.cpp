#include "cder/pipeline/predictor.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <iterator>
#include <mutex>
#include <thread>

#include "cder/errors.hpp"
#include "cder/model/network.hpp"
#include "cder/pipeline/trainer.hpp"

namespace cder::pipeline {

namespace {

std::vector<EvidencePrediction> predict_document(const data::Document& doc, const model::ModelParams& params,
                                                 const model::ModelConfig& config, const graph::TransEModel& transe,
                                                 const encoding::EmbeddingProvider& provider,
                                                 const PredictOptions& options) {
  ad::NoGradGuard no_grad;
  const auto prepared = prepare_document(doc, provider);
  const auto mode = options.pair_nodes == PairNodes::kAll ? graph::GraphMode::kInference : graph::GraphMode::kTrain;
  const auto inputs = document_inputs(*prepared, mode, transe, options.theta, options.static_structure);
  const auto probs = model::forward(inputs, params, config);
  const std::size_t ns = doc.sentences.size();
  const auto values = probs.data();

  std::vector<EvidencePrediction> out;
  out.reserve(inputs.graph.pair_count());
  for (std::size_t i = 0; i < inputs.graph.pair_count(); ++i) {
    EvidencePrediction p;
    p.title = doc.title;
    p.head = inputs.graph.pair_nodes[i].first;
    p.tail = inputs.graph.pair_nodes[i].second;
    p.probs.assign(values.begin() + static_cast<std::ptrdiff_t>(i * ns),
                   values.begin() + static_cast<std::ptrdiff_t>((i + 1) * ns));
    for (std::size_t s = 0; s < ns; ++s)
      if (p.probs[s] >= options.decision_threshold) p.evidence.push_back(s);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<EvidencePrediction> predict(const model::ModelParams& params, const model::ModelConfig& config,
                                        const graph::TransEModel& transe, const std::vector<data::Document>& corpus,
                                        const encoding::EmbeddingProvider& provider, const PredictOptions& options) {
  for (const auto& doc : corpus)
    if (!provider.has(doc)) throw LookupError("no embeddings for document '" + doc.title + "'");

  std::vector<std::vector<EvidencePrediction>> per_doc(corpus.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < corpus.size(); i = next++) {
      try {
        per_doc[i] = predict_document(corpus[i], params, config, transe, provider, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, corpus.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<EvidencePrediction> all;
  for (auto& v : per_doc) std::move(v.begin(), v.end(), std::back_inserter(all));
  return all;
}

nlohmann::json predictions_to_json(const std::vector<EvidencePrediction>& predictions) {
  auto arr = nlohmann::json::array();
  for (const auto& p : predictions)
    arr.push_back({{"title", p.title}, {"h_idx", p.head}, {"t_idx", p.tail}, {"probs", p.probs},
                   {"evidence", p.evidence}});
  return arr;
}

std::vector<EvidencePrediction> predictions_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("predictions must be a JSON array");
  std::vector<EvidencePrediction> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      EvidencePrediction p;
      p.title = j[i].at("title").get<std::string>();
      p.head = j[i].at("h_idx").get<std::size_t>();
      p.tail = j[i].at("t_idx").get<std::size_t>();
      p.probs = j[i].value("probs", std::vector<double>{});
      p.evidence = j[i].at("evidence").get<std::vector<std::size_t>>();
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("prediction " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

PairNodes parse_pair_nodes(const std::string& name) {
  if (name == "all") return PairNodes::kAll;
  if (name == "positive") return PairNodes::kPositive;
  throw ConfigError("pair nodes must be 'all' or 'positive', got '" + name + "'");
}

}  // namespace cder::pipeline
