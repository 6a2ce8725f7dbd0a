#include "cder/graph/transe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cder/errors.hpp"

namespace cder::graph {

namespace {

void normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0) for (double& x : v) x /= n;
}

std::vector<double> random_vector(std::size_t dim, std::mt19937_64& rng) {
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> v(dim);
  for (double& x : v) x = dist(rng);
  normalize(v);
  return v;
}

}  // namespace

double TransEModel::distance(const std::vector<double>& h, const std::vector<double>& r,
                             const std::vector<double>& t) const {
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double diff = h[i] + r[i] - t[i];
    s += norm_order == 1 ? std::abs(diff) : diff * diff;
  }
  return norm_order == 1 ? s : std::sqrt(s);
}

std::vector<double> TransEModel::mean_entity_vector() const {
  std::vector<double> mean(dim, 0.0);
  if (entity_vectors.empty()) return mean;
  for (const auto& v : entity_vectors)
    for (std::size_t i = 0; i < dim; ++i) mean[i] += v[i];
  for (double& x : mean) x /= static_cast<double>(entity_vectors.size());
  return mean;
}

std::vector<double> TransEModel::entity_vector(const std::string& name) const {
  const auto it = entity_ids.find(name);
  if (it == entity_ids.end()) return mean_entity_vector();
  return entity_vectors[it->second];
}

nlohmann::json TransEModel::to_json() const {
  return {{"dim", dim},
          {"margin", margin},
          {"norm_order", norm_order},
          {"entity_vectors", entity_vectors},
          {"relation_vectors", relation_vectors},
          {"entity_ids", entity_ids},
          {"relation_ids", relation_ids}};
}

TransEModel TransEModel::from_json(const nlohmann::json& j) {
  TransEModel m;
  m.dim = j.at("dim").get<std::size_t>();
  m.margin = j.at("margin").get<double>();
  m.norm_order = j.at("norm_order").get<int>();
  m.entity_vectors = j.at("entity_vectors").get<std::vector<std::vector<double>>>();
  m.relation_vectors = j.at("relation_vectors").get<std::vector<std::vector<double>>>();
  m.entity_ids = j.at("entity_ids").get<std::unordered_map<std::string, std::size_t>>();
  m.relation_ids = j.at("relation_ids").get<std::unordered_map<std::string, std::size_t>>();
  return m;
}

double margin_ranking_loss(double margin, double positive_distance, double negative_distance) {
  return std::max(0.0, margin + positive_distance - negative_distance);
}

TripleSet collect_triples(const std::vector<data::Document>& corpus) {
  TripleSet set;
  const auto intern = [](std::unordered_map<std::string, std::size_t>& ids, const std::string& key) {
    return ids.emplace(key, ids.size()).first->second;
  };
  for (const auto& doc : corpus) {
    for (const auto& f : doc.facts) {
      const auto h = intern(set.entity_ids, doc.entities[f.head].name());
      const auto t = intern(set.entity_ids, doc.entities[f.tail].name());
      const auto r = intern(set.relation_ids, f.relation);
      set.triples.push_back({h, r, t});
    }
  }
  return set;
}

TransEModel train_transe(const TripleSet& triples, const TransEConfig& config) {
  if (triples.triples.empty()) throw ConfigError("TransE needs at least one fact");
  if (config.norm_order != 1 && config.norm_order != 2) throw ConfigError("TransE norm order must be 1 or 2");
  if (config.dim == 0) throw ConfigError("TransE dimension must be positive");

  std::mt19937_64 rng(config.seed);
  TransEModel model;
  model.dim = config.dim;
  model.margin = config.margin;
  model.norm_order = config.norm_order;
  model.entity_ids = triples.entity_ids;
  model.relation_ids = triples.relation_ids;
  for (std::size_t e = 0; e < triples.entity_ids.size(); ++e) model.entity_vectors.push_back(random_vector(config.dim, rng));
  for (std::size_t r = 0; r < triples.relation_ids.size(); ++r)
    model.relation_vectors.push_back(random_vector(config.dim, rng));

  const std::size_t n_entities = model.entity_vectors.size();
  std::uniform_int_distribution<std::size_t> pick_entity(0, n_entities - 1);
  std::bernoulli_distribution corrupt_head(0.5);
  std::vector<std::size_t> order(triples.triples.size());
  std::iota(order.begin(), order.end(), 0);

  // d/dx of the distance for residual x = h + r - t.
  const auto residual_grad = [&](const Triple& tr) {
    const auto& h = model.entity_vectors[tr.head];
    const auto& r = model.relation_vectors[tr.relation];
    const auto& t = model.entity_vectors[tr.tail];
    std::vector<double> g(config.dim);
    double norm = 0.0;
    for (std::size_t i = 0; i < config.dim; ++i) {
      g[i] = h[i] + r[i] - t[i];
      norm += g[i] * g[i];
    }
    norm = std::sqrt(norm);
    for (double& x : g) {
      if (config.norm_order == 1) {
        x = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
      } else {
        x = norm > 0 ? x / norm : 0.0;
      }
    }
    return g;
  };
  const auto apply = [&](const Triple& tr, const std::vector<double>& g, double sign) {
    auto& h = model.entity_vectors[tr.head];
    auto& r = model.relation_vectors[tr.relation];
    auto& t = model.entity_vectors[tr.tail];
    for (std::size_t i = 0; i < config.dim; ++i) {
      const double step = sign * config.learning_rate * g[i];
      h[i] -= step;
      r[i] -= step;
      t[i] += step;
    }
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto idx : order) {
      const Triple& pos = triples.triples[idx];
      for (std::size_t k = 0; k < config.negatives_per_positive; ++k) {
        Triple neg = pos;
        if (n_entities > 1) {
          const bool head = corrupt_head(rng);
          const std::size_t original = head ? pos.head : pos.tail;
          std::size_t replacement = pick_entity(rng);
          while (replacement == original) replacement = pick_entity(rng);
          (head ? neg.head : neg.tail) = replacement;
        }
        const double d_pos = model.distance(model.entity_vectors[pos.head], model.relation_vectors[pos.relation],
                                            model.entity_vectors[pos.tail]);
        const double d_neg = model.distance(model.entity_vectors[neg.head], model.relation_vectors[neg.relation],
                                            model.entity_vectors[neg.tail]);
        if (margin_ranking_loss(config.margin, d_pos, d_neg) <= 0.0) continue;
        const auto g_pos = residual_grad(pos);
        const auto g_neg = residual_grad(neg);
        apply(pos, g_pos, +1.0);
        apply(neg, g_neg, -1.0);
        for (auto e : {pos.head, pos.tail, neg.head, neg.tail}) normalize(model.entity_vectors[e]);
      }
    }
  }
  return model;
}

TransEModel train_transe(const std::vector<data::Document>& corpus, const TransEConfig& config) {
  return train_transe(collect_triples(corpus), config);
}

double transe_mean_loss(const TransEModel& model, const std::vector<Triple>& triples, std::uint64_t seed) {
  if (triples.empty()) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, model.entity_vectors.size() - 1);
  double total = 0.0;
  for (const auto& tr : triples) {
    Triple neg = tr;
    neg.tail = pick(rng);
    total += margin_ranking_loss(
        model.margin,
        model.distance(model.entity_vectors[tr.head], model.relation_vectors[tr.relation], model.entity_vectors[tr.tail]),
        model.distance(model.entity_vectors[neg.head], model.relation_vectors[neg.relation],
                       model.entity_vectors[neg.tail]));
  }
  return total / static_cast<double>(triples.size());
}

}  // namespace cder::graph
