#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cder/data/synthetic.hpp"
#include "cder/errors.hpp"
#include "cder/graph/document_graph.hpp"
#include "cder/graph/transe.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cder;
using namespace cder::graph;

namespace {

std::size_t pair_index(const DocumentGraph& g, std::size_t h, std::size_t t) {
  const auto it = std::find(g.pair_nodes.begin(), g.pair_nodes.end(), data::EntityPair{h, t});
  EXPECT_NE(it, g.pair_nodes.end());
  return static_cast<std::size_t>(it - g.pair_nodes.begin());
}

std::vector<std::vector<double>> random_unit_vectors(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = test::random_vector(k, rng);
    double norm = 0;
    for (double x : v) norm += x * x;
    for (double& x : v) x /= std::sqrt(norm);
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(BuildStatic, Figure1) {
  const auto doc = test::figure1();
  const auto g = build_static(doc, GraphMode::kInference);
  EXPECT_EQ(g.pair_count(), 20u);
  const auto wg = pair_index(g, 0, 1), ge = pair_index(g, 1, 2), ag = pair_index(g, 3, 1);
  EXPECT_TRUE(g.pp_edges.count({std::min(wg, ge), std::max(wg, ge)}));
  EXPECT_TRUE(g.ps_edges.count({ag, 2}));
  EXPECT_TRUE(g.ss_edges.count({0, 1}));
  // (AFRTS, 1945) reaches sentences 0, 1 and 4 only
  const auto a45 = pair_index(g, 3, 4);
  for (std::size_t s = 0; s < 5; ++s) EXPECT_EQ(g.ps_edges.count({a45, s}) == 1, s == 0 || s == 1 || s == 4);
}

TEST(BuildStatic, InferencePairCount) {
  data::SyntheticCorpusOptions options;
  options.min_entities = options.max_entities = 4;
  const auto doc = data::synthetic_corpus(options).front();
  EXPECT_EQ(build_static(doc, GraphMode::kInference).pair_count(), 12u);
}

TEST(BuildStatic, MatchesOracleOnRandomDocuments) {
  data::SyntheticCorpusOptions options;
  options.documents = 100;
  options.seed = 21;
  options.max_entities = 6;
  options.max_mentions_per_sentence = 3;
  for (const auto& doc : data::synthetic_corpus(options)) {
    for (auto mode : {GraphMode::kTrain, GraphMode::kInference}) {
      const auto g = build_static(doc, mode);
      const auto o = test::oracle_graph(doc, mode);
      ASSERT_EQ(g.pair_nodes, o.pair_nodes);
      EXPECT_EQ(g.sentence_nodes, o.sentence_nodes);
      EXPECT_EQ(g.pp_edges, o.pp_edges);
      EXPECT_EQ(g.ps_edges, o.ps_edges);
      EXPECT_EQ(g.ss_edges, o.ss_edges);
    }
  }
}

TEST(BuildStatic, InvariantsOnRandomDocuments) {
  data::SyntheticCorpusOptions options;
  options.documents = 50;
  options.seed = 5;
  std::mt19937_64 rng(1);
  for (const auto& doc : data::synthetic_corpus(options)) {
    const auto g = build_static(doc, GraphMode::kInference);
    for (const auto& [pair, ev] : data::positive_pairs(doc))
      EXPECT_NE(std::find(g.pair_nodes.begin(), g.pair_nodes.end(), pair), g.pair_nodes.end());
    auto shuffled = doc;
    for (auto& e : shuffled.entities) std::shuffle(e.mentions.begin(), e.mentions.end(), rng);
    const auto h = build_static(shuffled, GraphMode::kInference);
    EXPECT_EQ(h.pp_edges, g.pp_edges);
    EXPECT_EQ(h.ps_edges, g.ps_edges);
    EXPECT_EQ(h.ss_edges, g.ss_edges);
    const auto masks = g.pp_mask();
    for (const auto& [i, j] : g.pp_edges) {
      EXPECT_EQ(masks[i * g.pair_count() + j], 1.0);
      EXPECT_EQ(masks[j * g.pair_count() + i], 1.0);
    }
  }
}

TEST(Restructure, RuleExamples) {
  const auto doc = test::figure1();
  auto g = build_static(doc, GraphMode::kTrain);
  ASSERT_EQ(g.pair_count(), 5u);
  // connected pairs made orthogonal, one disconnected couple made similar
  std::vector<std::vector<double>> r(5, std::vector<double>(5, 0.0));
  for (std::size_t i = 0; i < 5; ++i) r[i][i] = 1.0;
  const auto wg = pair_index(g, 0, 1), a45 = pair_index(g, 3, 4);
  ASSERT_FALSE(g.pp_edges.count({std::min(wg, a45), std::max(wg, a45)}));
  r[a45] = {0, 0, 0, 0, 0};
  r[a45][wg] = 0.9;
  r[a45][a45] = std::sqrt(1 - 0.81);
  const auto out = restructure(g, r, 0.5);
  EXPECT_EQ(out.pp_edges, (std::set<Edge>{{std::min(wg, a45), std::max(wg, a45)}}));
  EXPECT_EQ(out.ps_edges, g.ps_edges);
  EXPECT_EQ(out.ss_edges, g.ss_edges);
}

TEST(Restructure, EqualsThresholdSetAndIsIdempotent) {
  data::SyntheticCorpusOptions options;
  options.documents = 40;
  options.seed = 13;
  std::mt19937_64 rng(2);
  for (const auto& doc : data::synthetic_corpus(options)) {
    const auto g = build_static(doc, GraphMode::kInference);
    const auto r = random_unit_vectors(g.pair_count(), 3, rng);
    for (double theta : {-0.2, 0.0, 0.5, 0.9}) {
      std::set<Edge> expected;
      for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j) {
          double dot = 0;
          for (std::size_t k = 0; k < 3; ++k) dot += r[i][k] * r[j][k];
          if (dot >= theta) expected.insert({i, j});
        }
      const auto once = restructure(g, r, theta);
      EXPECT_EQ(once.pp_edges, expected);
      EXPECT_EQ(restructure(once, r, theta).pp_edges, once.pp_edges);
    }
  }
}

TEST(RelationalVector, Examples) {
  TransEModel m;
  m.dim = 3;
  m.entity_ids = {{"Weser River", 0}, {"Germany", 1}, {"Europe", 2}};
  m.entity_vectors = {{0, 0, 0}, {0, 1, 0}, {0, 1, 0}};
  const auto doc = test::figure1();
  EXPECT_EQ(pair_relational_vector(doc, {0, 1}, m), (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(pair_relational_vector(doc, {1, 2}, m), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(relevance(pair_relational_vector(doc, {1, 2}, m), {0, 1, 0}), 0.0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    m.entity_vectors = {test::random_vector(3, rng), test::random_vector(3, rng), test::random_vector(3, rng)};
    const auto r = pair_relational_vector(doc, {0, 2}, m);
    double norm = 0;
    std::vector<double> diff(3);
    for (std::size_t k = 0; k < 3; ++k) norm += (diff[k] = m.entity_vectors[2][k] - m.entity_vectors[0][k]) * diff[k];
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r[k], diff[k] / std::sqrt(norm), 1e-12);
  }
  // unseen entities fall back to the mean vector
  const auto mean = m.mean_entity_vector();
  EXPECT_EQ(m.entity_vector("AFRTS"), mean);
}

TEST(Relevance, Examples) {
  EXPECT_EQ(relevance({1, 0}, {0, 1}), 0.0);
  EXPECT_EQ(relevance({0.6, 0.8}, {0.6, 0.8}), 0.6 * 0.6 + 0.8 * 0.8);
  std::mt19937_64 rng(3);
  const auto a = test::random_vector(10, rng), b = test::random_vector(10, rng);
  double dot = 0;
  for (std::size_t i = 0; i < 10; ++i) dot += a[i] * b[i];
  EXPECT_NEAR(relevance(a, b), dot, 1e-12);
}

TEST(TransE, MarginLoss) {
  EXPECT_EQ(margin_ranking_loss(1.0, 0.0, 1.5), 0.0);
  EXPECT_EQ(margin_ranking_loss(1.0, 0.5, 1.0), 0.5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 5);
  for (int i = 0; i < 100; ++i) EXPECT_GE(margin_ranking_loss(1.0, u(rng), u(rng)), 0.0);
}

TEST(TransE, LearnsSingleFact) {
  TripleSet set;
  set.entity_ids = {{"a", 0}, {"b", 1}, {"c", 2}};
  set.relation_ids = {{"r", 0}};
  set.triples = {{0, 0, 1}};
  TransEConfig config;
  config.dim = 10;
  const auto m = train_transe(set, config);
  const auto& a = m.entity_vectors[0];
  const auto& b = m.entity_vectors[1];
  const auto& r = m.relation_vectors[0];
  EXPECT_LT(m.distance(a, r, b), m.distance(a, r, a));
  for (const auto& v : m.entity_vectors) {
    double n = 0;
    for (double x : v) n += x * x;
    EXPECT_NEAR(n, 1.0, 1e-9);
  }
}

TEST(TransE, CorpusTrainingAndErrors) {
  data::SyntheticCorpusOptions options;
  const auto corpus = data::synthetic_corpus(options);
  TransEConfig config;
  config.epochs = 0;
  const auto triples = collect_triples(corpus);
  const auto before = transe_mean_loss(train_transe(triples, config), triples.triples, 3);
  config.epochs = 200;
  const auto model = train_transe(triples, config);
  EXPECT_LT(transe_mean_loss(model, triples.triples, 3), before);
  EXPECT_EQ(TransEModel::from_json(model.to_json()).entity_vectors, model.entity_vectors);
  EXPECT_THROW(train_transe(TripleSet{}, config), ConfigError);
}
