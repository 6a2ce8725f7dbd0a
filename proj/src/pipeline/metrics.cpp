#include "cder/pipeline/metrics.hpp"

#include <fstream>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "cder/errors.hpp"

namespace cder::pipeline {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

using PairKey = std::tuple<std::string, std::size_t, std::size_t>;

std::map<PairKey, std::set<std::size_t>> predicted_sets(const std::vector<EvidencePrediction>& predictions,
                                                        const std::unordered_map<std::string, const data::Document*>& docs) {
  std::map<PairKey, std::set<std::size_t>> out;
  for (const auto& p : predictions) {
    if (!docs.count(p.title)) throw ValidationError("prediction for unknown document '" + p.title + "'");
    auto& set = out[{p.title, p.head, p.tail}];
    set.insert(p.evidence.begin(), p.evidence.end());
  }
  return out;
}

std::unordered_map<std::string, const data::Document*> index_titles(const std::vector<data::Document>& gold) {
  std::unordered_map<std::string, const data::Document*> docs;
  for (const auto& d : gold) docs[d.title] = &d;
  return docs;
}

void score(EvidenceScore& s, const std::set<std::size_t>& predicted, const std::set<std::size_t>& gold) {
  for (auto x : predicted) (gold.count(x) ? s.tp : s.fp)++;
  for (auto x : gold) s.fn += predicted.count(x) == 0;
}

}  // namespace

double EvidenceScore::precision() const { return ratio(tp, tp + fp); }
double EvidenceScore::recall() const { return ratio(tp, tp + fn); }
double EvidenceScore::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = {{"pos_evi_precision", pos_evi.precision()},
                      {"pos_evi_recall", pos_evi.recall()},
                      {"pos_evi_f1", pos_evi.f1()},
                      {"pos_evi_tp", pos_evi.tp},
                      {"pos_evi_fp", pos_evi.fp},
                      {"pos_evi_fn", pos_evi.fn}};
  if (evi) {
    j["evi_precision"] = evi->precision();
    j["evi_recall"] = evi->recall();
    j["evi_f1"] = evi->f1();
    j["evi_tp"] = evi->tp;
    j["evi_fp"] = evi->fp;
    j["evi_fn"] = evi->fn;
  } else {
    j["evi_f1"] = nullptr;
  }
  return j;
}

EvidenceScore evaluate_pos_evi(const std::vector<EvidencePrediction>& predictions,
                               const std::vector<data::Document>& gold) {
  const auto docs = index_titles(gold);
  const auto predicted = predicted_sets(predictions, docs);
  EvidenceScore s;
  static const std::set<std::size_t> kEmpty;
  for (const auto& doc : gold) {
    for (const auto& [pair, evidence] : data::positive_pairs(doc)) {
      const auto it = predicted.find({doc.title, pair.first, pair.second});
      score(s, it == predicted.end() ? kEmpty : it->second, evidence);
    }
  }
  return s;
}

std::vector<PredictedPair> read_predicted_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open predicted-pairs file '" + path.string() +
                      "'; Evi F1 needs relation predictions from an external extractor as a JSON array of "
                      "{title, h_idx, t_idx, r}");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError(path.string() + ": expected a JSON array");
  std::vector<PredictedPair> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back({j[i].at("title").get<std::string>(), j[i].at("h_idx").get<std::size_t>(),
                     j[i].at("t_idx").get<std::size_t>(), j[i].value("r", std::string{})});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

EvidenceScore evaluate_evi(const std::vector<EvidencePrediction>& predictions, const std::vector<data::Document>& gold,
                           const std::vector<PredictedPair>& pairs) {
  const auto docs = index_titles(gold);
  const auto predicted = predicted_sets(predictions, docs);
  std::set<PairKey> seen;
  std::unordered_map<std::string, std::map<data::EntityPair, std::set<std::size_t>>> positives_by_title;
  EvidenceScore s;
  static const std::set<std::size_t> kEmpty;
  for (const auto& pp : pairs) {
    const auto doc = docs.find(pp.title);
    if (doc == docs.end()) throw ValidationError("predicted pair for unknown document '" + pp.title + "'");
    PairKey key{pp.title, pp.head, pp.tail};
    if (!seen.insert(key).second) continue;
    auto cached = positives_by_title.find(pp.title);
    if (cached == positives_by_title.end())
      cached = positives_by_title.emplace(pp.title, data::positive_pairs(*doc->second)).first;
    const auto& positives = cached->second;
    const auto g = positives.find({pp.head, pp.tail});
    const auto p = predicted.find(key);
    score(s, p == predicted.end() ? kEmpty : p->second, g == positives.end() ? kEmpty : g->second);
  }
  return s;
}

}  // namespace cder::pipeline
