#include "cder/model/loss.hpp"

#include "cder/autodiff/ops.hpp"
#include "cder/errors.hpp"

namespace cder::model {

void FocalParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("focal alpha must lie in (0, 1)");
  if (gamma < 0.0) throw ConfigError("focal gamma must be >= 0");
}

std::vector<double> evidence_targets(const std::vector<std::set<std::size_t>>& evidence, std::size_t sentence_count) {
  std::vector<double> y(evidence.size() * sentence_count, 0.0);
  for (std::size_t p = 0; p < evidence.size(); ++p) {
    for (auto s : evidence[p]) {
      if (s >= sentence_count) {
        throw ValidationError("evidence sentence " + std::to_string(s) + " out of range for a document with " +
                              std::to_string(sentence_count) + " sentences");
      }
      y[p * sentence_count + s] = 1.0;
    }
  }
  return y;
}

ad::Tensor focal_loss(const ad::Tensor& probs, const std::vector<double>& targets, const FocalParams& params,
                      bool use_bce) {
  if (targets.size() != probs.size()) throw DimensionError("focal_loss: target count differs from probabilities");
  const double alpha = use_bce ? 0.5 : params.alpha;
  const double gamma = use_bce ? 0.0 : params.gamma;
  const double factor = use_bce ? 2.0 : 1.0;

  std::vector<double> negatives(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) negatives[i] = 1.0 - targets[i];
  const auto y = ad::Tensor::from(probs.shape(), targets);
  const auto not_y = ad::Tensor::from(probs.shape(), std::move(negatives));

  const auto p = ad::clamp(probs, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
  const auto one_minus_p = ad::add_scalar(ad::scale(p, -1.0), 1.0);
  const auto positive = ad::scale(ad::mul(ad::pow(one_minus_p, gamma), ad::log(p)), alpha);
  const auto negative = ad::scale(ad::mul(ad::pow(p, gamma), ad::log(one_minus_p)), 1.0 - alpha);
  const auto total = ad::add(ad::mul(positive, y), ad::mul(negative, not_y));
  return ad::scale(ad::sum(total), -factor);
}

}  // namespace cder::model
