#pragma once

#include <set>
#include <vector>

#include "cder/autodiff/tensor.hpp"

namespace cder::model {

inline constexpr double kProbabilityEpsilon = 1e-7;

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;

  void validate() const;
};

// 0/1 indicator [pairs x sentences] from per-pair evidence sets. Throws
// ValidationError for a sentence index >= sentence_count.
std::vector<double> evidence_targets(const std::vector<std::set<std::size_t>>& evidence, std::size_t sentence_count);

// -sum [alpha (1-P)^gamma log P * y + (1-alpha) P^gamma log(1-P) * (1-y)]
// with P clamped to [eps, 1-eps]. With use_bce the loss is plain binary
// cross-entropy (gamma 0, alpha 0.5, times 2).
ad::Tensor focal_loss(const ad::Tensor& probs, const std::vector<double>& targets, const FocalParams& params,
                      bool use_bce = false);

}  // namespace cder::model
