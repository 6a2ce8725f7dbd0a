#include "cder/pipeline/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace cder::pipeline {

LinearWarmupSchedule::LinearWarmupSchedule(std::size_t total_steps, double warmup_fraction)
    : total_(total_steps),
      warmup_(static_cast<std::size_t>(std::ceil(warmup_fraction * static_cast<double>(total_steps)))) {}

double LinearWarmupSchedule::factor(std::size_t step) const {
  if (step < warmup_) return static_cast<double>(step) / static_cast<double>(warmup_);
  if (step >= total_) return 0.0;
  return static_cast<double>(total_ - step) / static_cast<double>(total_ - warmup_);
}

AdamW::AdamW(std::vector<Group> groups, AdamWOptions options) : groups_(std::move(groups)), options_(options) {
  for (const auto& g : groups_) {
    std::vector<std::vector<double>> zeros;
    for (const auto& p : g.params) zeros.emplace_back(p.size(), 0.0);
    m_.push_back(zeros);
    v_.push_back(std::move(zeros));
  }
}

void AdamW::step(double lr_factor) {
  ++t_;
  const double bias1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    auto& group = groups_[gi];
    const double lr = group.lr * lr_factor;
    for (std::size_t pi = 0; pi < group.params.size(); ++pi) {
      auto& param = group.params[pi];
      auto values = param.mutable_data();
      const auto grad = param.grad();
      auto& m = m_[gi][pi];
      auto& v = v_[gi][pi];
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double g = grad[i];
        m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * g;
        v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * g * g;
        values[i] *= 1.0 - lr * options_.weight_decay;
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        values[i] -= lr * m_hat / (std::sqrt(v_hat) + options_.eps);
      }
    }
  }
}

void AdamW::zero_grad() {
  for (auto& g : groups_)
    for (auto& p : g.params) p.zero_grad();
}

double clip_grad_norm(const std::vector<ad::Tensor>& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params)
    for (double g : p.grad()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double s = max_norm / (norm + 1e-6);
    for (auto p : params) {
      // grad buffers are owned by the node; scale in place
      auto& buf = p.node()->grad;
      for (double& g : buf) g *= s;
    }
  }
  return norm;
}

}  // namespace cder::pipeline
