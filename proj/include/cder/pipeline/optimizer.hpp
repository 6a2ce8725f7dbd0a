#pragma once

#include <vector>

#include "cder/autodiff/tensor.hpp"

namespace cder::pipeline {

// Linear warmup over the first ceil(fraction * total) steps, then linear
// decay to zero at `total`. factor(0) == 0 whenever warmup is nonzero.
class LinearWarmupSchedule {
 public:
  LinearWarmupSchedule(std::size_t total_steps, double warmup_fraction);
  double factor(std::size_t step) const;
  std::size_t warmup_steps() const { return warmup_; }
  std::size_t total_steps() const { return total_; }

 private:
  std::size_t total_;
  std::size_t warmup_;
};

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// Adam with decoupled weight decay over parameter groups, each with its own
// peak learning rate.
class AdamW {
 public:
  struct Group {
    std::vector<ad::Tensor> params;
    double lr = 1e-3;
  };

  AdamW(std::vector<Group> groups, AdamWOptions options);

  // One update with every group's lr multiplied by `lr_factor`.
  void step(double lr_factor = 1.0);
  void zero_grad();
  std::size_t steps_taken() const { return t_; }
  const std::vector<Group>& groups() const { return groups_; }

 private:
  std::vector<Group> groups_;
  AdamWOptions options_;
  std::vector<std::vector<std::vector<double>>> m_, v_;
  std::size_t t_ = 0;
};

// Scales all gradients so their joint L2 norm is at most max_norm; returns
// the norm before clipping.
double clip_grad_norm(const std::vector<ad::Tensor>& params, double max_norm);

}  // namespace cder::pipeline
