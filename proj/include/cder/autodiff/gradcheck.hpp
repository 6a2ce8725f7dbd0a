#pragma once

#include <functional>
#include <vector>

#include "cder/autodiff/tensor.hpp"

namespace cder::ad {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_coordinate = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

// Compares reverse-mode gradients of a scalar function against five-point
// central differences. `f` must rebuild its result from the current values of
// `inputs` on every call; inputs are perturbed in place and restored.
//
// Error per coordinate: |analytic - numeric| / max(floor, |analytic| + |numeric|).
// Coordinates whose gradient is far below `floor` are therefore judged on
// absolute error, where rounding in f would otherwise dominate.
// Throws NumericError if f produces a non-finite value.
GradientCheckResult gradient_check_detailed(const std::function<Tensor()>& f, std::vector<Tensor> inputs,
                                            double step = 1e-5, double floor = 1e-5);

double gradient_check(const std::function<Tensor()>& f, std::vector<Tensor> inputs, double step = 1e-5,
                      double floor = 1e-5);

}  // namespace cder::ad
