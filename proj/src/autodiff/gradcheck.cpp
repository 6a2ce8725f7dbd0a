#include "cder/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "cder/errors.hpp"

namespace cder::ad {

namespace {

double evaluate(const std::function<Tensor()>& f) {
  NoGradGuard no_grad;
  const double v = f().item();
  if (!std::isfinite(v)) throw NumericError("gradient_check: function value is not finite");
  return v;
}

}  // namespace

GradientCheckResult gradient_check_detailed(const std::function<Tensor()>& f, std::vector<Tensor> inputs,
                                            double step, double floor) {
  for (auto& in : inputs) {
    if (!in.requires_grad()) in.set_requires_grad(true);
    in.zero_grad();
  }
  const Tensor out = f();
  if (!std::isfinite(out.item())) throw NumericError("gradient_check: function value is not finite");
  out.backward();

  GradientCheckResult result;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    auto values = inputs[t].mutable_data();
    const std::vector<double> analytic(inputs[t].grad().begin(), inputs[t].grad().end());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      auto at = [&](double offset) {
        values[i] = original + offset;
        return evaluate(f);
      };
      // five-point stencil, truncation error O(step^4)
      const double near = at(step) - at(-step);
      const double far = at(2.0 * step) - at(-2.0 * step);
      values[i] = original;
      const double numeric = (8.0 * near - far) / (12.0 * step);
      const double err =
          std::abs(analytic[i] - numeric) / std::max(floor, std::abs(analytic[i]) + std::abs(numeric));
      if (!std::isfinite(analytic[i])) throw NumericError("gradient_check: analytic gradient is not finite");
      if (err > result.max_relative_error) {
        result = {err, t, i, analytic[i], numeric};
      }
    }
  }
  return result;
}

double gradient_check(const std::function<Tensor()>& f, std::vector<Tensor> inputs, double step, double floor) {
  return gradient_check_detailed(f, std::move(inputs), step, floor).max_relative_error;
}

}  // namespace cder::ad
