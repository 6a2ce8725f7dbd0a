#pragma once

#include <cmath>
#include <random>

#include "cder/autodiff/tensor.hpp"

namespace cder::ad {

// Glorot/Xavier uniform [rows x cols] parameter.
inline Tensor xavier_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = dist(rng);
  return Tensor::from({rows, cols}, std::move(v), true);
}

inline Tensor zeros_parameter(Shape shape) { return Tensor::zeros(std::move(shape), true); }

}  // namespace cder::ad
