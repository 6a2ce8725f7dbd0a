#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cder/autodiff/tensor.hpp"
#include "cder/data/document.hpp"

namespace cder::test {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(CDER_TEST_DATA_DIR) / name;
}

inline data::Document figure1() { return data::parse_corpus(data_path("figure1.json")).front(); }

inline ad::Tensor random_tensor(ad::Shape shape, std::mt19937_64& rng, double scale = 1.0, bool grad = true) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = n(rng);
  return ad::Tensor::from(std::move(shape), std::move(v), grad);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace cder::test
