#pragma once

#include <vector>

#include "cder/autodiff/tensor.hpp"

namespace cder::encoding {

// Token embeddings H [n x d] of a marked document plus, per mention, an
// attention distribution over the n marked tokens.
struct EmbeddingBundle {
  ad::Tensor H;
  std::vector<std::vector<double>> attention;

  std::size_t tokens() const { return H.rows(); }
  std::size_t dim() const { return H.cols(); }
};

}  // namespace cder::encoding
