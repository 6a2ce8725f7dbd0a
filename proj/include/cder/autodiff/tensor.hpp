#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cder::ad {

// Dimension sizes, rank 0 (scalar), 1 (vector) or 2 (matrix).
using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // allocated lazily when requires_grad
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Propagates this node's grad into its inputs' grads.
  std::function<void(Node&)> backward;

  void ensure_grad();
};

}  // namespace detail

// Dense row-major tensor of doubles with reverse-mode differentiation.
//
// A Tensor is a cheap shared handle. Operations in ops.hpp produce new
// tensors that remember their inputs; calling backward() on a scalar result
// walks that record in reverse topological order and accumulates gradients
// into every leaf that requires them.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor identity(std::size_t n, bool requires_grad = false);
  // Matrix from nested rows; all rows must have the same length.
  static Tensor matrix(const std::vector<std::vector<double>>& rows, bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  // Rows/cols of a matrix; a vector reports rows() == 1, cols() == length.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const;
  // Direct write access, intended for optimizers and finite-difference probes.
  std::span<double> mutable_data();
  double item() const;
  double operator[](std::size_t flat_index) const { return data()[flat_index]; }
  double at(std::size_t row, std::size_t col) const;

  bool requires_grad() const;
  // Turns a leaf into a trainable parameter (allocates a zeroed grad buffer).
  Tensor& set_requires_grad(bool flag);
  bool is_leaf() const;
  // Empty span when the tensor does not track gradients.
  std::span<const double> grad() const;
  void zero_grad();

  // Back-propagates d(this)/d(leaf) into leaf grads. Requires a scalar
  // (single-element) tensor. Gradients accumulate across calls.
  void backward() const;

  // Copy of values with no history.
  Tensor detach() const;

  // Identity comparison of the underlying storage.
  bool same_as(const Tensor& other) const { return node_ == other.node_; }

  const std::shared_ptr<detail::Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

// Disables history recording on this thread while alive (evaluation mode).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_mode_enabled();

// Builds the result node for an operation. When any input requires a
// gradient (and grad mode is on) the backward closure is attached.
Tensor make_result(Shape shape, std::vector<double> data, std::vector<Tensor> inputs,
                   std::function<void(detail::Node&)> backward);

// Nodes reachable from `root` in dependency order (inputs before outputs),
// restricted to nodes that require gradients. This is the replay tape.
std::vector<detail::Node*> topological_order(const Tensor& root);

}  // namespace cder::ad
