#pragma once

#include <cstddef>
#include <vector>

#include "cder/autodiff/tensor.hpp"

// Differentiable primitives. Shapes must agree exactly: there is no implicit
// broadcasting, only the explicit expansion helpers add_row / scale_rows.
namespace cder::ad {

inline constexpr double kDefaultLeakySlope = 0.2;

// [m x k] x [k x n] -> [m x n]
Tensor matmul(const Tensor& a, const Tensor& b);
// [m x n] -> [n x m]
Tensor transpose(const Tensor& a);
// Same data, new shape with the same element count.
Tensor reshape(const Tensor& a, Shape shape);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);

Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
// Subgradient at 0 uses the positive-branch slope 1.
Tensor leaky_relu(const Tensor& x, double slope = kDefaultLeakySlope);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
// Elementwise x^p with a constant exponent; x must be positive unless p is
// a nonnegative integer.
Tensor pow(const Tensor& x, double exponent);
// Values outside [lo, hi] are clamped and receive zero gradient.
Tensor clamp(const Tensor& x, double lo, double hi);

// Sum of all elements -> scalar.
Tensor sum(const Tensor& x);
// Matrix mean over axis 0 (-> [cols]) or axis 1 (-> [rows]); a vector
// reduces to a scalar on axis 0.
Tensor mean(const Tensor& x, std::size_t axis);
// out_j = log sum_i exp(x_ij), stabilised by max subtraction. [k x d] -> [d].
// A vector input is treated as [k x 1] and yields a scalar.
Tensor logsumexp(const Tensor& x, std::size_t axis = 0);
// Concatenation: vectors along axis 0; matrices along rows (0) or columns (1).
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
// Inner product of two equal-length vectors -> scalar.
Tensor dot(const Tensor& u, const Tensor& v);

// Rows of a matrix selected (possibly repeatedly) by index -> [|indices| x n].
// A vector input is treated as a single-row table indexed by element.
Tensor gather_rows(const Tensor& x, const std::vector<std::size_t>& indices);
// Single row of a matrix as a vector.
Tensor row(const Tensor& x, std::size_t index);
// Stacks equal-length vectors into a matrix, one per row.
Tensor stack_rows(const std::vector<Tensor>& rows);
// Adds vector b to every row of x ([m x n] + [n]).
Tensor add_row(const Tensor& x, const Tensor& b);
// Multiplies row i of x by the constant factors[i].
Tensor scale_rows(const Tensor& x, const std::vector<double>& factors);
// Row-wise softmax restricted to entries where mask is nonzero. Masked-out
// entries are 0; a row with no active entry is all zeros. `mask` is a
// constant [m x n] 0/1 pattern.
Tensor masked_softmax_rows(const Tensor& x, const std::vector<double>& mask);

}  // namespace cder::ad
