#include "cder/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cder/errors.hpp"

namespace cder::ad {

namespace {

using detail::Node;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
  }
}

void require_matrix(const Tensor& a, const char* op) {
  if (a.rank() != 2) throw DimensionError(std::string(op) + ": expected matrix, got " + to_string(a.shape()));
}

bool tracks(const Node& n) { return n.requires_grad; }

// out = f(x) elementwise with dout/dx = df(x, y).
template <class Forward, class Derivative>
Tensor unary(const Tensor& x, Forward f, Derivative df) {
  std::vector<double> out(x.size());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result(x.shape(), std::move(out), {x}, [df](Node& self) {
    Node& src = *self.inputs[0];
    for (std::size_t i = 0; i < self.data.size(); ++i) {
      src.grad[i] += self.grad[i] * df(src.data[i], self.data[i]);
    }
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) {
    throw DimensionError("matmul: inner dimensions disagree " + to_string(a.shape()) + " x " +
                         to_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  const auto A = a.data();
  const auto B = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * B[p * n + j];
    }
  }
  return make_result({m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    const auto& G = self.grad;
    if (tracks(na)) {
      // dA = G * B^T
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * nb.data[p * n + j];
          na.grad[i * k + p] += s;
        }
    }
    if (tracks(nb)) {
      // dB = A^T * G
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = na.data[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) nb.grad[p * n + j] += aip * G[i * n + j];
        }
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  std::vector<double> out(m * n);
  const auto A = a.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = A[i * n + j];
  return make_result({n, m}, std::move(out), {a}, [m, n](Node& self) {
    Node& src = *self.inputs[0];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) src.grad[i * n + j] += self.grad[j * m + i];
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (numel(shape) != a.size()) {
    throw DimensionError("reshape: cannot view " + to_string(a.shape()) + " as " + to_string(shape));
  }
  std::vector<double> out(a.data().begin(), a.data().end());
  return make_result(std::move(shape), std::move(out), {a}, [](Node& self) {
    Node& src = *self.inputs[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i) src.grad[i] += self.grad[i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (!tracks(*in)) continue;
      for (std::size_t i = 0; i < self.grad.size(); ++i) in->grad[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (tracks(na)) na.grad[i] += self.grad[i];
      if (tracks(nb)) nb.grad[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node& na = *self.inputs[0];
    Node& nb = *self.inputs[1];
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (tracks(na)) na.grad[i] += self.grad[i] * nb.data[i];
      if (tracks(nb)) nb.grad[i] += self.grad[i] * na.data[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(a, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double offset) {
  return unary(a, [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Tensor tanh(const Tensor& x) {
  return unary(x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  return unary(
      x, [slope](double v) { return v >= 0 ? v : slope * v; },
      [slope](double v, double) { return v >= 0 ? 1.0 : slope; });
}

Tensor exp(const Tensor& x) {
  return unary(x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return unary(x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor pow(const Tensor& x, double exponent) {
  return unary(
      x, [exponent](double v) { return std::pow(v, exponent); },
      [exponent](double v, double) {
        if (exponent == 0.0) return 0.0;
        return exponent * std::pow(v, exponent - 1.0);
      });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  return unary(
      x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v, double) { return (v < lo || v > hi) ? 0.0 : 1.0; });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return make_result({}, {s}, {x}, [](Node& self) {
    Node& src = *self.inputs[0];
    for (auto& g : src.grad) g += self.grad[0];
  });
}

Tensor mean(const Tensor& x, std::size_t axis) {
  if (x.rank() == 1) {
    if (axis != 0) throw DimensionError("mean: vector has only axis 0");
    if (x.size() == 0) throw DomainError("mean over empty axis");
    return scale(sum(x), 1.0 / static_cast<double>(x.size()));
  }
  require_matrix(x, "mean");
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (axis > 1) throw DimensionError("mean: axis out of range");
  const std::size_t reduced = axis == 0 ? m : n;
  if (reduced == 0) throw DomainError("mean over empty axis");
  const std::size_t out_len = axis == 0 ? n : m;
  std::vector<double> out(out_len, 0.0);
  const auto X = x.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[axis == 0 ? j : i] += X[i * n + j];
  for (auto& v : out) v /= static_cast<double>(reduced);
  return make_result({out_len}, std::move(out), {x}, [m, n, axis, reduced](Node& self) {
    Node& src = *self.inputs[0];
    const double inv = 1.0 / static_cast<double>(reduced);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) src.grad[i * n + j] += self.grad[axis == 0 ? j : i] * inv;
  });
}

Tensor logsumexp(const Tensor& x, std::size_t axis) {
  if (axis != 0) throw DimensionError("logsumexp: only axis 0 is supported");
  const bool is_vector = x.rank() == 1;
  if (!is_vector) require_matrix(x, "logsumexp");
  const std::size_t k = is_vector ? x.size() : x.shape()[0];
  const std::size_t d = is_vector ? 1 : x.shape()[1];
  if (k == 0) throw DomainError("logsumexp over an empty axis");
  const auto X = x.data();
  std::vector<double> out(d);
  for (std::size_t j = 0; j < d; ++j) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) hi = std::max(hi, X[i * d + j]);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::exp(X[i * d + j] - hi);
    out[j] = hi + std::log(s);
  }
  Shape shape = is_vector ? Shape{} : Shape{d};
  return make_result(std::move(shape), std::move(out), {x}, [k, d](Node& self) {
    Node& src = *self.inputs[0];
    // d out_j / d x_ij = softmax_i(x_.j)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < d; ++j)
        src.grad[i * d + j] += self.grad[j] * std::exp(src.data[i * d + j] - self.data[j]);
  });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat: no inputs");
  const std::size_t rank = parts.front().rank();
  for (const auto& p : parts) {
    if (p.rank() != rank) throw DimensionError("concat: mixed ranks");
  }
  if (rank == 1) {
    if (axis != 0) throw DimensionError("concat: vectors only concatenate on axis 0");
    std::vector<double> out;
    for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
    const std::size_t n = out.size();
    return make_result({n}, std::move(out), parts, [](Node& self) {
      std::size_t offset = 0;
      for (auto& in : self.inputs) {
        if (tracks(*in))
          for (std::size_t i = 0; i < in->data.size(); ++i) in->grad[i] += self.grad[offset + i];
        offset += in->data.size();
      }
    });
  }
  if (rank != 2) throw DimensionError("concat: scalars cannot be concatenated");
  if (axis == 0) {
    const std::size_t n = parts.front().shape()[1];
    std::size_t m = 0;
    std::vector<double> out;
    for (const auto& p : parts) {
      if (p.shape()[1] != n) {
        throw DimensionError("concat: column mismatch " + to_string(parts.front().shape()) + " vs " +
                             to_string(p.shape()));
      }
      m += p.shape()[0];
      out.insert(out.end(), p.data().begin(), p.data().end());
    }
    return make_result({m, n}, std::move(out), parts, [](Node& self) {
      std::size_t offset = 0;
      for (auto& in : self.inputs) {
        if (tracks(*in))
          for (std::size_t i = 0; i < in->data.size(); ++i) in->grad[i] += self.grad[offset + i];
        offset += in->data.size();
      }
    });
  }
  if (axis != 1) throw DimensionError("concat: axis out of range");
  const std::size_t m = parts.front().shape()[0];
  std::size_t n = 0;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    if (p.shape()[0] != m) {
      throw DimensionError("concat: row mismatch " + to_string(parts.front().shape()) + " vs " +
                           to_string(p.shape()));
    }
    widths.push_back(p.shape()[1]);
    n += p.shape()[1];
  }
  std::vector<double> out(m * n);
  std::size_t col = 0;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const auto P = parts[pi].data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < widths[pi]; ++j) out[i * n + col + j] = P[i * widths[pi] + j];
    col += widths[pi];
  }
  return make_result({m, n}, std::move(out), parts, [m, n, widths](Node& self) {
    std::size_t col = 0;
    for (std::size_t pi = 0; pi < self.inputs.size(); ++pi) {
      Node& in = *self.inputs[pi];
      if (tracks(in))
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < widths[pi]; ++j) in.grad[i * widths[pi] + j] += self.grad[i * n + col + j];
      col += widths[pi];
    }
  });
}

Tensor dot(const Tensor& u, const Tensor& v) {
  if (u.rank() != 1 || v.rank() != 1 || u.size() != v.size()) {
    throw DimensionError("dot: expected equal-length vectors, got " + to_string(u.shape()) + " and " +
                         to_string(v.shape()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return make_result({}, {s}, {u, v}, [](Node& self) {
    Node& nu = *self.inputs[0];
    Node& nv = *self.inputs[1];
    const double g = self.grad[0];
    for (std::size_t i = 0; i < nu.data.size(); ++i) {
      if (tracks(nu)) nu.grad[i] += g * nv.data[i];
      if (tracks(nv)) nv.grad[i] += g * nu.data[i];
    }
  });
}

Tensor gather_rows(const Tensor& x, const std::vector<std::size_t>& indices) {
  const bool is_vector = x.rank() == 1;
  if (!is_vector) require_matrix(x, "gather_rows");
  const std::size_t m = is_vector ? x.size() : x.shape()[0];
  const std::size_t n = is_vector ? 1 : x.shape()[1];
  std::vector<double> out;
  out.reserve(indices.size() * n);
  const auto X = x.data();
  for (auto idx : indices) {
    if (idx >= m) throw DimensionError("gather_rows: index " + std::to_string(idx) + " out of " + to_string(x.shape()));
    out.insert(out.end(), X.begin() + static_cast<std::ptrdiff_t>(idx * n),
               X.begin() + static_cast<std::ptrdiff_t>((idx + 1) * n));
  }
  Shape shape = is_vector ? Shape{indices.size()} : Shape{indices.size(), n};
  return make_result(std::move(shape), std::move(out), {x}, [indices, n](Node& self) {
    Node& src = *self.inputs[0];
    for (std::size_t r = 0; r < indices.size(); ++r)
      for (std::size_t j = 0; j < n; ++j) src.grad[indices[r] * n + j] += self.grad[r * n + j];
  });
}

Tensor row(const Tensor& x, std::size_t index) {
  require_matrix(x, "row");
  return reshape(gather_rows(x, {index}), {x.shape()[1]});
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw DimensionError("stack_rows: no inputs");
  std::vector<Tensor> as_rows;
  as_rows.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.rank() != 1) throw DimensionError("stack_rows: expected vectors, got " + to_string(r.shape()));
    as_rows.push_back(reshape(r, {1, r.size()}));
  }
  return concat(as_rows, 0);
}

Tensor add_row(const Tensor& x, const Tensor& b) {
  require_matrix(x, "add_row");
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (b.rank() != 1 || b.size() != n) {
    throw DimensionError("add_row: bias " + to_string(b.shape()) + " does not fit " + to_string(x.shape()));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += b[j];
  return make_result({m, n}, std::move(out), {x, b}, [m, n](Node& self) {
    Node& nx = *self.inputs[0];
    Node& nb = *self.inputs[1];
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double g = self.grad[i * n + j];
        if (tracks(nx)) nx.grad[i * n + j] += g;
        if (tracks(nb)) nb.grad[j] += g;
      }
  });
}

Tensor scale_rows(const Tensor& x, const std::vector<double>& factors) {
  require_matrix(x, "scale_rows");
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (factors.size() != m) throw DimensionError("scale_rows: factor count differs from row count");
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = x[i * n + j] * factors[i];
  return make_result({m, n}, std::move(out), {x}, [factors, n](Node& self) {
    Node& src = *self.inputs[0];
    for (std::size_t i = 0; i < factors.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) src.grad[i * n + j] += self.grad[i * n + j] * factors[i];
  });
}

Tensor masked_softmax_rows(const Tensor& x, const std::vector<double>& mask) {
  require_matrix(x, "masked_softmax_rows");
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (mask.size() != m * n) throw DimensionError("masked_softmax_rows: mask size mismatch for " + to_string(x.shape()));
  std::vector<double> out(m * n, 0.0);
  const auto X = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (mask[i * n + j] != 0.0) hi = std::max(hi, X[i * n + j]);
    if (hi == -std::numeric_limits<double>::infinity()) continue;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (mask[i * n + j] != 0.0) total += (out[i * n + j] = std::exp(X[i * n + j] - hi));
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= total;
  }
  return make_result({m, n}, std::move(out), {x}, [m, n](Node& self) {
    Node& src = *self.inputs[0];
    const auto& Y = self.data;
    const auto& G = self.grad;
    // dx_ij = y_ij (g_ij - sum_k y_ik g_ik); masked entries have y = 0.
    for (std::size_t i = 0; i < m; ++i) {
      double inner = 0.0;
      for (std::size_t j = 0; j < n; ++j) inner += Y[i * n + j] * G[i * n + j];
      for (std::size_t j = 0; j < n; ++j) src.grad[i * n + j] += Y[i * n + j] * (G[i * n + j] - inner);
    }
  });
}

}  // namespace cder::ad
