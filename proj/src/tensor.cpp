// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "tchgr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "tchgr/error.hpp"

namespace tchgr {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "×";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Tensor

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return filled(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::filled(Shape shape, double value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return from_data(std::move(shape), std::vector<double>(n, value),
                   requires_grad);
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data,
                         bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) {
      throw DimensionError("tensor dimensions must be positive, got " +
                           shape_to_string(shape));
    }
  }
  if (shape_numel(shape) != data.size()) {
    throw DimensionError("shape " + shape_to_string(shape) + " holds " +
                         std::to_string(shape_numel(shape)) +
                         " elements but data has " +
                         std::to_string(data.size()));
  }
  auto impl = std::make_shared<Storage>();
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_data({}, {value}, requires_grad);
}

const Tensor::Storage& Tensor::storage() const {
  if (!impl_) throw UsageError("use of an undefined tensor");
  return *impl_;
}

Tensor::Storage& Tensor::storage() {
  if (!impl_) throw UsageError("use of an undefined tensor");
  return *impl_;
}

const Shape& Tensor::shape() const { return storage().shape; }

std::size_t Tensor::size(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + shape_to_string(s));
  }
  return s[axis];
}

std::size_t Tensor::numel() const { return storage().data.size(); }

std::span<const double> Tensor::data() const { return storage().data; }
std::span<double> Tensor::mutable_data() { return storage().data; }

double Tensor::item() const {
  if (numel() != 1) {
    throw DimensionError("item() needs a single-element tensor, got " +
                         shape_to_string(shape()));
  }
  return storage().data[0];
}

bool Tensor::requires_grad() const { return storage().requires_grad; }
bool Tensor::has_grad() const { return !storage().grad.empty(); }

std::span<const double> Tensor::grad() const {
  if (!has_grad()) throw StateError("tensor has no gradient");
  return storage().grad;
}

std::span<double> Tensor::mutable_grad() {
  ensure_grad();
  return storage().grad;
}

void Tensor::ensure_grad() {
  Storage& s = storage();
  if (s.grad.empty()) s.grad.assign(s.data.size(), 0.0);
}

void Tensor::zero_grad() {
  Storage& s = storage();
  std::fill(s.grad.begin(), s.grad.end(), 0.0);
}

void Tensor::clear_grad() {
  Storage& s = storage();
  s.grad.clear();
  s.grad.shrink_to_fit();
}

// ---------------------------------------------------------------------------
// Tape

Tensor Tape::record(Tensor output, std::vector<Tensor> inputs,
                    BackwardFn backward) {
  const bool any = std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) {
    return t.defined() && t.requires_grad();
  });
  if (!any) return output;
  if (consumed_) {
    throw StateError("tape already ran backward; call reset() before reuse");
  }
  output.storage().requires_grad = true;
  nodes_.push_back(Node{output, std::move(inputs), std::move(backward)});
  return output;
}

void Tape::backward(const Tensor& loss) {
  if (consumed_) {
    throw StateError("backward() already called on this tape; reset() first");
  }
  if (loss.numel() != 1) {
    throw UsageError("backward() needs a scalar loss, got shape " +
                     shape_to_string(loss.shape()));
  }
  if (!loss.requires_grad()) {
    throw UsageError("loss does not depend on any tensor that requires grad");
  }
  consumed_ = true;
  Tensor seed = loss;
  seed.ensure_grad();
  seed.mutable_grad()[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (!it->output.has_grad()) continue;
    for (Tensor& in : it->inputs) {
      if (in.defined() && in.requires_grad()) in.ensure_grad();
    }
    it->backward(it->output);
  }
}

void Tape::reset() {
  nodes_.clear();
  consumed_ = false;
}

// ---------------------------------------------------------------------------
// Ops

namespace {

bool needs_grad(const Tensor& t) { return t.defined() && t.requires_grad(); }

// out[m×n] += op(a)·op(b) where op transposes when the flag is set.
// a is stored [m×k] (or [k×m] when trans_a), b is [k×n] (or [n×k]).
void gemm_acc(const double* a, const double* b, double* out, std::size_t m,
              std::size_t k, std::size_t n, bool trans_a, bool trans_b) {
  for (std::size_t i = 0; i < m; ++i) {
    double* out_row = out + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = trans_a ? a[p * m + i] : a[i * k + p];
      if (av == 0.0) continue;
      if (trans_b) {
        for (std::size_t j = 0; j < n; ++j) out_row[j] += av * b[j * k + p];
      } else {
        const double* b_row = b + p * n;
        for (std::size_t j = 0; j < n; ++j) out_row[j] += av * b_row[j];
      }
    }
  }
}

[[noreturn]] void shape_mismatch(const char* op, const Tensor& a,
                                 const Tensor& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " +
                       shape_to_string(a.shape()) + " and " +
                       shape_to_string(b.shape()));
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  std::size_t batch = 1, m = 0, k = 0, n = 0;
  bool shared_b = false;
  Shape out_shape;
  if (a.dim() == 2 && b.dim() == 2) {
    m = a.size(0), k = a.size(1), n = b.size(1);
    if (b.size(0) != k) shape_mismatch("matmul", a, b);
    out_shape = {m, n};
  } else if (a.dim() == 3 && b.dim() == 3) {
    batch = a.size(0), m = a.size(1), k = a.size(2), n = b.size(2);
    if (b.size(0) != batch || b.size(1) != k) shape_mismatch("matmul", a, b);
    out_shape = {batch, m, n};
  } else if (a.dim() == 3 && b.dim() == 2) {
    batch = a.size(0), m = a.size(1), k = a.size(2), n = b.size(1);
    if (b.size(0) != k) shape_mismatch("matmul", a, b);
    shared_b = true;
    out_shape = {batch, m, n};
  } else {
    shape_mismatch("matmul", a, b);
  }

  const std::size_t a_stride = m * k;
  const std::size_t b_stride = shared_b ? 0 : k * n;
  const std::size_t c_stride = m * n;
  std::vector<double> out(batch * c_stride, 0.0);
  for (std::size_t s = 0; s < batch; ++s) {
    gemm_acc(a.data().data() + s * a_stride, b.data().data() + s * b_stride,
             out.data() + s * c_stride, m, k, n, false, false);
  }

  return tape.record(
      Tensor::from_data(out_shape, std::move(out)), {a, b},
      [a, b, batch, m, k, n, a_stride, b_stride, c_stride](const Tensor& y) {
        Tensor ga = a, gb = b;
        const double* dy = y.grad().data();
        for (std::size_t s = 0; s < batch; ++s) {
          if (needs_grad(a)) {
            // dA = dY·Bᵀ
            gemm_acc(dy + s * c_stride, b.data().data() + s * b_stride,
                     ga.mutable_grad().data() + s * a_stride, m, n, k, false,
                     true);
          }
          if (needs_grad(b)) {
            // dB = Aᵀ·dY
            gemm_acc(a.data().data() + s * a_stride, dy + s * c_stride,
                     gb.mutable_grad().data() + s * b_stride, k, m, n, true,
                     false);
          }
        }
      });
}

Tensor transpose_last2(Tape& tape, const Tensor& x) {
  if (x.dim() != 2 && x.dim() != 3) {
    throw DimensionError("transpose_last2 needs rank 2 or 3, got " +
                         shape_to_string(x.shape()));
  }
  const std::size_t batch = x.dim() == 3 ? x.size(0) : 1;
  const std::size_t rows = x.size(x.dim() - 2);
  const std::size_t cols = x.size(x.dim() - 1);
  Shape out_shape = x.shape();
  std::swap(out_shape[out_shape.size() - 1], out_shape[out_shape.size() - 2]);

  std::vector<double> out(x.numel());
  const auto in = x.data();
  for (std::size_t s = 0; s < batch; ++s) {
    const std::size_t base = s * rows * cols;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        out[base + c * rows + r] = in[base + r * cols + c];
      }
    }
  }
  return tape.record(Tensor::from_data(out_shape, std::move(out)), {x},
                     [x, batch, rows, cols](const Tensor& y) {
                       Tensor gx = x;
                       auto g = gx.mutable_grad();
                       const auto dy = y.grad();
                       for (std::size_t s = 0; s < batch; ++s) {
                         const std::size_t base = s * rows * cols;
                         for (std::size_t r = 0; r < rows; ++r) {
                           for (std::size_t c = 0; c < cols; ++c) {
                             g[base + r * cols + c] += dy[base + c * rows + r];
                           }
                         }
                       }
                     });
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_mismatch("add", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return tape.record(Tensor::from_data(a.shape(), std::move(out)), {a, b},
                     [a, b](const Tensor& y) {
                       const auto dy = y.grad();
                       for (Tensor t : {a, b}) {
                         if (!needs_grad(t)) continue;
                         auto g = t.mutable_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i];
                       }
                     });
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_mismatch("mul", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return tape.record(Tensor::from_data(a.shape(), std::move(out)), {a, b},
                     [a, b](const Tensor& y) {
                       const auto dy = y.grad();
                       if (needs_grad(a)) {
                         Tensor ga = a;
                         auto g = ga.mutable_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i] * b[i];
                       }
                       if (needs_grad(b)) {
                         Tensor gb = b;
                         auto g = gb.mutable_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i] * a[i];
                       }
                     });
}

Tensor scale(Tape& tape, const Tensor& x, double factor) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * factor;
  return tape.record(Tensor::from_data(x.shape(), std::move(out)), {x},
                     [x, factor](const Tensor& y) {
                       Tensor gx = x;
                       auto g = gx.mutable_grad();
                       const auto dy = y.grad();
                       for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i] * factor;
                     });
}

Tensor relu(Tape& tape, const Tensor& x) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
  return tape.record(Tensor::from_data(x.shape(), std::move(out)), {x},
                     [x](const Tensor& y) {
                       Tensor gx = x;
                       auto g = gx.mutable_grad();
                       const auto dy = y.grad();
                       // Subgradient at exactly 0 is 0.
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         if (x[i] > 0.0) g[i] += dy[i];
                       }
                     });
}

Tensor softmax_lastdim(Tape& tape, const Tensor& x) {
  if (x.dim() == 0) {
    throw DimensionError("softmax_lastdim needs at least one axis");
  }
  const std::size_t width = x.size(x.dim() - 1);
  const std::size_t rows = x.numel() / width;
  std::vector<double> out(x.numel());
  const auto in = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = in.data() + r * width;
    double* o = out.data() + r * width;
    const double peak = *std::max_element(row, row + width);
    double total = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      o[j] = std::exp(row[j] - peak);
      total += o[j];
    }
    for (std::size_t j = 0; j < width; ++j) o[j] /= total;
  }
  return tape.record(Tensor::from_data(x.shape(), std::move(out)), {x},
                     [x, rows, width](const Tensor& y) {
                       Tensor gx = x;
                       auto g = gx.mutable_grad();
                       const auto dy = y.grad();
                       const auto p = y.data();
                       for (std::size_t r = 0; r < rows; ++r) {
                         const std::size_t base = r * width;
                         double dot = 0.0;
                         for (std::size_t j = 0; j < width; ++j) {
                           dot += dy[base + j] * p[base + j];
                         }
                         for (std::size_t j = 0; j < width; ++j) {
                           g[base + j] += p[base + j] * (dy[base + j] - dot);
                         }
                       }
                     });
}

Tensor reshape(Tape& tape, const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape: cannot view " + shape_to_string(x.shape()) +
                         " as " + shape_to_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return tape.record(Tensor::from_data(std::move(shape), std::move(out)), {x},
                     [x](const Tensor& y) {
                       Tensor gx = x;
                       auto g = gx.mutable_grad();
                       const auto dy = y.grad();
                       for (std::size_t i = 0; i < g.size(); ++i) g[i] += dy[i];
                     });
}

Tensor sum(Tape& tape, const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return tape.record(Tensor::scalar(total), {x}, [x](const Tensor& y) {
    Tensor gx = x;
    const double dy = y.grad()[0];
    for (double& g : gx.mutable_grad()) g += dy;
  });
}

Tensor linear(Tape& tape, const Tensor& x, const Tensor& weight,
              const Tensor& bias) {
  if (weight.dim() != 2 || x.dim() == 0 ||
      x.size(x.dim() - 1) != weight.size(0)) {
    shape_mismatch("linear", x, weight);
  }
  const std::size_t in = weight.size(0);
  const std::size_t out_dim = weight.size(1);
  if (bias.defined() && (bias.dim() != 1 || bias.size(0) != out_dim)) {
    shape_mismatch("linear (bias)", weight, bias);
  }
  const std::size_t rows = x.numel() / in;
  Shape out_shape = x.shape();
  out_shape.back() = out_dim;

  std::vector<double> out(rows * out_dim, 0.0);
  if (bias.defined()) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(bias.data().begin(), bias.data().end(),
                out.begin() + static_cast<std::ptrdiff_t>(r * out_dim));
    }
  }
  gemm_acc(x.data().data(), weight.data().data(), out.data(), rows, in,
           out_dim, false, false);

  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return tape.record(
      Tensor::from_data(std::move(out_shape), std::move(out)), std::move(inputs),
      [x, weight, bias, rows, in, out_dim](const Tensor& y) {
        const double* dy = y.grad().data();
        if (needs_grad(x)) {
          Tensor gx = x;
          gemm_acc(dy, weight.data().data(), gx.mutable_grad().data(), rows,
                   out_dim, in, false, true);
        }
        if (needs_grad(weight)) {
          Tensor gw = weight;
          gemm_acc(x.data().data(), dy, gw.mutable_grad().data(), in, rows,
                   out_dim, true, false);
        }
        if (needs_grad(bias)) {
          Tensor gb = bias;
          auto g = gb.mutable_grad();
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t o = 0; o < out_dim; ++o) g[o] += dy[r * out_dim + o];
          }
        }
      });
}

Tensor dilated_causal_conv1d(Tape& tape, const Tensor& x, const Tensor& kernel,
                             const Tensor& bias, int dilation) {
  if (dilation < 1) {
    throw ConfigError("dilated_causal_conv1d: dilation must be >= 1, got " +
                      std::to_string(dilation));
  }
  if (!kernel.defined() || kernel.dim() != 3) {
    throw ConfigError("dilated_causal_conv1d: kernel must be "
                      "[channels_out×channels_in×k]");
  }
  if (x.dim() != 2 && x.dim() != 3) {
    throw DimensionError("dilated_causal_conv1d: input must be [C×T] or "
                         "[B×C×T], got " + shape_to_string(x.shape()));
  }
  const std::size_t batch = x.dim() == 3 ? x.size(0) : 1;
  const std::size_t c_in = x.size(x.dim() - 2);
  const std::size_t steps = x.size(x.dim() - 1);
  const std::size_t c_out = kernel.size(0);
  const std::size_t width = kernel.size(2);
  if (kernel.size(1) != c_in) shape_mismatch("dilated_causal_conv1d", x, kernel);
  if (bias.defined() && (bias.dim() != 1 || bias.size(0) != c_out)) {
    shape_mismatch("dilated_causal_conv1d (bias)", kernel, bias);
  }
  const std::size_t d = static_cast<std::size_t>(dilation);

  Shape out_shape = x.shape();
  out_shape[out_shape.size() - 2] = c_out;
  std::vector<double> out(batch * c_out * steps, 0.0);
  const auto in = x.data();
  const auto w = kernel.data();
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t o = 0; o < c_out; ++o) {
      double* out_row = out.data() + (s * c_out + o) * steps;
      if (bias.defined()) std::fill(out_row, out_row + steps, bias[o]);
      for (std::size_t i = 0; i < c_in; ++i) {
        const double* in_row = in.data() + (s * c_in + i) * steps;
        for (std::size_t j = 0; j < width; ++j) {
          const double wv = w[(o * c_in + i) * width + j];
          // Tap j reads x[t − (k−1−j)·d]; the padded prefix contributes 0.
          const std::size_t lag = (width - 1 - j) * d;
          for (std::size_t t = lag; t < steps; ++t) out_row[t] += wv * in_row[t - lag];
        }
      }
    }
  }

  std::vector<Tensor> inputs{x, kernel};
  if (bias.defined()) inputs.push_back(bias);
  return tape.record(
      Tensor::from_data(std::move(out_shape), std::move(out)), std::move(inputs),
      [x, kernel, bias, batch, c_in, c_out, steps, width, d](const Tensor& y) {
        const auto dy = y.grad();
        const auto in = x.data();
        const auto w = kernel.data();
        const bool gx_on = needs_grad(x), gw_on = needs_grad(kernel);
        Tensor gx = x, gw = kernel;
        for (std::size_t s = 0; s < batch; ++s) {
          for (std::size_t o = 0; o < c_out; ++o) {
            const double* dy_row = dy.data() + (s * c_out + o) * steps;
            for (std::size_t i = 0; i < c_in; ++i) {
              const std::size_t in_off = (s * c_in + i) * steps;
              for (std::size_t j = 0; j < width; ++j) {
                const std::size_t widx = (o * c_in + i) * width + j;
                const std::size_t lag = (width - 1 - j) * d;
                if (gw_on) {
                  double acc = 0.0;
                  for (std::size_t t = lag; t < steps; ++t) {
                    acc += dy_row[t] * in[in_off + t - lag];
                  }
                  gw.mutable_grad()[widx] += acc;
                }
                if (gx_on) {
                  double* g = gx.mutable_grad().data() + in_off;
                  const double wv = w[widx];
                  for (std::size_t t = lag; t < steps; ++t) g[t - lag] += wv * dy_row[t];
                }
              }
            }
          }
        }
        if (needs_grad(bias)) {
          Tensor gb = bias;
          auto g = gb.mutable_grad();
          for (std::size_t s = 0; s < batch; ++s) {
            for (std::size_t o = 0; o < c_out; ++o) {
              const double* dy_row = dy.data() + (s * c_out + o) * steps;
              for (std::size_t t = 0; t < steps; ++t) g[o] += dy_row[t];
            }
          }
        }
      });
}

}  // namespace tchgr
