// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

// Dense float64 tensors with tape-based reverse-mode differentiation.
//
// A Tensor is a cheap handle onto shared storage. Leaf tensors (parameters,
// inputs) are created directly; every other tensor is produced by an op that
// takes a Tape. When any input requires a gradient the op appends a node to
// the tape, and Tape::backward replays those nodes last-to-first. Nodes are
// appended only after their inputs exist, so creation order is a topological
// order and its reverse is a valid reverse-topological replay.
//
// A tape and the tensors it records belong to one thread at a time.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tchgr {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }

  const Shape& shape() const;
  std::size_t dim() const { return shape().size(); }
  std::size_t size(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  // Direct writes are for optimizers and initializers; they bypass the tape.
  std::span<double> mutable_data();

  double item() const;
  double operator[](std::size_t flat_index) const { return data()[flat_index]; }

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  // Allocates a zero gradient buffer if none exists yet.
  void ensure_grad();
  void zero_grad();
  void clear_grad();

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  struct Storage {
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::vector<double> grad;
  };

  friend class Tape;

  explicit Tensor(std::shared_ptr<Storage> impl) : impl_(std::move(impl)) {}
  const Storage& storage() const;
  Storage& storage();

  std::shared_ptr<Storage> impl_;
};

// Ordered record of differentiable operations.
class Tape {
 public:
  // Receives the output tensor, whose grad() holds dL/d(output).
  using BackwardFn = std::function<void(const Tensor& output)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Registers `output` as computed from `inputs`. The node is kept only when
  // at least one input requires a gradient; in that case `output` is marked
  // as requiring one too. Returns `output`.
  Tensor record(Tensor output, std::vector<Tensor> inputs, BackwardFn backward);

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
  // requires_grad ancestor. Rejects non-scalar losses and a second call
  // before reset().
  void backward(const Tensor& loss);

  // Drops all recorded nodes and re-arms backward().
  void reset();

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

 private:
  struct Node {
    Tensor output;
    std::vector<Tensor> inputs;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// a[m×k]·b[k×n]; also a[B×m×k]·b[B×k×n] and a[B×m×k]·b[k×n].
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);

// Swaps the last two axes of a rank-2 or rank-3 tensor.
Tensor transpose_last2(Tape& tape, const Tensor& x);

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& x, double factor);
Tensor relu(Tape& tape, const Tensor& x);
Tensor softmax_lastdim(Tape& tape, const Tensor& x);

// Row-major reinterpretation; element count must be preserved.
Tensor reshape(Tape& tape, const Tensor& x, Shape shape);

// Sum of all elements, returned as a scalar (shape {}).
Tensor sum(Tape& tape, const Tensor& x);

// x[...×in]·weight[in×out] + bias[out].
Tensor linear(Tape& tape, const Tensor& x, const Tensor& weight,
              const Tensor& bias);

// Causal 1-D convolution with taps spaced `dilation` apart. x is
// [channels_in×T] or [B×channels_in×T]; kernel is
// [channels_out×channels_in×k]; bias is [channels_out] or undefined. The input
// is left-padded with (k−1)·dilation zeros so the output has length T, and
// kernel tap k−1 aligns with the current time step.
Tensor dilated_causal_conv1d(Tape& tape, const Tensor& x, const Tensor& kernel,
                             const Tensor& bias, int dilation);

}  // namespace tchgr
