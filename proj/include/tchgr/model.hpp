// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

// Patch-embedded self-attention followed by a stack of dilated causal
// temporal-convolution blocks and a linear classifier over the flattened
// N×D features.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tchgr/recording.hpp"
#include "tchgr/tensor.hpp"

namespace tchgr {

struct ModelConfig {
  std::size_t channels = 0;     // C
  std::size_t seq_len = 0;      // L
  std::size_t num_patches = 0;  // N
  std::size_t patch_len = 0;    // P = L / N
  std::size_t model_dim = 0;    // D
  std::size_t kernel_size = 3;  // k
  std::size_t num_classes = kExerciseBGestures;
  std::size_t num_blocks = 0;   // Z = max(1, ⌈log₂ N⌉)
  std::vector<int> dilations;   // 1, 2, 4, …, 2^{Z−1}

  // Derives P, Z and the dilations; throws ConfigError when N does not
  // divide L or any size is zero.
  static ModelConfig make(std::size_t channels, std::size_t seq_len,
                          std::size_t num_patches, std::size_t model_dim,
                          std::size_t kernel_size = 3,
                          std::size_t num_classes = kExerciseBGestures);

  // Re-checks every derived field.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// ⌈log₂ n⌉ with a floor of 1.
std::size_t num_blocks_for(std::size_t num_patches);

ModelConfig derive_config(int window_ms, std::size_t num_patches,
                          std::size_t model_dim,
                          std::size_t channels = kDb2Channels,
                          double sample_rate_hz = kDb2SampleRateHz,
                          std::size_t kernel_size = 3,
                          std::size_t num_classes = kExerciseBGestures);

struct LinearWeights {
  Tensor weight;  // [in×out]
  Tensor bias;    // [out]
};

struct ConvWeights {
  Tensor kernel;  // [out×in×k]
  Tensor bias;    // [out]
};

// Single head, d_k = D.
struct AttentionWeights {
  LinearWeights query;
  LinearWeights key;
  LinearWeights value;
  LinearWeights output;
};

struct TcBlockWeights {
  ConvWeights conv1;
  ConvWeights conv2;
  int dilation = 1;
};

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

class TchgrModel {
 public:
  // Fan-in uniform weights, zero biases, drawn in parameters() order.
  TchgrModel(ModelConfig config, std::uint64_t seed);

  // All weights and biases zero.
  static TchgrModel zeros(ModelConfig config);

  const ModelConfig& config() const { return config_; }

  // Stable order; names are unique and used by checkpoints.
  std::vector<NamedParameter> parameters() const;

  // Detached copy of every weight.
  TchgrModel clone() const;

  LinearWeights patch_projection;  // C·P → D
  AttentionWeights attention;
  std::vector<TcBlockWeights> blocks;
  LinearWeights classifier;  // N·D → classes

 private:
  explicit TchgrModel(ModelConfig config);

  ModelConfig config_;
};

// x: [C×L] or [B×C×L] → [N×D] or [B×N×D]. Patch j covers columns
// [jP, (j+1)P) and is flattened channel-major before projection.
Tensor embed_patches(Tape& tape, const Tensor& x, const ModelConfig& config,
                     const LinearWeights& projection);

// Row-stochastic map softmax(QKᵀ/√D), [N×N] or [B×N×N].
Tensor attention_map(Tape& tape, const Tensor& e, const AttentionWeights& w);

// e + (A·V)·Wo.
Tensor self_attention(Tape& tape, const Tensor& e, const AttentionWeights& w);

// h + ReLU(conv2(ReLU(conv1(h)))) along the patch axis; h is [N×D] or
// [B×N×D].
Tensor tc_block(Tape& tape, const Tensor& h, const TcBlockWeights& w);

// Logits [classes] for a single [C×L] segment, [B×classes] for a batch.
Tensor forward(Tape& tape, const Tensor& x, const TchgrModel& model);

struct ParameterCount {
  std::size_t embedding = 0;
  std::size_t attention = 0;
  std::size_t blocks = 0;
  std::size_t classifier = 0;
  std::size_t total = 0;

  friend bool operator==(const ParameterCount&, const ParameterCount&) = default;
};

// Sums the sizes of the model's own buffers, grouped by module.
ParameterCount count_parameters(const TchgrModel& model);

// (C·P·D + D) + 4(D² + D) + Z·2·(D²·k + D) + (N·D·classes + classes).
ParameterCount closed_form_parameter_count(const ModelConfig& config);

// Parameter count of the dilated-LSTM reference model the compact variants
// are compared against.
inline constexpr std::size_t kReferenceLstmParams = 1'102'801;

}  // namespace tchgr
