// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tchgr/model.hpp"
#include "tchgr/random.hpp"
#include "tchgr/recording.hpp"
#include "tchgr/tensor.hpp"

namespace tchgr {

// Mean over the batch of −log softmax(logits)[label], via log-sum-exp.
// logits is [B×classes]; throws DataError on an out-of-range label.
Tensor cross_entropy(Tape& tape, const Tensor& logits, std::span<const int> labels);

struct AdamState {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

// One bias-corrected Adam update over every parameter, using each tensor's
// accumulated grad (missing grad counts as zero). Moment buffers are sized on
// first use. Throws TrainingError naming the first parameter with a
// non-finite gradient; nothing is modified in that case.
void adam_step(std::span<const NamedParameter> params, AdamState& state);

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  bool shuffle = true;
  double lr = 1e-4;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double train_accuracy = 0.0;
};

struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  ModelConfig config;
  std::vector<std::pair<std::string, std::vector<double>>> weights;
  AdamState adam;
  std::uint64_t epoch = 0;
  std::string rng_state;
};

// Little-endian binary: magic "TCHG", u32 version, u32 buffer count, then
// per buffer u32 name length, name bytes, u64 byte length, payload.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

// Throws FormatError (with byte offset) on corrupt or truncated input and on
// a version other than Checkpoint::kFormatVersion; IoError if unreadable.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Stacks segments [indices] into a [B×C×L] tensor.
Tensor stack_segments(const SegmentSet& set, std::span<const std::size_t> indices);

// Owns the model, optimizer and shuffle RNG so runs can be checkpointed and
// resumed exactly.
class Trainer {
 public:
  Trainer(TchgrModel model, TrainConfig config);

  // Rebuilds model, optimizer state, epoch counter and RNG from a checkpoint.
  static Trainer resume(const Checkpoint& ckpt, TrainConfig config);

  // Runs `epochs` more epochs; throws UsageError on an empty set and
  // TrainingError on a non-finite loss or gradient.
  std::vector<EpochStats> run(const SegmentSet& train_set, std::size_t epochs);

  Checkpoint checkpoint() const;

  const TchgrModel& model() const { return model_; }
  const AdamState& optimizer() const { return adam_; }
  std::uint64_t epoch() const { return epoch_; }

 private:
  TchgrModel model_;
  TrainConfig config_;
  AdamState adam_;
  Rng rng_;
  std::uint64_t epoch_ = 0;
};

struct TrainResult {
  TchgrModel model;
  std::vector<EpochStats> trace;
};

TrainResult train(TchgrModel model, const SegmentSet& train_set,
                  const TrainConfig& config);

// CSV with header epoch,loss,train_acc.
void write_trace_csv(const std::filesystem::path& path,
                     std::span<const EpochStats> trace);

// Formats a double with the shortest representation that parses back exactly.
std::string format_double(double value);

}  // namespace tchgr
