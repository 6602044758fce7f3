// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include "tchgr/data_io.hpp"
#include "tchgr/model.hpp"
#include "tchgr/preprocess.hpp"
#include "tchgr/training.hpp"

namespace tchgr::cli {

// Contents of a JSON run config. Missing keys keep these defaults; flags
// given on the command line win over the file.
struct RunConfig {
  int window_ms = 200;
  std::optional<int> stride_ms;  // defaults to window_ms
  std::size_t num_patches = 10;
  std::size_t model_dim = 12;
  std::size_t kernel_size = 3;
  std::size_t num_classes = kExerciseBGestures;
  double mu = 255.0;
  double cutoff_hz = 450.0;
  double sample_rate_hz = kDb2SampleRateHz;
  std::size_t channels = kDb2Channels;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  double lr = 1e-4;
  std::optional<std::uint64_t> seed;
  std::set<int> train_repetitions{1, 3, 4, 6};
  std::set<int> test_repetitions{2, 5};

  // Optional default paths ("paths" object in the file).
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> segments;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> out_dir;

  int effective_stride_ms() const { return stride_ms.value_or(window_ms); }

  // Flag, then config file, then TCHGR_SEED, then 0.
  std::uint64_t resolved_seed() const;

  PreprocessParams preprocess_params() const;
  SplitSpec split_spec() const;
  TrainConfig train_config() const;
  // Model geometry implied by window, rate and channel count.
  ModelConfig model_config() const;

  // Checks every value against the module preconditions; throws ConfigError.
  // Commands that take L from a segment file skip the window-derived model
  // geometry check.
  void validate(bool check_model_geometry = true) const;
};

// ConfigError on unknown keys or wrong types; IoError if unreadable.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace tchgr::cli
