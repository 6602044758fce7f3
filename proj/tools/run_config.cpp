// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "tchgr/error.hpp"

namespace tchgr::cli {

std::uint64_t RunConfig::resolved_seed() const {
  if (seed) return *seed;
  if (const char* env = std::getenv("TCHGR_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError("TCHGR_SEED must be an unsigned integer");
    return value;
  }
  return 0;
}

PreprocessParams RunConfig::preprocess_params() const {
  PreprocessParams p;
  p.filter = {cutoff_hz, sample_rate_hz};
  p.mu_law = {mu};
  p.window_ms = window_ms;
  p.stride_ms = effective_stride_ms();
  return p;
}

SplitSpec RunConfig::split_spec() const {
  return {train_repetitions, test_repetitions};
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.seed = resolved_seed();
  t.lr = lr;
  return t;
}

ModelConfig RunConfig::model_config() const {
  return derive_config(window_ms, num_patches, model_dim, channels, sample_rate_hz,
                       kernel_size, num_classes);
}

void RunConfig::validate(bool check_model_geometry) const {
  preprocess_params().filter.validate();
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  window_samples(window_ms, sample_rate_hz);
  window_samples(effective_stride_ms(), sample_rate_hz);
  if (check_model_geometry) model_config();
  split_spec().validate();
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(lr >= 0.0)) throw ConfigError("lr must be non-negative");
  resolved_seed();
}

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  T value{};
  read_key(j, key, value);
  dst = value;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  static const std::set<std::string> known{
      "window_ms", "stride_ms", "num_patches", "model_dim", "kernel_size",
      "num_classes", "mu", "cutoff_hz", "sample_rate_hz", "channels",
      "batch_size", "epochs", "lr", "seed", "train_repetitions",
      "test_repetitions", "paths"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
  }

  RunConfig cfg;
  read_key(j, "window_ms", cfg.window_ms);
  read_optional(j, "stride_ms", cfg.stride_ms);
  read_key(j, "num_patches", cfg.num_patches);
  read_key(j, "model_dim", cfg.model_dim);
  read_key(j, "kernel_size", cfg.kernel_size);
  read_key(j, "num_classes", cfg.num_classes);
  read_key(j, "mu", cfg.mu);
  read_key(j, "cutoff_hz", cfg.cutoff_hz);
  read_key(j, "sample_rate_hz", cfg.sample_rate_hz);
  read_key(j, "channels", cfg.channels);
  read_key(j, "batch_size", cfg.batch_size);
  read_key(j, "epochs", cfg.epochs);
  read_key(j, "lr", cfg.lr);
  read_optional(j, "seed", cfg.seed);
  read_key(j, "train_repetitions", cfg.train_repetitions);
  read_key(j, "test_repetitions", cfg.test_repetitions);
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    if (!p.is_object()) throw ConfigError("config key 'paths' must be an object");
    auto path_key = [&p](const char* key, std::optional<std::filesystem::path>& dst) {
      std::optional<std::string> s;
      read_optional(p, key, s);
      if (s) dst = *s;
    };
    path_key("input", cfg.input);
    path_key("segments", cfg.segments);
    path_key("checkpoint", cfg.checkpoint);
    path_key("out_dir", cfg.out_dir);
  }
  return cfg;
}

}  // namespace tchgr::cli
