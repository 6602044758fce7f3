// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "tchgr/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tchgr/error.hpp"
#include "tchgr/stats.hpp"

namespace tchgr {

Tensor cross_entropy(Tape& tape, const Tensor& logits, std::span<const int> labels) {
  if (logits.dim() != 2) {
    throw DimensionError("cross_entropy expects [B×classes] logits, got " +
                         shape_to_string(logits.shape()));
  }
  const std::size_t batch = logits.size(0), classes = logits.size(1);
  if (labels.size() != batch) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) +
                         " labels for a batch of " + std::to_string(batch));
  }
  for (std::size_t b = 0; b < batch; ++b) {
    if (labels[b] < 0 || static_cast<std::size_t>(labels[b]) >= classes) {
      throw DataError("label " + std::to_string(labels[b]) + " at index " +
                      std::to_string(b) + " outside [0, " +
                      std::to_string(classes) + ")");
    }
  }

  // Cache the probabilities; they are exactly what the gradient needs.
  std::vector<double> probs(batch * classes);
  double total = 0.0;
  const auto z = logits.data();
  for (std::size_t b = 0; b < batch; ++b) {
    const double* row = z.data() + b * classes;
    const double peak = *std::max_element(row, row + classes);
    double denom = 0.0;
    for (std::size_t k = 0; k < classes; ++k) denom += std::exp(row[k] - peak);
    const double log_denom = std::log(denom);
    for (std::size_t k = 0; k < classes; ++k) {
      probs[b * classes + k] = std::exp(row[k] - peak - log_denom);
    }
    total += peak + log_denom - row[labels[b]];
  }
  const double mean = total / static_cast<double>(batch);

  std::vector<int> targets(labels.begin(), labels.end());
  return tape.record(
      Tensor::scalar(mean), {logits},
      [logits, probs = std::move(probs), targets = std::move(targets), batch,
       classes](const Tensor& y) {
        Tensor g_logits = logits;
        auto g = g_logits.mutable_grad();
        const double dy = y.grad()[0] / static_cast<double>(batch);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t k = 0; k < classes; ++k) {
            const double onehot = static_cast<int>(k) == targets[b] ? 1.0 : 0.0;
            g[b * classes + k] += dy * (probs[b * classes + k] - onehot);
          }
        }
      });
}

void adam_step(std::span<const NamedParameter> params, AdamState& state) {
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw StateError("optimizer state tracks " + std::to_string(state.m.size()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  for (const NamedParameter& p : params) {
    if (!p.tensor.has_grad()) continue;
    for (double g : p.tensor.grad()) {
      if (!std::isfinite(g)) {
        throw TrainingError("non-finite gradient in parameter '" + p.name + "'");
      }
    }
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor param = params[i].tensor;
    auto w = param.mutable_data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.empty()) {
      m.assign(w.size(), 0.0);
      v.assign(w.size(), 0.0);
    }
    if (m.size() != w.size() || v.size() != w.size()) {
      throw StateError("moment buffer size mismatch for '" + params[i].name + "'");
    }
    const bool has = param.has_grad();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double g = has ? param.grad()[j] : 0.0;
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      w[j] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

Tensor stack_segments(const SegmentSet& set, std::span<const std::size_t> indices) {
  if (indices.empty()) throw UsageError("stack_segments: empty batch");
  const std::size_t per = set.channels * set.length;
  std::vector<double> data;
  data.reserve(indices.size() * per);
  for (std::size_t idx : indices) {
    const Segment& seg = set.segments.at(idx);
    if (seg.x.size() != per) {
      throw DimensionError("segment " + std::to_string(idx) + " holds " +
                           std::to_string(seg.x.size()) + " values, expected " +
                           std::to_string(per));
    }
    data.insert(data.end(), seg.x.begin(), seg.x.end());
  }
  return Tensor::from_data({indices.size(), set.channels, set.length}, std::move(data));
}

// ---------------------------------------------------------------------------

Trainer::Trainer(TchgrModel model, TrainConfig config)
    : model_(std::move(model)), config_(config), rng_(config.seed) {
  if (config_.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  adam_.lr = config_.lr;
}

Trainer Trainer::resume(const Checkpoint& ckpt, TrainConfig config) {
  TchgrModel model = TchgrModel::zeros(ckpt.config);
  auto params = model.parameters();
  if (params.size() != ckpt.weights.size()) {
    throw FormatError("checkpoint holds " + std::to_string(ckpt.weights.size()) +
                      " weight buffers, model expects " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, values] = ckpt.weights[i];
    if (name != params[i].name || values.size() != params[i].tensor.numel()) {
      throw FormatError("checkpoint buffer '" + name + "' does not match model "
                        "parameter '" + params[i].name + "'");
    }
    std::copy(values.begin(), values.end(), params[i].tensor.mutable_data().begin());
  }
  Trainer trainer(std::move(model), config);
  trainer.adam_ = ckpt.adam;
  trainer.adam_.lr = config.lr;
  trainer.epoch_ = ckpt.epoch;
  std::istringstream rng_in(ckpt.rng_state);
  rng_in >> trainer.rng_;
  if (!rng_in) throw FormatError("checkpoint RNG state is unreadable");
  return trainer;
}

std::vector<EpochStats> Trainer::run(const SegmentSet& train_set, std::size_t epochs) {
  if (train_set.empty()) throw UsageError("training set is empty");
  const ModelConfig& cfg = model_.config();
  if (train_set.channels != cfg.channels || train_set.length != cfg.seq_len) {
    throw DimensionError("segments are " + std::to_string(train_set.channels) +
                         "×" + std::to_string(train_set.length) +
                         " but the model expects " + std::to_string(cfg.channels) +
                         "×" + std::to_string(cfg.seq_len));
  }

  const auto params = model_.parameters();
  std::vector<std::size_t> order(train_set.size());
  std::vector<EpochStats> trace;
  for (std::size_t e = 0; e < epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config_.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[uniform_index(rng_, i)]);
      }
    }

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config_.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, stop - start);
      std::vector<int> labels;
      labels.reserve(idx.size());
      for (std::size_t i : idx) labels.push_back(train_set.segments[i].label);

      Tape tape;
      const Tensor logits = forward(tape, stack_segments(train_set, idx), model_);
      const Tensor loss = cross_entropy(tape, logits, labels);
      if (!std::isfinite(loss.item())) {
        throw TrainingError("non-finite loss at epoch " +
                            std::to_string(epoch_ + 1) + ", batch starting at " +
                            std::to_string(start));
      }
      for (const NamedParameter& p : params) {
        Tensor t = p.tensor;
        t.clear_grad();
      }
      tape.backward(loss);
      adam_step(params, adam_);

      loss_sum += loss.item() * static_cast<double>(idx.size());
      const auto predicted = predict_classes(logits);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (predicted[i] == labels[i]) ++correct;
      }
    }
    for (const NamedParameter& p : params) {
      Tensor t = p.tensor;
      t.clear_grad();
    }
    ++epoch_;
    const double n = static_cast<double>(order.size());
    trace.push_back({epoch_, loss_sum / n, static_cast<double>(correct) / n});
  }
  return trace;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint ckpt;
  ckpt.config = model_.config();
  for (const NamedParameter& p : model_.parameters()) {
    ckpt.weights.emplace_back(p.name, std::vector<double>(p.tensor.data().begin(),
                                                          p.tensor.data().end()));
  }
  ckpt.adam = adam_;
  ckpt.epoch = epoch_;
  std::ostringstream rng_out;
  rng_out << rng_;
  ckpt.rng_state = rng_out.str();
  return ckpt;
}

TrainResult train(TchgrModel model, const SegmentSet& train_set,
                  const TrainConfig& config) {
  if (train_set.empty()) throw UsageError("training set is empty");
  Trainer trainer(std::move(model), config);
  auto trace = trainer.run(train_set, config.epochs);
  return {trainer.model().clone(), std::move(trace)};
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_trace_csv(const std::filesystem::path& path,
                     std::span<const EpochStats> trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace CSV '" + path.string() + "'");
  out << "epoch,loss,train_acc\n";
  for (const EpochStats& s : trace) {
    out << s.epoch << ',' << format_double(s.loss) << ','
        << format_double(s.train_accuracy) << '\n';
  }
  if (!out) throw IoError("failed writing trace CSV '" + path.string() + "'");
}

}  // namespace tchgr
