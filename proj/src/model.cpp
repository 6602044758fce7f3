// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "tchgr/model.hpp"

#include <cmath>
#include <string>

#include "tchgr/error.hpp"
#include "tchgr/preprocess.hpp"
#include "tchgr/random.hpp"

namespace tchgr {

std::size_t num_blocks_for(std::size_t num_patches) {
  std::size_t z = 0;
  while ((std::size_t{1} << z) < num_patches) ++z;
  return z < 1 ? 1 : z;
}

ModelConfig ModelConfig::make(std::size_t channels, std::size_t seq_len,
                              std::size_t num_patches, std::size_t model_dim,
                              std::size_t kernel_size, std::size_t num_classes) {
  if (channels == 0 || seq_len == 0 || num_patches == 0 || model_dim == 0 ||
      kernel_size == 0 || num_classes == 0) {
    throw ConfigError("model sizes must be positive (C=" +
                      std::to_string(channels) + ", L=" + std::to_string(seq_len) +
                      ", N=" + std::to_string(num_patches) +
                      ", D=" + std::to_string(model_dim) +
                      ", k=" + std::to_string(kernel_size) +
                      ", classes=" + std::to_string(num_classes) + ")");
  }
  if (seq_len % num_patches != 0) {
    throw ConfigError("segment length L=" + std::to_string(seq_len) +
                      " is not divisible by the number of patches N=" +
                      std::to_string(num_patches));
  }
  ModelConfig cfg;
  cfg.channels = channels;
  cfg.seq_len = seq_len;
  cfg.num_patches = num_patches;
  cfg.patch_len = seq_len / num_patches;
  cfg.model_dim = model_dim;
  cfg.kernel_size = kernel_size;
  cfg.num_classes = num_classes;
  cfg.num_blocks = num_blocks_for(num_patches);
  for (std::size_t z = 0; z < cfg.num_blocks; ++z) {
    cfg.dilations.push_back(1 << z);
  }
  return cfg;
}

void ModelConfig::validate() const {
  const ModelConfig expected =
      make(channels, seq_len, num_patches, model_dim, kernel_size, num_classes);
  if (!(expected == *this)) {
    throw ConfigError("model config has inconsistent derived fields (P, Z or "
                      "dilations)");
  }
}

ModelConfig derive_config(int window_ms, std::size_t num_patches,
                          std::size_t model_dim, std::size_t channels,
                          double sample_rate_hz, std::size_t kernel_size,
                          std::size_t num_classes) {
  const std::size_t seq_len = window_samples(window_ms, sample_rate_hz);
  return ModelConfig::make(channels, seq_len, num_patches, model_dim,
                           kernel_size, num_classes);
}

// ---------------------------------------------------------------------------

namespace {

LinearWeights make_linear(std::size_t in, std::size_t out) {
  return {Tensor::zeros({in, out}, true), Tensor::zeros({out}, true)};
}

ConvWeights make_conv(std::size_t channels, std::size_t width) {
  return {Tensor::zeros({channels, channels, width}, true),
          Tensor::zeros({channels}, true)};
}

std::size_t fan_in(const std::string& name, const Tensor& t) {
  if (name.ends_with(".kernel")) return t.size(1) * t.size(2);
  return t.size(0);
}

}  // namespace

TchgrModel::TchgrModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t d = config_.model_dim;
  patch_projection = make_linear(config_.channels * config_.patch_len, d);
  attention = {make_linear(d, d), make_linear(d, d), make_linear(d, d),
               make_linear(d, d)};
  for (int dilation : config_.dilations) {
    blocks.push_back({make_conv(d, config_.kernel_size),
                      make_conv(d, config_.kernel_size), dilation});
  }
  classifier = make_linear(config_.num_patches * d, config_.num_classes);
}

TchgrModel::TchgrModel(ModelConfig config, std::uint64_t seed)
    : TchgrModel(std::move(config)) {
  Rng rng(seed);
  for (NamedParameter& p : parameters()) {
    if (p.name.ends_with(".bias")) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in(p.name, p.tensor)));
    for (double& v : p.tensor.mutable_data()) v = uniform(rng, -bound, bound);
  }
}

TchgrModel TchgrModel::zeros(ModelConfig config) {
  return TchgrModel(std::move(config));
}

std::vector<NamedParameter> TchgrModel::parameters() const {
  std::vector<NamedParameter> out;
  auto add_linear = [&out](const std::string& prefix, const LinearWeights& w) {
    out.push_back({prefix + ".weight", w.weight});
    out.push_back({prefix + ".bias", w.bias});
  };
  auto add_conv = [&out](const std::string& prefix, const ConvWeights& w) {
    out.push_back({prefix + ".kernel", w.kernel});
    out.push_back({prefix + ".bias", w.bias});
  };
  add_linear("embed", patch_projection);
  add_linear("attn.query", attention.query);
  add_linear("attn.key", attention.key);
  add_linear("attn.value", attention.value);
  add_linear("attn.output", attention.output);
  for (std::size_t z = 0; z < blocks.size(); ++z) {
    const std::string prefix = "block" + std::to_string(z);
    add_conv(prefix + ".conv1", blocks[z].conv1);
    add_conv(prefix + ".conv2", blocks[z].conv2);
  }
  add_linear("classifier", classifier);
  return out;
}

TchgrModel TchgrModel::clone() const {
  TchgrModel copy(config_);
  auto dst = copy.parameters();
  const auto src = parameters();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto from = src[i].tensor.data();
    std::copy(from.begin(), from.end(), dst[i].tensor.mutable_data().begin());
  }
  return copy;
}

// ---------------------------------------------------------------------------

namespace {

// [B×C×L] → [B×N×(C·P)], channel-major within each patch.
Tensor patchify(Tape& tape, const Tensor& x, std::size_t num_patches) {
  const std::size_t batch = x.size(0), channels = x.size(1), len = x.size(2);
  const std::size_t patch = len / num_patches;
  const std::size_t flat = channels * patch;
  std::vector<double> out(x.numel());
  const auto in = x.data();
  auto index = [=](std::size_t b, std::size_t c, std::size_t j, std::size_t p) {
    return std::pair{(b * channels + c) * len + j * patch + p,
                     (b * num_patches + j) * flat + c * patch + p};
  };
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t j = 0; j < num_patches; ++j)
        for (std::size_t p = 0; p < patch; ++p) {
          const auto [src, dst] = index(b, c, j, p);
          out[dst] = in[src];
        }
  return tape.record(
      Tensor::from_data({batch, num_patches, flat}, std::move(out)), {x},
      [x, batch, channels, num_patches, patch, index](const Tensor& y) {
        Tensor gx = x;
        auto g = gx.mutable_grad();
        const auto dy = y.grad();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t j = 0; j < num_patches; ++j)
              for (std::size_t p = 0; p < patch; ++p) {
                const auto [src, dst] = index(b, c, j, p);
                g[src] += dy[dst];
              }
      });
}

bool is_batched(const Tensor& t, std::size_t unbatched_rank) {
  if (t.dim() == unbatched_rank) return false;
  if (t.dim() == unbatched_rank + 1) return true;
  throw DimensionError("expected rank " + std::to_string(unbatched_rank) +
                       " or " + std::to_string(unbatched_rank + 1) +
                       ", got " + shape_to_string(t.shape()));
}

}  // namespace

Tensor embed_patches(Tape& tape, const Tensor& x, const ModelConfig& config,
                     const LinearWeights& projection) {
  const bool batched = is_batched(x, 2);
  const std::size_t batch = batched ? x.size(0) : 1;
  const Shape expected{batch, config.channels, config.seq_len};
  Tensor input = batched ? x : reshape(tape, x, {1, x.size(0), x.size(1)});
  if (input.shape() != expected) {
    throw DimensionError("segment shape " + shape_to_string(x.shape()) +
                         " does not match model input C×L = " +
                         std::to_string(config.channels) + "×" +
                         std::to_string(config.seq_len));
  }
  Tensor patches = patchify(tape, input, config.num_patches);
  Tensor embedded = linear(tape, patches, projection.weight, projection.bias);
  if (batched) return embedded;
  return reshape(tape, embedded, {config.num_patches, config.model_dim});
}

Tensor attention_map(Tape& tape, const Tensor& e, const AttentionWeights& w) {
  const Tensor q = linear(tape, e, w.query.weight, w.query.bias);
  const Tensor k = linear(tape, e, w.key.weight, w.key.bias);
  const double d_k = static_cast<double>(e.size(e.dim() - 1));
  const Tensor scores =
      scale(tape, matmul(tape, q, transpose_last2(tape, k)), 1.0 / std::sqrt(d_k));
  return softmax_lastdim(tape, scores);
}

Tensor self_attention(Tape& tape, const Tensor& e, const AttentionWeights& w) {
  const Tensor a = attention_map(tape, e, w);
  const Tensor v = linear(tape, e, w.value.weight, w.value.bias);
  const Tensor mixed = matmul(tape, a, v);
  return add(tape, e, linear(tape, mixed, w.output.weight, w.output.bias));
}

Tensor tc_block(Tape& tape, const Tensor& h, const TcBlockWeights& w) {
  // Convolutions run over the patch axis with D channels.
  const Tensor seq = transpose_last2(tape, h);
  Tensor z = relu(tape, dilated_causal_conv1d(tape, seq, w.conv1.kernel,
                                              w.conv1.bias, w.dilation));
  z = relu(tape, dilated_causal_conv1d(tape, z, w.conv2.kernel, w.conv2.bias,
                                       w.dilation));
  return add(tape, h, transpose_last2(tape, z));
}

Tensor forward(Tape& tape, const Tensor& x, const TchgrModel& model) {
  const ModelConfig& cfg = model.config();
  const bool batched = is_batched(x, 2);
  const Tensor input = batched ? x : reshape(tape, x, {1, x.size(0), x.size(1)});
  const std::size_t batch = input.size(0);

  Tensor h = embed_patches(tape, input, cfg, model.patch_projection);
  h = self_attention(tape, h, model.attention);
  for (const TcBlockWeights& block : model.blocks) h = tc_block(tape, h, block);
  const Tensor features =
      reshape(tape, h, {batch, cfg.num_patches * cfg.model_dim});
  const Tensor logits =
      linear(tape, features, model.classifier.weight, model.classifier.bias);
  if (batched) return logits;
  return reshape(tape, logits, {cfg.num_classes});
}

// ---------------------------------------------------------------------------

ParameterCount count_parameters(const TchgrModel& model) {
  ParameterCount count;
  for (const NamedParameter& p : model.parameters()) {
    const std::size_t n = p.tensor.numel();
    if (p.name.starts_with("embed.")) {
      count.embedding += n;
    } else if (p.name.starts_with("attn.")) {
      count.attention += n;
    } else if (p.name.starts_with("block")) {
      count.blocks += n;
    } else {
      count.classifier += n;
    }
    count.total += n;
  }
  return count;
}

ParameterCount closed_form_parameter_count(const ModelConfig& c) {
  const std::size_t d = c.model_dim;
  ParameterCount count;
  count.embedding = c.channels * c.patch_len * d + d;
  count.attention = 4 * (d * d + d);
  count.blocks = c.num_blocks * 2 * (d * d * c.kernel_size + d);
  count.classifier = c.num_patches * d * c.num_classes + c.num_classes;
  count.total = count.embedding + count.attention + count.blocks + count.classifier;
  return count;
}

}  // namespace tchgr
