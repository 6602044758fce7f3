// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <string>

#include "binary_io.hpp"
#include "tchgr/error.hpp"
#include "tchgr/training.hpp"

namespace tchgr {

namespace {

constexpr std::string_view kMagic = "TCHG";

using Buffer = std::pair<std::string, std::string>;

std::string encode_f64(const std::vector<double>& values) {
  detail::ByteWriter w;
  for (double v : values) w.put_f64(v);
  return std::string(w.bytes().begin(), w.bytes().end());
}

std::string encode_u64(std::initializer_list<std::uint64_t> values) {
  detail::ByteWriter w;
  for (std::uint64_t v : values) w.put_u64(v);
  return std::string(w.bytes().begin(), w.bytes().end());
}

std::vector<double> decode_f64(const std::string& name, const std::string& raw) {
  if (raw.size() % 8 != 0) {
    throw FormatError("checkpoint buffer '" + name + "' is not a whole number of f64");
  }
  const std::vector<char> bytes(raw.begin(), raw.end());
  detail::ByteReader r(bytes, "checkpoint buffer '" + name + "'");
  std::vector<double> out(raw.size() / 8);
  for (double& v : out) v = r.get_f64();
  return out;
}

std::vector<std::uint64_t> decode_u64(const std::string& name, const std::string& raw,
                                      std::size_t count) {
  if (raw.size() != count * 8) {
    throw FormatError("checkpoint buffer '" + name + "' must hold " +
                      std::to_string(count) + " u64 values");
  }
  const std::vector<char> bytes(raw.begin(), raw.end());
  detail::ByteReader r(bytes, "checkpoint buffer '" + name + "'");
  std::vector<std::uint64_t> out(count);
  for (auto& v : out) v = r.get_u64();
  return out;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::vector<Buffer> buffers;
  const ModelConfig& c = ckpt.config;
  buffers.emplace_back("config", encode_u64({c.channels, c.seq_len, c.num_patches,
                                             c.model_dim, c.kernel_size,
                                             c.num_classes}));
  for (const auto& [name, values] : ckpt.weights) {
    buffers.emplace_back("param/" + name, encode_f64(values));
  }
  buffers.emplace_back("adam/hyper", encode_f64({ckpt.adam.lr, ckpt.adam.beta1,
                                                 ckpt.adam.beta2, ckpt.adam.eps}));
  buffers.emplace_back("adam/step", encode_u64({ckpt.adam.step}));
  for (std::size_t i = 0; i < ckpt.adam.m.size(); ++i) {
    const std::string tag = std::to_string(i);
    buffers.emplace_back("adam/m/" + tag, encode_f64(ckpt.adam.m[i]));
    buffers.emplace_back("adam/v/" + tag, encode_f64(ckpt.adam.v.at(i)));
  }
  buffers.emplace_back("epoch", encode_u64({ckpt.epoch}));
  buffers.emplace_back("rng", ckpt.rng_state);

  detail::ByteWriter w;
  w.put_bytes(kMagic);
  w.put_u32(Checkpoint::kFormatVersion);
  w.put_u32(static_cast<std::uint32_t>(buffers.size()));
  for (const auto& [name, payload] : buffers) {
    w.put_u32(static_cast<std::uint32_t>(name.size()));
    w.put_bytes(name);
    w.put_u64(payload.size());
    w.put_bytes(payload);
  }
  detail::write_file(path, w.bytes());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::vector<char> bytes = detail::read_file(path);
  detail::ByteReader r(bytes, "checkpoint '" + path.string() + "'");
  if (r.get_bytes(4) != kMagic) r.fail("bad magic (expected \"TCHG\")");
  const std::uint32_t version = r.get_u32();
  if (version != Checkpoint::kFormatVersion) {
    throw FormatError("checkpoint '" + path.string() + "' has format version " +
                      std::to_string(version) + ", this build reads version " +
                      std::to_string(Checkpoint::kFormatVersion));
  }
  const std::uint32_t count = r.get_u32();
  std::vector<Buffer> buffers;
  std::map<std::string, std::size_t> index;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = r.get_u32();
    std::string name = r.get_bytes(name_len);
    const std::uint64_t size = r.get_u64();
    std::string payload = r.get_bytes(size);
    if (!index.emplace(name, buffers.size()).second) {
      r.fail("duplicate buffer '" + name + "'");
    }
    buffers.emplace_back(std::move(name), std::move(payload));
  }
  if (r.remaining() != 0) r.fail("trailing bytes after last buffer");

  auto take = [&](const std::string& name) -> const std::string& {
    const auto it = index.find(name);
    if (it == index.end()) {
      throw FormatError("checkpoint '" + path.string() + "' lacks buffer '" + name + "'");
    }
    return buffers[it->second].second;
  };

  Checkpoint ckpt;
  const auto dims = decode_u64("config", take("config"), 6);
  try {
    ckpt.config = ModelConfig::make(dims[0], dims[1], dims[2], dims[3], dims[4], dims[5]);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config is invalid: ") + e.what());
  }
  for (const auto& [name, payload] : buffers) {
    if (name.starts_with("param/")) {
      ckpt.weights.emplace_back(name.substr(6), decode_f64(name, payload));
    }
  }
  const auto hyper = decode_f64("adam/hyper", take("adam/hyper"));
  if (hyper.size() != 4) throw FormatError("checkpoint adam/hyper must hold 4 values");
  ckpt.adam.lr = hyper[0];
  ckpt.adam.beta1 = hyper[1];
  ckpt.adam.beta2 = hyper[2];
  ckpt.adam.eps = hyper[3];
  ckpt.adam.step = decode_u64("adam/step", take("adam/step"), 1)[0];
  for (std::size_t i = 0; index.count("adam/m/" + std::to_string(i)); ++i) {
    const std::string tag = std::to_string(i);
    ckpt.adam.m.push_back(decode_f64("adam/m/" + tag, take("adam/m/" + tag)));
    ckpt.adam.v.push_back(decode_f64("adam/v/" + tag, take("adam/v/" + tag)));
  }
  ckpt.epoch = decode_u64("epoch", take("epoch"), 1)[0];
  ckpt.rng_state = take("rng");
  return ckpt;
}

}  // namespace tchgr
