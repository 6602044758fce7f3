// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

// Little-endian byte encoding shared by the on-disk formats.

#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tchgr::detail {

class ByteWriter {
 public:
  void put_u16(std::uint16_t v) { put_le(v, 2); }
  void put_u32(std::uint32_t v) { put_le(v, 4); }
  void put_u64(std::uint64_t v) { put_le(v, 8); }
  void put_f32(float v) { put_le(std::bit_cast<std::uint32_t>(v), 4); }
  void put_f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }
  void put_bytes(std::string_view bytes) {
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
  }

  const std::vector<char>& bytes() const { return buffer_; }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
      buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
  }

  std::vector<char> buffer_;
};

// Every read checks bounds and throws FormatError naming the offset.
class ByteReader {
 public:
  ByteReader(const std::vector<char>& bytes, std::string context)
      : bytes_(bytes), context_(std::move(context)) {}

  std::uint16_t get_u16() { return static_cast<std::uint16_t>(get_le(2)); }
  std::uint32_t get_u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t get_u64() { return get_le(8); }
  float get_f32() { return std::bit_cast<float>(get_u32()); }
  double get_f64() { return std::bit_cast<double>(get_u64()); }
  std::string get_bytes(std::uint64_t count);

  std::size_t offset() const { return offset_; }
  std::size_t remaining() const { return bytes_.size() - offset_; }
  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::uint64_t get_le(int width);
  void require(std::uint64_t count) const;

  const std::vector<char>& bytes_;
  std::string context_;
  std::size_t offset_ = 0;
};

std::vector<char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<char>& bytes);

}  // namespace tchgr::detail
