// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "binary_io.hpp"

#include <fstream>
#include <iterator>

#include "tchgr/error.hpp"

namespace tchgr::detail {

void ByteReader::require(std::uint64_t count) const {
  if (count > remaining()) {
    fail("truncated: needed " + std::to_string(count) + " bytes, " +
         std::to_string(remaining()) + " left");
  }
}

void ByteReader::fail(const std::string& what) const {
  throw FormatError(context_ + ": " + what + " at offset " + std::to_string(offset_));
}

std::uint64_t ByteReader::get_le(int width) {
  require(static_cast<std::uint64_t>(width));
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[offset_ + i]))
         << (8 * i);
  }
  offset_ += static_cast<std::size_t>(width);
  return v;
}

std::string ByteReader::get_bytes(std::uint64_t count) {
  require(count);
  std::string out(bytes_.data() + offset_, static_cast<std::size_t>(count));
  offset_ += static_cast<std::size_t>(count);
  return out;
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return std::vector<char>(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace tchgr::detail
