#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "rdae/errors.hpp"

namespace rdae::detail {

// Little-endian encoder into a byte buffer.
class ByteWriter {
 public:
  void bytes(std::string_view s) { buffer_.insert(buffer_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }

  const std::vector<char>& buffer() const { return buffer_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buffer_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  std::vector<char> buffer_;
};

// Bounds-checked little-endian decoder; running off the end is a FormatError.
class ByteReader {
 public:
  ByteReader(const std::vector<char>& data, std::string context)
      : data_(data), context_(std::move(context)) {}

  std::string bytes(std::size_t n) {
    need(n);
    std::string s(data_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  double f64() { return std::bit_cast<double>(get(8)); }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw FormatError(context_ + ": truncated file");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  const std::vector<char>& data_;
  std::string context_;
  std::size_t pos_ = 0;
};

std::vector<char> read_file(const std::string& path);
// Writes through a temporary sibling and renames, so readers never observe a
// partially written file.
void write_file(const std::string& path, const std::vector<char>& bytes);

}  // namespace rdae::detail
