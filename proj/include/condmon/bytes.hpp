#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace condmon {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

static_assert(std::endian::native == std::endian::little,
              "little-endian host assumed by the LE codecs");

// Little-endian appenders.
class ByteWriter {
 public:
  explicit ByteWriter(Bytes& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(&v, sizeof v); }
  void u32(std::uint32_t v) { put(&v, sizeof v); }
  void u64(std::uint64_t v) { put(&v, sizeof v); }
  void f64(double v) { put(&v, sizeof v); }
  void raw(ByteView data) { out_.insert(out_.end(), data.begin(), data.end()); }
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

 private:
  void put(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }

  Bytes& out_;
};

// Bounds-checked little-endian reader. Every accessor returns nullopt once
// the input is exhausted; ok() then stays false.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::optional<std::uint8_t> u8() { return get<std::uint8_t>(); }
  std::optional<std::uint16_t> u16() { return get<std::uint16_t>(); }
  std::optional<std::uint32_t> u32() { return get<std::uint32_t>(); }
  std::optional<std::uint64_t> u64() { return get<std::uint64_t>(); }
  std::optional<double> f64() { return get<double>(); }

  std::optional<ByteView> take(std::size_t n) {
    if (!ok_ || remaining() < n) {
      ok_ = false;
      return std::nullopt;
    }
    auto v = data_.subspan(pos_, n);
    pos_ += n;
    return v;
  }

  std::optional<std::string> str(std::size_t n) {
    auto v = take(n);
    if (!v) return std::nullopt;
    return std::string(v->begin(), v->end());
  }

  ByteView rest() const { return data_.subspan(pos_); }
  std::size_t remaining() const { return data_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool ok() const { return ok_; }

 private:
  template <typename T>
  std::optional<T> get() {
    if (!ok_ || remaining() < sizeof(T)) {
      ok_ = false;
      return std::nullopt;
    }
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  ByteView data_;
  std::size_t pos_ = 0;
  bool ok_ = true;
};

}  // namespace condmon
