#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eegc {

// Bit sequence packed MSB-first within bytes. The final byte is zero-padded;
// size() is the true bit length.
class Bitstream {
 public:
  Bitstream() = default;
  static Bitstream from_bytes(std::vector<std::uint8_t> bytes, std::uint64_t n_bits);

  void push_back(bool bit) {
    if ((n_bits_ & 7) == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (n_bits_ & 7));
    ++n_bits_;
  }
  void append_bits(std::uint64_t value, int width);  // MSB of `value` first
  void append(const Bitstream& other);

  bool operator[](std::uint64_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u; }
  std::uint64_t size() const { return n_bits_; }
  bool empty() const { return n_bits_ == 0; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  // First `n_bits` bits (clamped to size()).
  Bitstream prefix(std::uint64_t n_bits) const;
  // Bits [first, first + count), clamped to size().
  Bitstream slice(std::uint64_t first, std::uint64_t count) const;

  friend bool operator==(const Bitstream&, const Bitstream&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t n_bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const Bitstream& bits) : bits_(bits) {}
  bool exhausted() const { return pos_ >= bits_.size(); }
  std::uint64_t position() const { return pos_; }
  std::uint64_t remaining() const { return bits_.size() - pos_; }
  bool read() { return bits_[pos_++]; }
  std::uint64_t read_bits(int width);

 private:
  const Bitstream& bits_;
  std::uint64_t pos_ = 0;
};

// Little-endian byte serialization for container headers and side info.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v);
  void f64(double v);
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void str(const std::string& s);  // u32 length + bytes

  std::size_t size() const { return out_.size(); }
  const std::vector<std::uint8_t>& data() const { return out_; }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

// Reads what ByteWriter wrote; throws FormatError on underrun.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32();
  double f64();
  std::span<const std::uint8_t> bytes(std::size_t n);
  std::string str();

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::uint64_t get(int n);
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace eegc
