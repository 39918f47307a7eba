#include "eegc/bitstream.hpp"

#include <bit>
#include <cstring>

#include "eegc/error.hpp"

namespace eegc {

Bitstream Bitstream::from_bytes(std::vector<std::uint8_t> bytes, std::uint64_t n_bits) {
  if (n_bits > 8 * static_cast<std::uint64_t>(bytes.size())) {
    throw FormatError("bit length exceeds byte buffer");
  }
  bytes.resize(static_cast<std::size_t>((n_bits + 7) / 8));
  if (n_bits & 7) bytes.back() &= static_cast<std::uint8_t>(0xFF00u >> (n_bits & 7));
  Bitstream b;
  b.bytes_ = std::move(bytes);
  b.n_bits_ = n_bits;
  return b;
}

void Bitstream::append_bits(std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) push_back((value >> i) & 1u);
}

void Bitstream::append(const Bitstream& other) {
  if ((n_bits_ & 7) == 0) {
    bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
    n_bits_ += other.n_bits_;
    return;
  }
  for (std::uint64_t i = 0; i < other.size(); ++i) push_back(other[i]);
}

Bitstream Bitstream::prefix(std::uint64_t n_bits) const {
  n_bits = std::min(n_bits, n_bits_);
  return from_bytes(std::vector<std::uint8_t>(bytes_.begin(), bytes_.begin() + static_cast<std::ptrdiff_t>((n_bits + 7) / 8)),
                    n_bits);
}

Bitstream Bitstream::slice(std::uint64_t first, std::uint64_t count) const {
  if (first >= n_bits_) return {};
  count = std::min(count, n_bits_ - first);
  if ((first & 7) == 0) {
    const auto b = static_cast<std::ptrdiff_t>(first / 8);
    const auto e = static_cast<std::ptrdiff_t>((first + count + 7) / 8);
    return from_bytes(std::vector<std::uint8_t>(bytes_.begin() + b, bytes_.begin() + e), count);
  }
  Bitstream out;
  for (std::uint64_t i = 0; i < count; ++i) out.push_back((*this)[first + i]);
  return out;
}

std::uint64_t BitReader::read_bits(int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    if (exhausted()) throw FormatError("bitstream exhausted");
    v = (v << 1) | (read() ? 1u : 0u);
  }
  return v;
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(const std::string& s) {
  u32(static_cast<std::uint32_t>(s.size()));
  out_.insert(out_.end(), s.begin(), s.end());
}

std::uint64_t ByteReader::get(int n) {
  if (remaining() < static_cast<std::size_t>(n)) throw FormatError("side information truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
  pos_ += static_cast<std::size_t>(n);
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }
double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
  if (remaining() < n) throw FormatError("side information truncated");
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::str() {
  const std::uint32_t n = u32();
  auto b = bytes(n);
  return std::string(b.begin(), b.end());
}

}  // namespace eegc
