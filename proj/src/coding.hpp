#pragma once

// Helpers shared by the codec implementations.

#include <cstdint>
#include <span>
#include <vector>

#include "eegc/bitstream.hpp"
#include "eegc/spiht.hpp"

namespace eegc::detail {

struct CodedBlock {
  double scale = 0.0;
  Bitstream bits;
};

// Quantize + SPIHT-encode a coefficient block under `budget` bits.
inline CodedBlock code_block(std::span<const double> coeffs, const PyramidShape& shape, int precision,
                             std::uint64_t budget) {
  Quantized q = quantize(coeffs, shape, precision);
  return {q.scale, spiht_encode(q.pyramid, budget)};
}

inline std::vector<double> decode_block(const Bitstream& bits, const PyramidShape& shape, double scale) {
  return dequantize(spiht_decode(bits, shape), scale);
}

// Sequential reader over concatenated sub-streams of a payload.
class PayloadCursor {
 public:
  explicit PayloadCursor(const Bitstream& payload) : payload_(payload) {}
  Bitstream next(std::uint64_t n_bits) {
    Bitstream out = payload_.slice(pos_, n_bits);
    pos_ += n_bits;
    return out;
  }

 private:
  const Bitstream& payload_;
  std::uint64_t pos_ = 0;
};

// Splits [0, n) into windows of `window` samples; a tail shorter than
// `min_len` is merged into the previous window.
inline std::vector<std::pair<std::size_t, std::size_t>> split_windows(std::size_t n, std::size_t window,
                                                                      std::size_t min_len) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t first = 0; first < n; first += window) out.emplace_back(first, std::min(window, n - first));
  if (out.size() > 1 && out.back().second < min_len) {
    const auto tail = out.back().second;
    out.pop_back();
    out.back().second += tail;
  }
  return out;
}

}  // namespace eegc::detail
