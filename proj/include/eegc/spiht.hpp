#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eegc/bitstream.hpp"
#include "eegc/wavelet.hpp"

namespace eegc {

enum class Topology : std::uint8_t { OneD = 1, TwoD = 2 };

// Shape of a coefficient pyramid as the coder sees it. 1D pyramids use
// rows == 1 and the flatten() order of WaveletPyramid1D; 2D pyramids use
// the Mallat layout of WaveletPyramid2D.
struct PyramidShape {
  Topology topology = Topology::OneD;
  std::size_t rows = 1;
  std::size_t cols = 0;
  int levels = 0;

  std::size_t size() const { return rows * cols; }
  static PyramidShape of(const WaveletPyramid1D& p) { return {Topology::OneD, 1, p.original_len, p.levels}; }
  static PyramidShape of(const WaveletPyramid2D& p) { return {Topology::TwoD, p.rows, p.cols, p.levels}; }
  friend bool operator==(const PyramidShape&, const PyramidShape&) = default;
};

struct IntPyramid {
  PyramidShape shape;
  std::vector<std::int32_t> values;
};

struct Quantized {
  IntPyramid pyramid;
  double scale = 0.0;  // coefficient = integer * scale
};

// Uniform scalar quantizer: scale = max|c| / (2^(precision_bits-1) - 1).
// An all-zero input gives scale 0 and all-zero integers.
Quantized quantize(std::span<const double> coeffs, const PyramidShape& shape, int precision_bits);
std::vector<double> dequantize(const IntPyramid& pyr, double scale);

// Spatial-orientation trees on a zero-padded grid. Each axis is padded to a
// multiple of 2^(levels+1) so the root band has even extent; grid cells that
// hold no real coefficient are masked out of significance coding.
//
// 2D: root-band coefficients form 2x2 groups whose top-left member has no
// children and whose other members parent a 2x2 block in HL, LH or HH of
// the coarsest level; elsewhere (i, j) parents (2i..2i+1, 2j..2j+1).
// 1D: root-band pairs, odd member parents the matching pair in the coarsest
// detail band; elsewhere i parents {2i, 2i+1}.
class TreeGrid {
 public:
  explicit TreeGrid(const PyramidShape& shape);

  std::size_t grid_size() const { return grid_rows_ * grid_cols_; }
  std::size_t grid_rows() const { return grid_rows_; }
  std::size_t grid_cols() const { return grid_cols_; }
  // Pyramid index of a grid cell, or -1 for padding.
  std::int64_t coefficient(std::size_t cell) const { return cell_to_coef_[cell]; }
  bool valid(std::size_t cell) const { return cell_to_coef_[cell] >= 0; }
  // Writes up to four children into `out` and returns the count.
  int children(std::size_t cell, std::uint32_t* out) const;
  const std::vector<std::uint32_t>& roots() const { return roots_; }
  bool has_valid_descendants(std::size_t cell) const { return valid_desc_[cell]; }
  bool has_valid_grandchildren(std::size_t cell) const { return valid_grand_[cell]; }

 private:
  std::vector<std::int64_t> axis_map(std::size_t n, std::size_t padded) const;

  PyramidShape shape_;
  std::size_t grid_rows_ = 1, grid_cols_ = 0;
  std::size_t root_rows_ = 1, root_cols_ = 0;
  std::vector<std::int64_t> cell_to_coef_;
  std::vector<std::uint32_t> roots_;
  std::vector<bool> valid_desc_, valid_grand_;
};

struct SpihtOptions {
#ifdef NDEBUG
  bool check_invariants = false;
#else
  bool check_invariants = true;
#endif
};

struct EncodeStats {
  int top_plane = 0;
  int passes_completed = 0;
  bool lossless = false;  // every bit plane was coded before the budget ran out
};

// Number of bits of the bit-plane header that starts every stream.
inline constexpr int kSpihtHeaderBits = 8;
inline constexpr std::uint64_t kMinSpihtBudget = 16;

// Sorting + refinement passes from the top bit plane down. Output stops at
// exactly budget_bits unless the pyramid is coded losslessly first.
Bitstream spiht_encode(const IntPyramid& pyr, std::uint64_t budget_bits, const SpihtOptions& opts = {},
                       EncodeStats* stats = nullptr);

struct DecodeStats {
  int top_plane = 0;
  int last_plane = 0;                       // plane of the last (possibly partial) pass
  std::uint64_t bits_consumed = 0;
  std::uint64_t complete_pass_bits = 0;     // stream position after the last full pass
  bool lossless = false;
};

// Mirror of spiht_encode. A stream that ends mid-pass is decoded as far as
// it goes; significant coefficients are reconstructed at the middle of
// their remaining uncertainty interval.
IntPyramid spiht_decode(const Bitstream& bits, const PyramidShape& shape, DecodeStats* stats = nullptr);

}  // namespace eegc
