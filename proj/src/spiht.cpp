#include "eegc/spiht.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "eegc/error.hpp"

namespace eegc {

Quantized quantize(std::span<const double> coeffs, const PyramidShape& shape, int precision_bits) {
  if (precision_bits < 2 || precision_bits > 24) {
    throw DomainError("quantizer precision must be within [2, 24] bits");
  }
  if (coeffs.size() != shape.size()) throw StructureError("coefficient count does not match pyramid shape");
  double peak = 0.0;
  for (double c : coeffs) peak = std::max(peak, std::abs(c));
  Quantized q;
  q.pyramid.shape = shape;
  q.pyramid.values.assign(coeffs.size(), 0);
  if (peak == 0.0) return q;
  const double top = std::ldexp(1.0, precision_bits - 1) - 1.0;
  q.scale = peak / top;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    q.pyramid.values[i] = static_cast<std::int32_t>(std::clamp(std::round(coeffs[i] / q.scale), -top, top));
  }
  return q;
}

std::vector<double> dequantize(const IntPyramid& pyr, double scale) {
  std::vector<double> out(pyr.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pyr.values[i] * scale;
  return out;
}

// ---------------------------------------------------------------------------
// Tree topology

TreeGrid::TreeGrid(const PyramidShape& shape) : shape_(shape) {
  const int L = shape.levels;
  if (L < 1 || L > 24) throw StructureError("pyramid level count out of range");
  const std::size_t min_len = std::size_t{1} << L;
  if (shape.topology == Topology::OneD) {
    if (shape.rows != 1 || shape.cols < min_len) throw StructureError("1D pyramid shape is too small for its levels");
  } else {
    if (shape.rows < min_len || shape.cols < min_len) throw StructureError("2D pyramid shape is too small for its levels");
  }
  const std::size_t block = std::size_t{1} << (L + 1);
  auto padded = [block](std::size_t n) { return (n + block - 1) / block * block; };

  grid_cols_ = padded(shape.cols);
  root_cols_ = grid_cols_ >> L;
  const auto cmap = axis_map(shape.cols, grid_cols_);
  if (shape.topology == Topology::OneD) {
    grid_rows_ = 1;
    root_rows_ = 1;
    cell_to_coef_ = cmap;
  } else {
    grid_rows_ = padded(shape.rows);
    root_rows_ = grid_rows_ >> L;
    const auto rmap = axis_map(shape.rows, grid_rows_);
    cell_to_coef_.assign(grid_rows_ * grid_cols_, -1);
    for (std::size_t r = 0; r < grid_rows_; ++r) {
      if (rmap[r] < 0) continue;
      for (std::size_t c = 0; c < grid_cols_; ++c) {
        if (cmap[c] >= 0) cell_to_coef_[r * grid_cols_ + c] = rmap[r] * static_cast<std::int64_t>(shape.cols) + cmap[c];
      }
    }
  }

  const std::size_t n = grid_size();
  valid_desc_.assign(n, false);
  valid_grand_.assign(n, false);
  std::uint32_t kids[4];
  // Children always have larger cell indices than their parent.
  for (std::size_t cell = n; cell-- > 0;) {
    const int k = children(cell, kids);
    bool d = false, g = false;
    for (int i = 0; i < k; ++i) {
      d = d || valid(kids[i]) || valid_desc_[kids[i]];
      g = g || valid_desc_[kids[i]];
    }
    valid_desc_[cell] = d;
    valid_grand_[cell] = g;
  }
  for (std::size_t r = 0; r < root_rows_; ++r) {
    for (std::size_t c = 0; c < root_cols_; ++c) roots_.push_back(static_cast<std::uint32_t>(r * grid_cols_ + c));
  }
}

std::vector<std::int64_t> TreeGrid::axis_map(std::size_t n, std::size_t padded) const {
  const int L = shape_.levels;
  const auto len = dyadic_lengths(n, L);
  std::vector<std::int64_t> map(padded, -1);
  for (std::size_t i = 0; i < len[static_cast<std::size_t>(L)]; ++i) map[i] = static_cast<std::int64_t>(i);
  for (int k = 1; k <= L; ++k) {
    const std::size_t lo = len[static_cast<std::size_t>(k)], hi = len[static_cast<std::size_t>(k - 1)];
    const std::size_t base = padded >> k;
    for (std::size_t i = lo; i < hi; ++i) map[base + (i - lo)] = static_cast<std::int64_t>(i);
  }
  return map;
}

int TreeGrid::children(std::size_t cell, std::uint32_t* out) const {
  if (shape_.topology == Topology::OneD) {
    if (cell < root_cols_) {
      if ((cell & 1) == 0) return 0;
      const auto base = static_cast<std::uint32_t>(root_cols_ + cell - 1);
      out[0] = base;
      out[1] = base + 1;
      return 2;
    }
    if (2 * cell >= grid_cols_) return 0;
    out[0] = static_cast<std::uint32_t>(2 * cell);
    out[1] = static_cast<std::uint32_t>(2 * cell + 1);
    return 2;
  }
  const std::size_t r = cell / grid_cols_, c = cell % grid_cols_;
  std::size_t br, bc;
  if (r < root_rows_ && c < root_cols_) {
    const std::size_t a = r & 1, b = c & 1;
    if (a == 0 && b == 0) return 0;
    br = a * root_rows_ + r - a;
    bc = b * root_cols_ + c - b;
  } else {
    if (2 * r >= grid_rows_ || 2 * c >= grid_cols_) return 0;
    br = 2 * r;
    bc = 2 * c;
  }
  out[0] = static_cast<std::uint32_t>(br * grid_cols_ + bc);
  out[1] = out[0] + 1;
  out[2] = static_cast<std::uint32_t>((br + 1) * grid_cols_ + bc);
  out[3] = out[2] + 1;
  return 4;
}

// ---------------------------------------------------------------------------
// Coding engine shared by encoder and decoder

namespace {

struct Exhausted {};

enum class SetType : std::uint8_t { A, B };

struct LisEntry {
  std::uint32_t cell;
  SetType type;
  bool removed;
};

template <bool kEncode>
class Engine {
 public:
  // Encoder
  Engine(const TreeGrid& grid, const IntPyramid& pyr, std::uint64_t budget, Bitstream& out, bool check)
      : grid_(grid), out_(&out), budget_(budget), check_(check) {
    const std::size_t n = grid.grid_size();
    mag_.assign(n, 0);
    neg_.assign(n, 0);
    for (std::size_t cell = 0; cell < n; ++cell) {
      const auto coef = grid.coefficient(cell);
      if (coef < 0) continue;
      const std::int32_t v = pyr.values[static_cast<std::size_t>(coef)];
      mag_[cell] = static_cast<std::uint32_t>(v < 0 ? -static_cast<std::int64_t>(v) : v);
      neg_[cell] = v < 0;
    }
    max_desc_.assign(n, 0);
    max_grand_.assign(n, 0);
    std::uint32_t kids[4];
    for (std::size_t cell = n; cell-- > 0;) {
      const int k = grid.children(cell, kids);
      std::uint32_t d = 0, g = 0;
      for (int i = 0; i < k; ++i) {
        d = std::max({d, mag_[kids[i]], max_desc_[kids[i]]});
        g = std::max(g, max_desc_[kids[i]]);
      }
      max_desc_[cell] = d;
      max_grand_[cell] = g;
    }
  }

  // Decoder
  Engine(const TreeGrid& grid, BitReader& in, bool check) : grid_(grid), in_(&in), check_(check) {
    const std::size_t n = grid.grid_size();
    mag_.assign(n, 0);
    neg_.assign(n, 0);
    plane_.assign(n, -1);
  }

  // Returns true when every bit plane down to 0 was coded.
  bool run(int top_plane) {
    for (std::uint32_t cell : grid_.roots()) {
      if (grid_.valid(cell)) lip_.push_back(cell);
      if (grid_.has_valid_descendants(cell)) lis_.push_back({cell, SetType::A, false});
    }
    last_plane_ = top_plane;
    try {
      for (int n = top_plane; n >= 0; --n) {
        last_plane_ = n;
        pass(n);
        ++passes_;
        complete_pass_bits_ = position();
        if (check_) check_lists();
      }
    } catch (const Exhausted&) {
      return false;
    }
    return true;
  }

  int passes() const { return passes_; }
  int last_plane() const { return last_plane_; }
  std::uint64_t complete_pass_bits() const { return complete_pass_bits_; }

  void reconstruct(IntPyramid& pyr) const {
    for (std::size_t cell = 0; cell < grid_.grid_size(); ++cell) {
      const auto coef = grid_.coefficient(cell);
      if (coef < 0 || plane_[cell] < 0) continue;
      const int p = plane_[cell];
      const std::int64_t m = static_cast<std::int64_t>(mag_[cell]) + (p > 0 ? (std::int64_t{1} << (p - 1)) : 0);
      pyr.values[static_cast<std::size_t>(coef)] = static_cast<std::int32_t>(neg_[cell] ? -m : m);
    }
  }

 private:
  std::uint64_t position() const {
    if constexpr (kEncode) return out_->size();
    else return in_->position();
  }

  bool bit(bool value) {
    if constexpr (kEncode) {
      if (out_->size() >= budget_) throw Exhausted{};
      out_->push_back(value);
      return value;
    } else {
      (void)value;
      if (in_->exhausted()) throw Exhausted{};
      return in_->read();
    }
  }

  bool coef_significant(std::uint32_t cell, std::uint32_t thr) {
    if constexpr (kEncode) return bit(mag_[cell] >= thr);
    else return bit(false);
  }

  bool set_significant(const LisEntry& e, std::uint32_t thr) {
    if constexpr (kEncode) {
      return bit((e.type == SetType::A ? max_desc_[e.cell] : max_grand_[e.cell]) >= thr);
    } else {
      return bit(false);
    }
  }

  void newly_significant(std::uint32_t cell, int n) {
    if constexpr (kEncode) {
      bit(neg_[cell] != 0);
    } else {
      neg_[cell] = bit(false);
      mag_[cell] = std::uint32_t{1} << n;
      plane_[cell] = static_cast<std::int8_t>(n);
    }
    lsp_.push_back(cell);
  }

  void refine(std::uint32_t cell, int n) {
    if constexpr (kEncode) {
      bit((mag_[cell] >> n) & 1u);
    } else {
      if (bit(false)) mag_[cell] |= std::uint32_t{1} << n;
      plane_[cell] = static_cast<std::int8_t>(n);
    }
  }

  void pass(int n) {
    const std::uint32_t thr = std::uint32_t{1} << n;
    const std::size_t lsp_before = lsp_.size();

    std::size_t kept = 0;
    for (std::size_t i = 0; i < lip_.size(); ++i) {
      const std::uint32_t cell = lip_[i];
      if (coef_significant(cell, thr)) {
        newly_significant(cell, n);
      } else {
        lip_[kept++] = cell;
      }
    }
    lip_.resize(kept);

    std::uint32_t kids[4];
    for (std::size_t i = 0; i < lis_.size(); ++i) {
      const LisEntry e = lis_[i];
      if (!set_significant(e, thr)) continue;
      const int k = grid_.children(e.cell, kids);
      if (e.type == SetType::A) {
        for (int c = 0; c < k; ++c) {
          if (!grid_.valid(kids[c])) continue;
          if (coef_significant(kids[c], thr)) {
            newly_significant(kids[c], n);
          } else {
            lip_.push_back(kids[c]);
          }
        }
        if (grid_.has_valid_grandchildren(e.cell)) lis_.push_back({e.cell, SetType::B, false});
      } else {
        for (int c = 0; c < k; ++c) {
          if (grid_.has_valid_descendants(kids[c])) lis_.push_back({kids[c], SetType::A, false});
        }
      }
      lis_[i].removed = true;
    }
    std::erase_if(lis_, [](const LisEntry& e) { return e.removed; });

    for (std::size_t i = 0; i < lsp_before; ++i) refine(lsp_[i], n);
  }

  void check_lists() const {
    std::vector<std::uint8_t> seen(grid_.grid_size(), 0);
    for (std::uint32_t c : lip_) {
      if (seen[c]) throw std::logic_error("SPIHT: coordinate listed twice in LIP");
      seen[c] = 1;
    }
    for (std::uint32_t c : lsp_) {
      if (seen[c]) throw std::logic_error("SPIHT: coordinate in both LIP and LSP or twice in LSP");
      seen[c] = 1;
    }
    std::vector<std::uint8_t> sets(grid_.grid_size(), 0);
    for (const auto& e : lis_) {
      if (sets[e.cell]) throw std::logic_error("SPIHT: set root listed twice in LIS");
      sets[e.cell] = 1;
    }
  }

  const TreeGrid& grid_;
  Bitstream* out_ = nullptr;
  BitReader* in_ = nullptr;
  std::uint64_t budget_ = 0;
  bool check_ = false;

  std::vector<std::uint32_t> mag_;
  std::vector<std::uint8_t> neg_;
  std::vector<std::uint32_t> max_desc_, max_grand_;
  std::vector<std::int8_t> plane_;

  std::vector<std::uint32_t> lip_, lsp_;
  std::vector<LisEntry> lis_;
  int passes_ = 0;
  int last_plane_ = 0;
  std::uint64_t complete_pass_bits_ = 0;
};

}  // namespace

Bitstream spiht_encode(const IntPyramid& pyr, std::uint64_t budget_bits, const SpihtOptions& opts,
                       EncodeStats* stats) {
  if (budget_bits < kMinSpihtBudget) {
    throw BudgetError("SPIHT budget of " + std::to_string(budget_bits) + " bits is below the " +
                      std::to_string(kMinSpihtBudget) + "-bit minimum");
  }
  if (pyr.values.size() != pyr.shape.size()) throw StructureError("integer pyramid size does not match its shape");
  const TreeGrid grid(pyr.shape);

  std::uint32_t peak = 0;
  for (std::int32_t v : pyr.values) peak = std::max(peak, static_cast<std::uint32_t>(std::abs(v)));
  const int top = peak == 0 ? 0 : std::bit_width(peak) - 1;

  Bitstream out;
  out.append_bits(static_cast<std::uint64_t>(top), kSpihtHeaderBits);
  Engine<true> engine(grid, pyr, budget_bits, out, opts.check_invariants);
  const bool lossless = engine.run(top);
  if (stats) *stats = {top, engine.passes(), lossless};
  return out;
}

IntPyramid spiht_decode(const Bitstream& bits, const PyramidShape& shape, DecodeStats* stats) {
  const TreeGrid grid(shape);
  IntPyramid pyr{shape, std::vector<std::int32_t>(shape.size(), 0)};
  if (bits.size() < static_cast<std::uint64_t>(kSpihtHeaderBits)) {
    if (stats) *stats = DecodeStats{0, 0, bits.size(), 0, false};
    return pyr;
  }
  BitReader in(bits);
  const auto top = static_cast<int>(in.read_bits(kSpihtHeaderBits));
  if (top > 30) throw FormatError("SPIHT header declares bit plane " + std::to_string(top));
  Engine<false> engine(grid, in, SpihtOptions{}.check_invariants);
  const bool lossless = engine.run(top);
  engine.reconstruct(pyr);
  if (stats) {
    *stats = DecodeStats{top, engine.last_plane(), in.position(),
                         engine.passes() > 0 ? engine.complete_pass_bits() : std::uint64_t{kSpihtHeaderBits},
                         lossless};
  }
  return pyr;
}

}  // namespace eegc
