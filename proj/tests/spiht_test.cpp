#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "eegc/error.hpp"
#include "eegc/spiht.hpp"
#include "eegc/wavelet.hpp"
#include "support/synth.hpp"

namespace eegc {
namespace {

IntPyramid random_ints(const PyramidShape& shape, std::mt19937_64& rng, int max_bits) {
  std::uniform_int_distribution<int> bits(0, max_bits);
  std::uniform_int_distribution<int> sign(0, 1);
  IntPyramid p{shape, std::vector<std::int32_t>(shape.size())};
  for (auto& v : p.values) {
    const int b = bits(rng);
    const int mag = b == 0 ? 0 : std::uniform_int_distribution<int>(0, (1 << b) - 1)(rng);
    v = sign(rng) ? -mag : mag;
  }
  return p;
}

IntPyramid wavelet_ints(const SignalMatrix& m, int levels, int precision = 16) {
  const auto pyr = dwt2d(m, levels);
  return quantize(pyr.coeffs, PyramidShape::of(pyr), precision).pyramid;
}

double mse(const IntPyramid& a, const IntPyramid& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = static_cast<double>(a.values[i]) - b.values[i];
    s += d * d;
  }
  return s / static_cast<double>(a.values.size());
}

const std::vector<PyramidShape> kShapes = {
    {Topology::OneD, 1, 1024, 5}, {Topology::OneD, 1, 1000, 5}, {Topology::OneD, 1, 37, 3},
    {Topology::TwoD, 32, 64, 4},  {Topology::TwoD, 23, 70, 4},  {Topology::TwoD, 5, 9, 1},
};

TEST(Quantize, ScaleAndRounding) {
  const std::vector<double> c{-10.0, 2.5, 0.0, 10.0};
  const auto q = quantize(c, {Topology::OneD, 1, 4, 1}, 16);
  EXPECT_DOUBLE_EQ(q.scale, 10.0 / 32767.0);
  EXPECT_EQ(q.pyramid.values[0], -32767);
  EXPECT_EQ(q.pyramid.values[3], 32767);
  EXPECT_EQ(q.pyramid.values[1], static_cast<std::int32_t>(std::round(2.5 / q.scale)));
  const auto back = dequantize(q.pyramid, q.scale);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LE(std::abs(back[i] - c[i]), 0.5 * q.scale + 1e-15);
  const auto z = quantize(std::vector<double>(4, 0.0), {Topology::OneD, 1, 4, 1}, 16);
  EXPECT_EQ(z.scale, 0.0);
  EXPECT_THROW(quantize(c, {Topology::OneD, 1, 4, 1}, 1), DomainError);
  EXPECT_THROW(quantize(c, {Topology::OneD, 1, 5, 1}, 16), StructureError);
}

TEST(TreeGrid, EveryCoefficientInExactlyOneTree) {
  for (const auto& shape : kShapes) {
    const TreeGrid grid(shape);
    std::vector<int> hits(shape.size(), 0);
    std::vector<std::uint32_t> stack(grid.roots().begin(), grid.roots().end());
    std::uint32_t kids[4];
    while (!stack.empty()) {
      const auto cell = stack.back();
      stack.pop_back();
      if (grid.valid(cell)) ++hits[static_cast<std::size_t>(grid.coefficient(cell))];
      const int n = grid.children(cell, kids);
      for (int k = 0; k < n; ++k) stack.push_back(kids[k]);
    }
    for (std::size_t i = 0; i < hits.size(); ++i) ASSERT_EQ(hits[i], 1) << "coefficient " << i << " of " << shape.cols;
  }
}

TEST(Spiht, LosslessAtUnconstrainedBudget) {
  std::mt19937_64 rng(11);
  for (const auto& shape : kShapes) {
    for (int trial = 0; trial < 5; ++trial) {
      const IntPyramid p = random_ints(shape, rng, 15);
      EncodeStats es;
      const Bitstream bits = spiht_encode(p, 1u << 30, {}, &es);
      EXPECT_TRUE(es.lossless);
      DecodeStats ds;
      const IntPyramid q = spiht_decode(bits, shape, &ds);
      EXPECT_EQ(q.values, p.values);
      EXPECT_TRUE(ds.lossless);
      EXPECT_EQ(ds.bits_consumed, bits.size());
      EXPECT_EQ(ds.top_plane, es.top_plane);
    }
  }
}

TEST(Spiht, AllZeroPyramid) {
  const PyramidShape shape{Topology::TwoD, 16, 16, 2};
  const IntPyramid zero{shape, std::vector<std::int32_t>(256, 0)};
  const Bitstream bits = spiht_encode(zero, 1000);
  EXPECT_LE(bits.size(), 1000u);
  EXPECT_EQ(spiht_decode(bits, shape).values, zero.values);
}

TEST(Spiht, StopsExactlyAtBudget) {
  std::mt19937_64 rng(12);
  for (const auto& shape : kShapes) {
    const IntPyramid p = random_ints(shape, rng, 14);
    for (double bps : {0.5, 1.0, 2.0, 4.0}) {
      const auto budget = std::max<std::uint64_t>(kMinSpihtBudget, static_cast<std::uint64_t>(bps * shape.size()));
      const Bitstream bits = spiht_encode(p, budget);
      EXPECT_EQ(bits.size(), budget);
    }
  }
}

TEST(Spiht, TruncatedStreamIsPrefixOfLongerStream) {
  std::mt19937_64 rng(13);
  const SignalMatrix m = synth::correlated_eeg(32, 256, 256, 3);
  const IntPyramid p = wavelet_ints(m, 4);
  const Bitstream full = spiht_encode(p, 1u << 30);
  for (std::uint64_t budget : {16u, 100u, 1000u, 5000u, 20000u}) {
    EXPECT_EQ(spiht_encode(p, budget), full.prefix(budget));
    // decoding a prefix equals decoding the stream encoded at that budget
    EXPECT_EQ(spiht_decode(full.prefix(budget), p.shape).values, spiht_decode(spiht_encode(p, budget), p.shape).values);
  }
}

TEST(Spiht, PrefixDistortionIsMonotone) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const SignalMatrix m = synth::correlated_eeg(32, 512, 256, seed);
    const IntPyramid p = wavelet_ints(m, 4);
    const Bitstream full = spiht_encode(p, 1u << 30);
    double last = INFINITY;
    for (int k = 1; k <= 10; ++k) {
      const auto len = std::max<std::uint64_t>(16, full.size() * k / 10);
      const double e = mse(p, spiht_decode(full.prefix(len), p.shape));
      EXPECT_LE(e, last) << "seed " << seed << " prefix " << k;
      last = e;
    }
    EXPECT_EQ(last, 0.0);
  }
}

TEST(Spiht, CompletePassBitsReencode) {
  const SignalMatrix m = synth::correlated_eeg(16, 128, 256, 7);
  const IntPyramid p = wavelet_ints(m, 3);
  const Bitstream bits = spiht_encode(p, 3000);
  DecodeStats ds;
  const IntPyramid decoded = spiht_decode(bits, p.shape, &ds);
  EXPECT_FALSE(ds.lossless);
  EXPECT_LE(ds.complete_pass_bits, bits.size());
  EXPECT_GE(ds.top_plane, ds.last_plane);
  // reconstruction error of a significant coefficient stays below one step
  // of the last completed plane
  const std::int64_t bound = std::int64_t{1} << (ds.last_plane + 1);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    EXPECT_LT(std::abs(static_cast<std::int64_t>(p.values[i]) - decoded.values[i]), bound);
  }
}

TEST(Spiht, HeaderAndBudgetErrors) {
  const PyramidShape shape{Topology::OneD, 1, 64, 3};
  const IntPyramid p{shape, std::vector<std::int32_t>(64, 5)};
  EXPECT_THROW(spiht_encode(p, 15), BudgetError);
  Bitstream bad;
  bad.append_bits(31, kSpihtHeaderBits);
  bad.append_bits(0, 20);
  EXPECT_THROW(spiht_decode(bad, shape), FormatError);
  EXPECT_EQ(spiht_decode(Bitstream{}, shape).values, std::vector<std::int32_t>(64, 0));
  EXPECT_THROW(TreeGrid({Topology::TwoD, 4, 64, 3}), StructureError);
}

TEST(Spiht, InvariantCheckerAcceptsRealRuns) {
  SpihtOptions opts;
  opts.check_invariants = true;
  std::mt19937_64 rng(14);
  const IntPyramid p = random_ints({Topology::TwoD, 16, 32, 3}, rng, 10);
  EXPECT_NO_THROW(spiht_encode(p, 4000, opts));
}

}  // namespace
}  // namespace eegc
