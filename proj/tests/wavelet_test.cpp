#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eegc/error.hpp"
#include "eegc/wavelet.hpp"
#include "support/filter_bank.hpp"
#include "support/synth.hpp"

namespace eegc {
namespace {

using oracle::level;

std::vector<double> random_signal(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

TEST(Dwt1d, SingleLevelMatchesFilterBank) {
  std::mt19937_64 rng(1);
  for (std::size_t n = 2; n <= 41; ++n) {
    const auto x = random_signal(n, rng);
    const auto pyr = dwt1d(x, 1);
    const auto [low, high] = level(x);
    ASSERT_EQ(pyr.approx.size(), low.size()) << n;
    ASSERT_EQ(pyr.details[0].size(), high.size()) << n;
    for (std::size_t i = 0; i < low.size(); ++i) EXPECT_NEAR(pyr.approx[i], low[i], 1e-10) << n << " low " << i;
    for (std::size_t i = 0; i < high.size(); ++i) EXPECT_NEAR(pyr.details[0][i], high[i], 1e-10) << n << " high " << i;
  }
}

TEST(Dwt1d, MultiLevelMatchesIteratedFilterBank) {
  std::mt19937_64 rng(2);
  for (std::size_t n : {64u, 100u, 257u, 1000u}) {
    const auto x = random_signal(n, rng);
    const int levels = 5;
    const auto pyr = dwt1d(x, levels);
    std::vector<double> approx = x;
    for (int k = 1; k <= levels; ++k) {
      auto [low, high] = level(approx);
      const auto& got = pyr.details[levels - k];
      ASSERT_EQ(got.size(), high.size());
      for (std::size_t i = 0; i < high.size(); ++i) EXPECT_NEAR(got[i], high[i], 1e-10);
      approx = low;
    }
    for (std::size_t i = 0; i < approx.size(); ++i) EXPECT_NEAR(pyr.approx[i], approx[i], 1e-10);
  }
}

TEST(Dwt1d, Gains) {
  std::vector<double> dc(64, 1.0), nyquist(64);
  for (std::size_t i = 0; i < 64; ++i) nyquist[i] = i % 2 ? -1.0 : 1.0;
  const auto a = dwt1d(dc, 1);
  EXPECT_NEAR(a.approx[10], std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(a.details[0][10], 0.0, 1e-12);
  const auto b = dwt1d(nyquist, 1);
  EXPECT_NEAR(std::abs(b.details[0][10]), std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(b.approx[10], 0.0, 1e-12);
}

TEST(Dwt1d, RoundTripRandom) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(32, 3000);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_signal(len(rng), rng);
    const int levels = max_levels_for(x.size(), 6);
    const auto y = idwt1d(dwt1d(x, levels));
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Dwt1d, ShapesAndErrors) {
  std::vector<double> x(23, 1.0);
  const auto pyr = dwt1d(x, 3);
  EXPECT_EQ(pyr.approx.size(), 3u);
  EXPECT_EQ(pyr.details[0].size(), 3u);  // level 3: ceil(ceil(23/2)/2)=6 -> 3 high
  EXPECT_EQ(pyr.details[2].size(), 11u);
  EXPECT_EQ(pyr.flatten().size(), 23u);
  EXPECT_EQ(dyadic_lengths(23, 3), (std::vector<std::size_t>{23, 12, 6, 3}));
  EXPECT_THROW(dwt1d(std::vector<double>(7, 0.0), 3), SizeError);
  EXPECT_THROW(dwt1d(x, 0), SizeError);
  const auto flat = pyr.flatten();
  EXPECT_THROW(WaveletPyramid1D::unflatten(std::span<const double>(flat).first(20), 23, 3), StructureError);
  const auto back = WaveletPyramid1D::unflatten(flat, 23, 3);
  EXPECT_EQ(back.flatten(), flat);
  EXPECT_EQ(max_levels_for(16, 10), 4);
  EXPECT_EQ(max_levels_for(1, 5), 0);
}

TEST(Dwt2d, MatchesSeparableFilterBank) {
  const SignalMatrix m = synth::random_matrix(23, 70, 5);
  const int levels = 3;
  const auto pyr = dwt2d(m, levels);
  const auto ref = oracle::pyramid2d(m, levels);
  for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(pyr.coeffs[i], ref[i], 1e-10) << i;
}

TEST(Dwt2d, RoundTripRandom) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> dim(16, 90);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SignalMatrix m = synth::random_matrix(dim(rng), dim(rng), static_cast<unsigned>(trial));
    const int levels = max_levels_for(std::min(m.n_channels(), m.n_samples()), 4);
    const SignalMatrix back = idwt2d(dwt2d(m, levels));
    for (std::size_t i = 0; i < m.size(); ++i) worst = std::max(worst, std::abs(m.data()[i] - back.data()[i]));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Dwt2d, SubbandLayout) {
  const auto pyr = dwt2d(SignalMatrix(23, 64), 4);
  const auto ll = pyr.subband(Subband::LL, 4);
  EXPECT_EQ(ll.rows, 2u);  // 23 -> 12 -> 6 -> 3 -> 2
  EXPECT_EQ(ll.cols, 4u);
  const auto hl1 = pyr.subband(Subband::HL, 1);
  EXPECT_EQ(hl1.row0, 0u);
  EXPECT_EQ(hl1.col0, 32u);
  EXPECT_EQ(hl1.rows, 12u);
  EXPECT_EQ(hl1.cols, 32u);
  const auto lh1 = pyr.subband(Subband::LH, 1);
  EXPECT_EQ(lh1.row0, 12u);
  EXPECT_EQ(lh1.rows, 11u);
  const auto hh2 = pyr.subband(Subband::HH, 2);
  EXPECT_EQ(hh2.row0, 6u);
  EXPECT_EQ(hh2.col0, 16u);
  EXPECT_THROW(dwt2d(SignalMatrix(8, 64), 4), SizeError);
}

TEST(Rhythms, DyadicBandMappingAt256Hz) {
  const auto bands = dyadic_bands(5, 256.0);
  ASSERT_EQ(bands.size(), 6u);
  EXPECT_DOUBLE_EQ(bands[0].high_hz, 4.0);
  EXPECT_DOUBLE_EQ(bands[5].low_hz, 64.0);
  EXPECT_EQ(rhythm_for_band(bands[0]), Rhythm::Delta);
  EXPECT_EQ(rhythm_for_band(bands[1]), Rhythm::Theta);
  EXPECT_EQ(rhythm_for_band(bands[2]), Rhythm::Alpha);
  EXPECT_EQ(rhythm_for_band(bands[3]), Rhythm::Beta);
  EXPECT_EQ(rhythm_for_band(bands[4]), Rhythm::Gamma);
  EXPECT_EQ(rhythm_for_band(bands[5]), Rhythm::Gamma);
  EXPECT_EQ(rhythm_for_band({200.0, 400.0}), Rhythm::Gamma);
}

TEST(Rhythms, SinusoidLandsInItsBand) {
  std::vector<double> x(1024);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2 * std::numbers::pi * 11.0 * t / 256.0);
  const auto e = band_energies(dwt1d(x, 5), 256.0);
  EXPECT_GT(e[Rhythm::Alpha], 0.8 * e.total());
  const auto groups = group_energies(dwt1d(x, 5));
  double sum = 0.0;
  for (double g : groups) sum += g;
  EXPECT_NEAR(sum, e.total(), 1e-9 * sum);
}

}  // namespace
}  // namespace eegc
