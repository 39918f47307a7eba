#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "eegc/codec_dictionary.hpp"
#include "eegc/codec_spiht2d.hpp"
#include "eegc/error.hpp"
#include "eegc/metrics.hpp"
#include "support/synth.hpp"

namespace eegc {
namespace {

constexpr double kFs = 256.0;

std::vector<double> tone(std::size_t n, double hz, double amp = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = amp * std::sin(2 * std::numbers::pi * hz * t / kFs + phase);
  return x;
}

std::vector<double> eeg_segment(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  return synth::eeg_source(n, kFs, rng);
}

// Band powers of a plain DFT, binned by the rhythm edges.
std::array<double, kRhythmCount> dft_band_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::array<double, kRhythmCount> p{};
  for (std::size_t k = 1; k < n / 2; ++k) {
    std::complex<double> s = 0;
    for (std::size_t t = 0; t < n; ++t) s += x[t] * std::polar(1.0, -2 * std::numbers::pi * k * t / n);
    const double hz = k * kFs / n;
    for (std::size_t r = 0; r < kRhythmCount; ++r)
      if (hz >= kRhythmEdgesHz[r][0] && hz < kRhythmEdgesHz[r][1]) p[r] += std::norm(s);
  }
  return p;
}

TEST(Features, ToneIsAlphaDominant) {
  const auto x = tone(1024, 10.0);
  const auto f = segment_features(x, kFs);
  ASSERT_TRUE(f);
  const auto oracle = dft_band_power(x);
  const auto oracle_peak = std::max_element(oracle.begin(), oracle.end()) - oracle.begin();
  const auto peak = std::max_element(f->energy.begin(), f->energy.end()) - f->energy.begin();
  EXPECT_EQ(peak, oracle_peak);
  EXPECT_EQ(static_cast<Rhythm>(peak), Rhythm::Alpha);
  EXPECT_GT((*f)[Rhythm::Alpha], 0.7);
  EXPECT_NEAR(f->total(), 1.0, 1e-12);
}

TEST(Features, ZeroSegmentAndScaleInvariance) {
  EXPECT_FALSE(segment_features(std::vector<double>(1024, 0.0), kFs));
  auto x = eeg_segment(1024, 1);
  const auto f = *segment_features(x, kFs);
  for (auto& v : x) v *= 7.0;
  const auto g = *segment_features(x, kFs);
  for (std::size_t i = 0; i < kRhythmCount; ++i) EXPECT_NEAR(f.energy[i], g.energy[i], 1e-12);
}

WaveletPyramid1D pyramid_of(const std::vector<double>& x) { return dwt1d(x, 5); }

TEST(Match, NearestWithinTau) {
  ReferenceList list(8);
  const BandEnergyVector q{{0.2, 0.2, 0.2, 0.2, 0.2}};
  EXPECT_FALSE(match(q, list, 0.1));
  const auto p = pyramid_of(eeg_segment(1024, 2));
  BandEnergyVector a = q, b = q;
  a.energy[0] += 0.08, a.energy[1] -= 0.08;  // distance 0.08*sqrt2 = 0.113
  b.energy[0] += 0.05, b.energy[1] -= 0.05;  // distance 0.0707
  list.insert(p, a, 0);
  const auto id_b = list.insert(p, b, 1);
  const auto m = match(q, list, 0.12);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->entry->id, id_b);
  EXPECT_NEAR(m->distance, 0.05 * std::numbers::sqrt2, 1e-12);
  EXPECT_FALSE(match(q, list, 0.05));
  const auto self = list.insert(p, q, 2);
  EXPECT_EQ(match(q, list, 0.1)->entry->id, self);
  EXPECT_EQ(match(q, list, 0.1)->distance, 0.0);
}

TEST(Match, AgreesWithExhaustiveScan) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto p = pyramid_of(eeg_segment(1024, 4));
  auto random_features = [&] {
    BandEnergyVector f;
    double s = 0;
    for (auto& v : f.energy) s += (v = u(rng));
    for (auto& v : f.energy) v /= s;
    return f;
  };
  for (int trial = 0; trial < 200; ++trial) {
    ReferenceList list(16);
    std::vector<BandEnergyVector> stored;
    for (int i = 0; i < 10; ++i) {
      stored.push_back(random_features());
      list.insert(p, stored.back(), i);
    }
    const auto q = random_features();
    const double tau = 0.3 * u(rng);
    int best = -1;
    double best_d = INFINITY;
    for (int i = 0; i < 10; ++i) {
      double d = 0;
      for (std::size_t k = 0; k < kRhythmCount; ++k) d += std::pow(q.energy[k] - stored[i].energy[k], 2);
      d = std::sqrt(d);
      if (d <= tau && d < best_d) best = i, best_d = d;
    }
    const auto m = match(q, list, tau);
    if (best < 0) {
      EXPECT_FALSE(m);
    } else {
      ASSERT_TRUE(m);
      EXPECT_EQ(m->entry->id, static_cast<std::uint32_t>(best));
    }
  }
}

TEST(ReferenceList, LruEviction) {
  const auto p = pyramid_of(eeg_segment(1024, 5));
  const BandEnergyVector f{{1, 0, 0, 0, 0}};
  ReferenceList one(1);
  EXPECT_EQ(one.insert(p, f, 0), 0u);
  EXPECT_EQ(one.insert(p, f, 1), 1u);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.entries()[0].id, 1u);

  ReferenceList three(3);
  three.insert(p, f, 0);
  three.insert(p, f, 1);
  three.insert(p, f, 2);
  three.touch(0, 3);  // entry 1 is now the least recently used
  three.insert(p, f, 4);
  std::vector<std::uint32_t> ids;
  for (const auto& e : three.entries()) ids.push_back(e.id);
  EXPECT_EQ(ids, (std::vector<std::uint32_t>{0, 2, 3}));
  EXPECT_EQ(three.find(0)->use_count, 1u);
  EXPECT_THROW(three.touch(1, 5), FormatError);
  EXPECT_THROW(ReferenceList(0), ConfigError);
}

TEST(EncodeSegment, LiteralThenReference) {
  const DictionaryParams params;
  ReferenceList list(4);
  const auto x = eeg_segment(1024, 6);
  const auto first = encode_segment(x, list, 0, 4096, params);
  EXPECT_EQ(first.mode, SegmentMode::Literal);
  EXPECT_EQ(list.size(), 1u);
  const auto second = encode_segment(x, list, 1, 4096, params);
  EXPECT_EQ(second.mode, SegmentMode::Reference);
  EXPECT_EQ(second.ref_id, 0u);
  EXPECT_EQ(list.size(), 1u);
  EXPECT_EQ(list.entries()[0].use_count, 1u);
  EXPECT_LE(second.bits.size(), 4096u);
}

double segment_prd(const std::vector<double>& x, const WaveletPyramid1D& decoded) {
  const auto y = idwt1d(decoded);
  return prd(SignalMatrix(1, x.size(), x), SignalMatrix(1, y.size(), y));
}

// Smallest budget (to 16-bit resolution) whose coding reaches `target` PRD.
template <typename Code>
std::uint64_t min_budget(const Code& code, double target) {
  std::uint64_t lo = 16, hi = 16 * 1024;
  if (code(lo) <= target) return lo;
  while (hi - lo > 16) {
    const std::uint64_t mid = (lo + hi) / 2;
    (code(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

TEST(EncodeSegment, RepeatedSegmentCostsAFractionOfALiteral) {
  const DictionaryParams params;
  const auto x = eeg_segment(1024, 7);
  const std::uint64_t lit = min_budget(
      [&](std::uint64_t b) {
        ReferenceList list(4);
        return segment_prd(x, encode_segment(x, list, 0, b, params).decoded);
      },
      1.0);
  const std::uint64_t ref = min_budget(
      [&](std::uint64_t b) {
        ReferenceList list(4);
        encode_segment(x, list, 0, lit, params);
        const auto coded = encode_segment(x, list, 1, b, params);
        EXPECT_EQ(coded.mode, SegmentMode::Reference);
        return segment_prd(x, coded.decoded);
      },
      1.0);
  EXPECT_LE(ref * 4, lit) << "ref " << ref << " lit " << lit;
}

TEST(EncodeSegment, HarmfulMatchFallsBackToLiteral) {
  // same rhythm profile, opposite phase: pyramid difference has 4x the energy
  const DictionaryParams params;
  ReferenceList list(4);
  const auto a = tone(1024, 10.0, 10.0);
  auto b = a;
  for (auto& v : b) v = -v;
  encode_segment(a, list, 0, 8192, params);
  const auto coded = encode_segment(b, list, 1, 8192, params);
  EXPECT_EQ(coded.mode, SegmentMode::Literal);
  EXPECT_EQ(list.size(), 2u);
}

TEST(FlagRule, Cases) {
  std::vector<double> history(30, 1.0);
  EXPECT_TRUE(flag_seizure_like(history, 10.0, false, 30, 5.0));
  EXPECT_TRUE(flag_seizure_like(history, 5.0, false, 30, 5.0));
  EXPECT_FALSE(flag_seizure_like(history, 4.9, false, 30, 5.0));
  EXPECT_FALSE(flag_seizure_like(history, 10.0, true, 30, 5.0));
  EXPECT_FALSE(flag_seizure_like(std::span<const double>(history).first(29), 10.0, false, 30, 5.0));
  history.assign(30, 0.0);
  EXPECT_FALSE(flag_seizure_like(history, 0.0, false, 30, 5.0));
}

SignalMatrix background_with_burst(std::size_t segments, std::size_t burst_first, std::size_t burst_len) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  SignalMatrix m(2, segments * 1024);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t t = 0; t < m.n_samples(); ++t) m(c, t) = 5.0 * g(rng);
  }
  const auto burst = tone(burst_len * 1024, 12.0, 40.0);
  for (std::size_t t = 0; t < burst.size(); ++t) m(0, burst_first * 1024 + t) += burst[t];
  return m;
}

TEST(DictionaryCodec, FlagsAnEnergyBurst) {
  const SignalMatrix m = background_with_burst(60, 40, 3);
  CodecConfig cfg;
  cfg.tau = 0.05;
  const DictionaryCodec codec(cfg);
  const auto rec = codec.compress(m, 256, 2.0);
  const auto info = parse_dictionary_side_info(rec);
  ASSERT_EQ(info.flags.size(), 1u);
  EXPECT_EQ(info.flags[0].label, "seizure_like_ch0");
  EXPECT_DOUBLE_EQ(info.flags[0].start_s, 40 * 4.0);
  EXPECT_GE(info.flags[0].end_s, 41 * 4.0);
  EXPECT_LE(info.flags[0].end_s, 43 * 4.0);
}

TEST(DictionaryCodec, StationaryBackgroundRaisesNoFlags) {
  const SignalMatrix m = background_with_burst(60, 0, 0);
  const DictionaryCodec codec;
  EXPECT_TRUE(parse_dictionary_side_info(codec.compress(m, 256, 2.0)).flags.empty());
}

TEST(DictionaryCodec, PeriodicSignalBeatsSpiht2DPerChannel) {
  const SignalMatrix m = synth::periodic_eeg(3, 16 * 1024, 1024, kFs, 9);
  const DictionaryCodec dict;
  const double p_dict = prd(m, dict.decompress(dict.compress(m, 256, 2.0)));
  const Spiht2DCodec spiht;
  SignalMatrix per_channel(3, m.n_samples());
  for (std::size_t c = 0; c < 3; ++c) {
    const SignalMatrix row(1, m.n_samples(), {m.row(c).begin(), m.row(c).end()});
    const SignalMatrix out = spiht.decompress(spiht.compress(row, 256, 2.0));
    std::copy(out.row(0).begin(), out.row(0).end(), per_channel.row(c).begin());
  }
  const double p_spiht = prd(m, per_channel);
  EXPECT_LT(p_dict, p_spiht) << p_dict << " vs " << p_spiht;
}

TEST(DictionaryCodec, ZeroSignal) {
  const SignalMatrix m(2, 4096);
  const DictionaryCodec codec;
  const auto rec = codec.compress(m, 256, 2.0);
  const auto info = parse_dictionary_side_info(rec);
  for (const auto& ch : info.segments)
    for (const auto& s : ch) EXPECT_EQ(s.mode, SegmentMode::Literal);
  EXPECT_EQ(codec.decompress(rec), m);
  EXPECT_THROW(prd(m, codec.decompress(rec)), MetricError);
}

TEST(DictionaryCodec, ListsStaySynchronized) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> pick(0, 5);
  // a few recurring patterns mixed with fresh noise, on a small list
  std::vector<std::vector<double>> patterns;
  for (unsigned i = 0; i < 5; ++i) patterns.push_back(eeg_segment(256, 100 + i));
  const std::size_t segments = 500;
  SignalMatrix m(2, segments * 256);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t s = 0; s < segments; ++s) {
      const int k = pick(rng);
      const auto seg = k < 5 ? patterns[k] : eeg_segment(256, static_cast<unsigned>(1000 + s + c * segments));
      std::copy(seg.begin(), seg.end(), m.row(c).begin() + static_cast<std::ptrdiff_t>(s * 256));
    }
  }
  CodecConfig cfg;
  cfg.epoch = 256;
  cfg.capacity = 4;
  const DictionaryCodec codec(cfg);
  DictionaryTrace enc, dec;
  const auto rec = codec.compress(m, 256, 1.0, &enc);
  codec.decompress(parse_container(serialize(rec)), &dec);
  ASSERT_EQ(enc.lists.size(), 2u);
  EXPECT_EQ(enc.lists, dec.lists);
  std::size_t refs = 0;
  for (const auto& ch : parse_dictionary_side_info(rec).segments)
    for (const auto& s : ch) refs += s.mode == SegmentMode::Reference;
  EXPECT_GT(refs, 100u);
}

TEST(DictionaryCodec, BudgetAndPartialEpoch) {
  const SignalMatrix m = synth::correlated_eeg(3, 5000, kFs, 11);
  const DictionaryCodec codec;
  for (double bps : {0.5, 2.0, 4.0}) {
    const auto rec = codec.compress(m, 256, bps);
    EXPECT_LE(rec.payload.size(), static_cast<std::uint64_t>(std::floor(bps * m.size())));
    EXPECT_EQ(codec.decompress(rec).n_samples(), 5000u);
  }
  EXPECT_THROW(codec.compress(m, 256, 0.01), BudgetError);
}

TEST(DictionaryCodec, CorruptReferenceIsFormatError) {
  const SignalMatrix m = synth::periodic_eeg(1, 4096, 1024, kFs, 12);
  const DictionaryCodec codec;
  auto rec = codec.compress(m, 256, 2.0);
  // second segment is a REF to id 0; point it at an id that never existed
  const std::size_t header = 4 + 2 + 1 + 1 + 8;
  const std::size_t second = header + 1 + 8 + 4;
  ASSERT_EQ(rec.side_info[second], 1);
  rec.side_info[second + 1] = 42;
  EXPECT_THROW(codec.decompress(rec), FormatError);
}

}  // namespace
}  // namespace eegc
