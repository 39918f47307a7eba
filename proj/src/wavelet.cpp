#include "eegc/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "eegc/error.hpp"

namespace eegc {
namespace {

// CDF 9/7 lifting coefficients (Daubechies-Sweldens factorization).
constexpr double kAlpha = -1.586134342059924;
constexpr double kBeta = -0.052980118572961;
constexpr double kGamma = 0.882911075530934;
constexpr double kDelta = 0.443506852043971;
// Unscaled lifting has DC gain K = 1.2301741049140; these map it to sqrt(2).
constexpr double kLowScale = 1.149604398860242;   // sqrt(2) / K
constexpr double kHighScale = 0.869864451624533;  // K / sqrt(2)

using Index = std::ptrdiff_t;

inline Index mirror(Index j, Index n) {
  if (j < 0) return -j;
  if (j >= n) return 2 * (n - 1) - j;
  return j;
}

void lift(std::span<double> x, Index parity, double c) {
  const Index n = static_cast<Index>(x.size());
  for (Index j = parity; j < n; j += 2) {
    x[j] += c * (x[mirror(j - 1, n)] + x[mirror(j + 1, n)]);
  }
}

}  // namespace

void analyze_level(std::span<double> x, std::vector<double>& scratch) {
  const std::size_t n = x.size();
  if (n < 2) return;
  lift(x, 1, kAlpha);
  lift(x, 0, kBeta);
  lift(x, 1, kGamma);
  lift(x, 0, kDelta);
  const std::size_t n_low = (n + 1) / 2;
  scratch.resize(n);
  for (std::size_t i = 0; i < n_low; ++i) scratch[i] = x[2 * i] * kLowScale;
  for (std::size_t i = 0; 2 * i + 1 < n; ++i) scratch[n_low + i] = x[2 * i + 1] * kHighScale;
  std::copy(scratch.begin(), scratch.begin() + static_cast<Index>(n), x.begin());
}

void synthesize_level(std::span<double> x, std::vector<double>& scratch) {
  const std::size_t n = x.size();
  if (n < 2) return;
  const std::size_t n_low = (n + 1) / 2;
  scratch.resize(n);
  for (std::size_t i = 0; i < n_low; ++i) scratch[2 * i] = x[i] / kLowScale;
  for (std::size_t i = 0; 2 * i + 1 < n; ++i) scratch[2 * i + 1] = x[n_low + i] / kHighScale;
  std::copy(scratch.begin(), scratch.begin() + static_cast<Index>(n), x.begin());
  lift(x, 0, -kDelta);
  lift(x, 1, -kGamma);
  lift(x, 0, -kBeta);
  lift(x, 1, -kAlpha);
}

std::vector<std::size_t> dyadic_lengths(std::size_t n, int levels) {
  std::vector<std::size_t> out{n};
  for (int k = 0; k < levels; ++k) out.push_back((out.back() + 1) / 2);
  return out;
}

int max_levels_for(std::size_t n, int max_levels) {
  int levels = 0;
  while (levels < max_levels && (std::size_t{1} << (levels + 1)) <= n) ++levels;
  return levels;
}

std::vector<double> WaveletPyramid1D::flatten() const {
  std::vector<double> out(approx);
  for (const auto& d : details) out.insert(out.end(), d.begin(), d.end());
  return out;
}

WaveletPyramid1D WaveletPyramid1D::unflatten(std::span<const double> flat,
                                             std::size_t original_len, int levels) {
  if (levels < 1 || flat.size() != original_len) {
    throw StructureError("flat coefficient count does not match the pyramid shape");
  }
  const auto len = dyadic_lengths(original_len, levels);
  WaveletPyramid1D pyr;
  pyr.levels = levels;
  pyr.original_len = original_len;
  std::size_t pos = len[levels];
  pyr.approx.assign(flat.begin(), flat.begin() + static_cast<Index>(pos));
  for (int k = levels; k >= 1; --k) {
    const std::size_t count = len[k - 1] - len[k];
    pyr.details.emplace_back(flat.begin() + static_cast<Index>(pos),
                             flat.begin() + static_cast<Index>(pos + count));
    pos += count;
  }
  return pyr;
}

double WaveletPyramid1D::energy() const {
  double e = 0.0;
  for (double v : approx) e += v * v;
  for (const auto& d : details)
    for (double v : d) e += v * v;
  return e;
}

WaveletPyramid1D dwt1d(std::span<const double> signal, int levels) {
  if (levels < 1) throw SizeError("dwt1d needs at least one level");
  if (signal.size() < (std::size_t{1} << levels)) {
    throw SizeError("signal of length " + std::to_string(signal.size()) + " is too short for " +
                    std::to_string(levels) + " levels");
  }
  std::vector<double> work(signal.begin(), signal.end());
  std::vector<double> scratch;
  const auto len = dyadic_lengths(signal.size(), levels);
  for (int k = 1; k <= levels; ++k) {
    analyze_level(std::span<double>(work.data(), len[k - 1]), scratch);
  }
  // `work` is now laid out as [approx, level L, ..., level 1].
  return WaveletPyramid1D::unflatten(work, signal.size(), levels);
}

std::vector<double> idwt1d(const WaveletPyramid1D& pyr) {
  if (pyr.levels < 1 || pyr.details.size() != static_cast<std::size_t>(pyr.levels)) {
    throw StructureError("pyramid detail count does not match its level count");
  }
  const auto len = dyadic_lengths(pyr.original_len, pyr.levels);
  if (pyr.original_len < (std::size_t{1} << pyr.levels) || pyr.approx.size() != len[pyr.levels]) {
    throw StructureError("approximation band length is inconsistent");
  }
  for (int k = pyr.levels; k >= 1; --k) {
    if (pyr.details[static_cast<std::size_t>(pyr.levels - k)].size() != len[k - 1] - len[k]) {
      throw StructureError("detail band length is inconsistent at level " + std::to_string(k));
    }
  }
  std::vector<double> work = pyr.flatten();
  std::vector<double> scratch;
  for (int k = pyr.levels; k >= 1; --k) {
    synthesize_level(std::span<double>(work.data(), len[k - 1]), scratch);
  }
  return work;
}

SubbandRect WaveletPyramid2D::subband(Subband band, int level) const {
  if (level < 1 || level > levels || (band == Subband::LL && level != levels)) {
    throw StructureError("no such subband");
  }
  const auto lr = dyadic_lengths(rows, levels);
  const auto lc = dyadic_lengths(cols, levels);
  const auto k = static_cast<std::size_t>(level);
  switch (band) {
    case Subband::LL: return {0, 0, lr[k], lc[k]};
    case Subband::HL: return {0, lc[k], lr[k], lc[k - 1] - lc[k]};
    case Subband::LH: return {lr[k], 0, lr[k - 1] - lr[k], lc[k]};
    case Subband::HH: return {lr[k], lc[k], lr[k - 1] - lr[k], lc[k - 1] - lc[k]};
  }
  return {};
}

double WaveletPyramid2D::energy() const {
  double e = 0.0;
  for (double v : coeffs) e += v * v;
  return e;
}

WaveletPyramid2D dwt2d(const SignalMatrix& m, int levels) {
  if (levels < 1) throw SizeError("dwt2d needs at least one level");
  const std::size_t min_dim = std::size_t{1} << levels;
  if (m.n_channels() < min_dim || m.n_samples() < min_dim) {
    throw SizeError("matrix " + std::to_string(m.n_channels()) + "x" + std::to_string(m.n_samples()) +
                    " is too small for " + std::to_string(levels) + " 2D levels");
  }
  WaveletPyramid2D pyr;
  pyr.levels = levels;
  pyr.rows = m.n_channels();
  pyr.cols = m.n_samples();
  pyr.coeffs.assign(m.data().begin(), m.data().end());
  const auto lr = dyadic_lengths(pyr.rows, levels);
  const auto lc = dyadic_lengths(pyr.cols, levels);
  std::vector<double> scratch, column;
  for (int k = 1; k <= levels; ++k) {
    const std::size_t r = lr[k - 1], c = lc[k - 1];
    for (std::size_t i = 0; i < r; ++i) {
      analyze_level(std::span<double>(pyr.coeffs.data() + i * pyr.cols, c), scratch);
    }
    column.resize(r);
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t i = 0; i < r; ++i) column[i] = pyr.coeffs[i * pyr.cols + j];
      analyze_level(column, scratch);
      for (std::size_t i = 0; i < r; ++i) pyr.coeffs[i * pyr.cols + j] = column[i];
    }
  }
  return pyr;
}

SignalMatrix idwt2d(const WaveletPyramid2D& pyr) {
  if (pyr.levels < 1 || pyr.coeffs.size() != pyr.rows * pyr.cols ||
      pyr.rows < (std::size_t{1} << pyr.levels) || pyr.cols < (std::size_t{1} << pyr.levels)) {
    throw StructureError("2D pyramid dimensions are inconsistent");
  }
  std::vector<double> work = pyr.coeffs;
  const auto lr = dyadic_lengths(pyr.rows, pyr.levels);
  const auto lc = dyadic_lengths(pyr.cols, pyr.levels);
  std::vector<double> scratch, column;
  for (int k = pyr.levels; k >= 1; --k) {
    const std::size_t r = lr[k - 1], c = lc[k - 1];
    column.resize(r);
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t i = 0; i < r; ++i) column[i] = work[i * pyr.cols + j];
      synthesize_level(column, scratch);
      for (std::size_t i = 0; i < r; ++i) work[i * pyr.cols + j] = column[i];
    }
    for (std::size_t i = 0; i < r; ++i) {
      synthesize_level(std::span<double>(work.data() + i * pyr.cols, c), scratch);
    }
  }
  return SignalMatrix(pyr.rows, pyr.cols, std::move(work));
}

double BandEnergyVector::total() const {
  double t = 0.0;
  for (double e : energy) t += e;
  return t;
}

std::vector<FrequencyBand> dyadic_bands(int levels, double fs) {
  std::vector<FrequencyBand> out;
  out.push_back({0.0, fs / std::ldexp(1.0, levels + 1)});
  for (int k = levels; k >= 1; --k) {
    out.push_back({fs / std::ldexp(1.0, k + 1), fs / std::ldexp(1.0, k)});
  }
  return out;
}

Rhythm rhythm_for_band(FrequencyBand band) {
  std::size_t best = 0;
  double best_overlap = -1.0;
  for (std::size_t r = 0; r < kRhythmCount; ++r) {
    const double lo = std::max(band.low_hz, kRhythmEdgesHz[r][0]);
    const double hi = std::min(band.high_hz, kRhythmEdgesHz[r][1]);
    const double overlap = std::max(0.0, hi - lo);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = r;
    }
  }
  if (best_overlap <= 0.0) {
    best = band.low_hz >= kRhythmEdgesHz.back()[1] ? kRhythmCount - 1 : 0;
  }
  return static_cast<Rhythm>(best);
}

std::vector<double> group_energies(const WaveletPyramid1D& pyr) {
  std::vector<double> out;
  auto sum_sq = [](const std::vector<double>& v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
  };
  out.push_back(sum_sq(pyr.approx));
  for (const auto& d : pyr.details) out.push_back(sum_sq(d));
  return out;
}

BandEnergyVector band_energies(const WaveletPyramid1D& pyr, double fs) {
  if (!(fs > 0.0)) throw DomainError("sampling rate must be positive");
  BandEnergyVector out;
  const auto bands = dyadic_bands(pyr.levels, fs);
  const auto energies = group_energies(pyr);
  for (std::size_t g = 0; g < bands.size(); ++g) {
    out.energy[static_cast<std::size_t>(rhythm_for_band(bands[g]))] += energies[g];
  }
  return out;
}

}  // namespace eegc
