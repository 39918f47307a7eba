#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "eegc/signal.hpp"

namespace eegc {

// CDF 9/7 analysis with whole-sample symmetric extension. Each level splits
// a length-n signal into ceil(n/2) low-pass and floor(n/2) high-pass
// coefficients, so the transform is non-expansive for any length. Low-pass
// gain at DC and high-pass gain at Nyquist are both sqrt(2).
struct WaveletPyramid1D {
  int levels = 0;
  std::vector<double> approx;
  // details[0] is the coarsest level L, details[levels - 1] is level 1.
  std::vector<std::vector<double>> details;
  std::size_t original_len = 0;

  // Coefficients concatenated as [approx, level L, ..., level 1].
  std::vector<double> flatten() const;
  static WaveletPyramid1D unflatten(std::span<const double> flat,
                                    std::size_t original_len, int levels);
  double energy() const;
};

// Low-pass lengths of successive levels: lengths[0] = n, lengths[k] is the
// approximation length after k levels.
std::vector<std::size_t> dyadic_lengths(std::size_t n, int levels);

// Largest level count (<= max_levels) that a signal of length n supports.
int max_levels_for(std::size_t n, int max_levels);

WaveletPyramid1D dwt1d(std::span<const double> signal, int levels);
std::vector<double> idwt1d(const WaveletPyramid1D& pyr);

// Single-level analysis/synthesis in place on a contiguous buffer, with
// output in [low | high] order. Exposed for the 2D transform and tests.
void analyze_level(std::span<double> x, std::vector<double>& scratch);
void synthesize_level(std::span<double> x, std::vector<double>& scratch);

enum class Subband { LL, HL, LH, HH };

struct SubbandRect {
  std::size_t row0, col0, rows, cols;
};

// Separable 2D pyramid in Mallat layout: after level k the top-left
// ceil^k(rows) x ceil^k(cols) block holds LL_k; HL_k (high along columns)
// sits to its right, LH_k below it and HH_k diagonally.
struct WaveletPyramid2D {
  int levels = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> coeffs;  // row-major, rows x cols

  // `level` is 1..levels; LL is only defined at level == levels.
  SubbandRect subband(Subband band, int level) const;
  double energy() const;
};

WaveletPyramid2D dwt2d(const SignalMatrix& m, int levels);
SignalMatrix idwt2d(const WaveletPyramid2D& pyr);

enum class Rhythm { Delta = 0, Theta, Alpha, Beta, Gamma };
inline constexpr std::size_t kRhythmCount = 5;
inline constexpr std::array<std::array<double, 2>, kRhythmCount> kRhythmEdgesHz{{
    {0.0, 4.0}, {4.0, 8.0}, {8.0, 13.0}, {13.0, 30.0}, {30.0, 100.0}}};

struct BandEnergyVector {
  std::array<double, kRhythmCount> energy{};

  double operator[](Rhythm r) const { return energy[static_cast<std::size_t>(r)]; }
  double total() const;
};

struct FrequencyBand {
  double low_hz;
  double high_hz;
};

// Frequency span of the pyramid's coefficient groups in flatten() order:
// [approx, level L, ..., level 1].
std::vector<FrequencyBand> dyadic_bands(int levels, double fs);

// Rhythm receiving a dyadic band: the one with the largest frequency
// overlap (ties go to the lower rhythm). Bands with no overlap go to the
// nearest rhythm. At 5 levels and 256 Hz the approximation band is exactly
// delta and the 8-16 Hz band is counted as alpha.
Rhythm rhythm_for_band(FrequencyBand band);

// Energy of each coefficient group, in dyadic_bands() order.
std::vector<double> group_energies(const WaveletPyramid1D& pyr);

BandEnergyVector band_energies(const WaveletPyramid1D& pyr, double fs);

}  // namespace eegc
