#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "eegc/codec.hpp"
#include "eegc/signal.hpp"

namespace eegc {

struct PreprocSideInfo {
  // Row i of the preprocessed matrix is input channel channel_order[i].
  std::vector<std::uint32_t> channel_order;
  // Indexed by input channel.
  std::vector<double> channel_means;
  std::size_t pad_rows = 0;
  std::size_t pad_cols = 0;
};

// Removes per-channel means, reorders channels greedily so each row has the
// highest Pearson correlation with its predecessor (starting from the
// channel with the highest mean absolute correlation to the others), and
// zero-pads both dimensions to multiples of 2^levels.
std::pair<SignalMatrix, PreprocSideInfo> preprocess(const SignalMatrix& m, int levels);

// Inverse of preprocess: crop padding, restore channel order, add means.
SignalMatrix unpreprocess(const SignalMatrix& m, const PreprocSideInfo& side);

// Greedy chain objective used by preprocess: the sum of correlations between
// consecutive rows of `order` under the Pearson matrix `corr` (n x n).
double chain_correlation(const std::vector<double>& corr, std::size_t n, const std::vector<std::uint32_t>& order);
// Pearson correlation matrix of the rows of m; zero-variance rows give 0.
std::vector<double> correlation_matrix(const SignalMatrix& m);

// Method 1: preprocess -> 2D DWT -> quantize -> 2D SPIHT, one stream per
// time window.
class Spiht2DCodec final : public Codec {
 public:
  explicit Spiht2DCodec(CodecConfig config = {});
  CodecId id() const override { return CodecId::Spiht2D; }
  CompressedRecord compress(const SignalMatrix& m, std::uint32_t fs, double target_bps) const override;
  SignalMatrix decompress(const CompressedRecord& rec) const override;

 private:
  CodecConfig config_;
};

}  // namespace eegc
