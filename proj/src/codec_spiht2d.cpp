#include "eegc/codec_spiht2d.hpp"

#include <algorithm>
#include <cmath>

#include "coding.hpp"
#include "eegc/error.hpp"
#include "eegc/wavelet.hpp"

namespace eegc {

std::vector<double> correlation_matrix(const SignalMatrix& m) {
  const std::size_t c = m.n_channels(), n = m.n_samples();
  std::vector<double> centered(m.data().begin(), m.data().end());
  std::vector<double> norm(c, 0.0);
  for (std::size_t ch = 0; ch < c; ++ch) {
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) mean += centered[ch * n + t];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      centered[ch * n + t] -= mean;
      ss += centered[ch * n + t] * centered[ch * n + t];
    }
    norm[ch] = std::sqrt(ss);
  }
  std::vector<double> corr(c * c, 0.0);
  for (std::size_t a = 0; a < c; ++a) {
    for (std::size_t b = a; b < c; ++b) {
      double v = 0.0;
      if (norm[a] > 0.0 && norm[b] > 0.0) {
        double dot = 0.0;
        for (std::size_t t = 0; t < n; ++t) dot += centered[a * n + t] * centered[b * n + t];
        v = dot / (norm[a] * norm[b]);
      }
      corr[a * c + b] = corr[b * c + a] = v;
    }
  }
  return corr;
}

double chain_correlation(const std::vector<double>& corr, std::size_t n, const std::vector<std::uint32_t>& order) {
  double s = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) s += corr[order[i - 1] * n + order[i]];
  return s;
}

std::pair<SignalMatrix, PreprocSideInfo> preprocess(const SignalMatrix& m, int levels) {
  if (levels < 1) throw SizeError("preprocess needs at least one level");
  const std::size_t c = m.n_channels(), n = m.n_samples();
  PreprocSideInfo side;
  side.channel_means.resize(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    double mean = 0.0;
    for (double v : m.row(ch)) mean += v;
    side.channel_means[ch] = mean / static_cast<double>(n);
  }

  const auto corr = correlation_matrix(m);
  std::size_t start = 0;
  double best = -1.0;
  for (std::size_t a = 0; a < c; ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < c; ++b)
      if (b != a) s += std::abs(corr[a * c + b]);
    const double mean_abs = c > 1 ? s / static_cast<double>(c - 1) : 0.0;
    if (mean_abs > best) {
      best = mean_abs;
      start = a;
    }
  }
  std::vector<bool> used(c, false);
  side.channel_order.push_back(static_cast<std::uint32_t>(start));
  used[start] = true;
  while (side.channel_order.size() < c) {
    const std::size_t prev = side.channel_order.back();
    std::size_t pick = c;
    double pick_corr = 0.0;
    for (std::size_t b = 0; b < c; ++b) {
      if (used[b]) continue;
      if (pick == c || corr[prev * c + b] > pick_corr) {
        pick = b;
        pick_corr = corr[prev * c + b];
      }
    }
    side.channel_order.push_back(static_cast<std::uint32_t>(pick));
    used[pick] = true;
  }

  const std::size_t block = std::size_t{1} << levels;
  const std::size_t rows = (c + block - 1) / block * block;
  const std::size_t cols = (n + block - 1) / block * block;
  side.pad_rows = rows - c;
  side.pad_cols = cols - n;
  SignalMatrix out(rows, cols);
  for (std::size_t i = 0; i < c; ++i) {
    const std::size_t ch = side.channel_order[i];
    auto src = m.row(ch);
    auto dst = out.row(i);
    for (std::size_t t = 0; t < n; ++t) dst[t] = src[t] - side.channel_means[ch];
  }
  return {std::move(out), std::move(side)};
}

SignalMatrix unpreprocess(const SignalMatrix& m, const PreprocSideInfo& side) {
  const std::size_t c = side.channel_order.size();
  if (c == 0 || side.channel_means.size() != c || m.n_channels() != c + side.pad_rows ||
      m.n_samples() <= side.pad_cols) {
    throw StructureError("preprocessing side info does not match the matrix");
  }
  std::vector<bool> seen(c, false);
  for (auto ch : side.channel_order) {
    if (ch >= c || seen[ch]) throw StructureError("channel order is not a permutation");
    seen[ch] = true;
  }
  const std::size_t n = m.n_samples() - side.pad_cols;
  SignalMatrix out(c, n);
  for (std::size_t i = 0; i < c; ++i) {
    const std::size_t ch = side.channel_order[i];
    auto src = m.row(i);
    auto dst = out.row(ch);
    for (std::size_t t = 0; t < n; ++t) dst[t] = src[t] + side.channel_means[ch];
  }
  return out;
}

Spiht2DCodec::Spiht2DCodec(CodecConfig config) : config_(std::move(config)) { config_.validate(); }

CompressedRecord Spiht2DCodec::compress(const SignalMatrix& m, std::uint32_t fs, double target_bps) const {
  check_target_bps(target_bps);
  const int levels = config_.levels_2d;
  const std::size_t min_len = std::size_t{1} << levels;
  if (m.n_samples() < min_len) {
    throw SizeError("window of " + std::to_string(m.n_samples()) + " samples is smaller than 2^" +
                    std::to_string(levels));
  }
  if (m.n_channels() > 0xFFFF) throw SizeError("too many channels for the container");

  CompressedRecord rec;
  rec.codec = CodecId::Spiht2D;
  rec.n_channels = static_cast<std::uint32_t>(m.n_channels());
  rec.n_samples = static_cast<std::uint32_t>(m.n_samples());
  rec.fs = fs;
  rec.levels = static_cast<std::uint16_t>(levels);
  rec.target_bps = target_bps;

  ByteWriter side;
  side.u8(static_cast<std::uint8_t>(config_.precision_bits));
  const auto windows = detail::split_windows(m.n_samples(), config_.window_samples, min_len);
  side.u32(static_cast<std::uint32_t>(windows.size()));
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto [first, len] = windows[w];
    const SignalMatrix block = m.columns(first, len);
    auto [pre, info] = preprocess(block, levels);
    const WaveletPyramid2D pyr = dwt2d(pre, levels);
    const auto budget = static_cast<std::uint64_t>(std::floor(target_bps * static_cast<double>(block.size())));
    auto coded = detail::code_block(pyr.coeffs, PyramidShape::of(pyr), config_.precision_bits, budget);
    if (w == 0) rec.quant_scale = coded.scale;

    side.u32(static_cast<std::uint32_t>(first));
    side.u32(static_cast<std::uint32_t>(len));
    side.u16(static_cast<std::uint16_t>(info.pad_rows));
    side.u16(static_cast<std::uint16_t>(info.pad_cols));
    for (auto ch : info.channel_order) side.u16(static_cast<std::uint16_t>(ch));
    for (double mean : info.channel_means) side.f64(mean);
    side.f64(coded.scale);
    side.u64(coded.bits.size());
    rec.payload.append(coded.bits);
  }
  rec.side_info = side.take();
  return rec;
}

SignalMatrix Spiht2DCodec::decompress(const CompressedRecord& rec) const {
  if (rec.codec != CodecId::Spiht2D) throw FormatError("container is not a 2D SPIHT record");
  const std::size_t c = rec.n_channels, n = rec.n_samples;
  const int levels = rec.levels;
  ByteReader side(rec.side_info);
  const int precision = side.u8();
  (void)precision;
  const std::uint32_t n_windows = side.u32();
  SignalMatrix out(c, n);
  detail::PayloadCursor cursor(rec.payload);
  std::size_t expected_first = 0;
  for (std::uint32_t w = 0; w < n_windows; ++w) {
    const std::size_t first = side.u32();
    const std::size_t len = side.u32();
    if (first != expected_first || len == 0 || first + len > n) throw FormatError("window table is inconsistent");
    expected_first = first + len;
    PreprocSideInfo info;
    info.pad_rows = side.u16();
    info.pad_cols = side.u16();
    info.channel_order.resize(c);
    for (auto& ch : info.channel_order) ch = side.u16();
    info.channel_means.resize(c);
    for (auto& mean : info.channel_means) mean = side.f64();
    const double scale = side.f64();
    const std::uint64_t bits = side.u64();

    const PyramidShape shape{Topology::TwoD, c + info.pad_rows, len + info.pad_cols, levels};
    WaveletPyramid2D pyr;
    pyr.levels = levels;
    pyr.rows = shape.rows;
    pyr.cols = shape.cols;
    pyr.coeffs = detail::decode_block(cursor.next(bits), shape, scale);
    out.set_columns(first, unpreprocess(idwt2d(pyr), info));
  }
  if (expected_first != n || !side.done()) throw FormatError("window table does not cover the record");
  return out;
}

}  // namespace eegc
