#include "eegc/codec_dipole.hpp"

#include <algorithm>
#include <cmath>

#include "coding.hpp"
#include "eegc/error.hpp"
#include "eegc/spiht.hpp"
#include "eegc/wavelet.hpp"

namespace eegc {
namespace {

std::size_t moment_bytes(std::size_t length) { return (3 * length * kMomentBits + 7) / 8; }

std::uint64_t base_side_bits(std::size_t length) { return 8 * (12 + 2 + moment_bytes(length) + 4 + 1); }

std::uint64_t extension_bits(std::size_t streams) { return 8 * (8 + 1 + 4 * streams); }

HeadModel model_for(const std::vector<std::string>& labels, std::size_t channels, double radius) {
  if (labels.empty()) return HeadModel::for_channels({}, channels, radius);
  if (labels.size() != channels) throw FormatError("dipole labels do not match the channel count");
  return HeadModel::from_labels(labels, radius);
}

// Integers of a coefficient block under an externally chosen scale.
std::vector<std::int32_t> quantize_with(std::span<const double> coeffs, double scale, double top) {
  std::vector<std::int32_t> out(coeffs.size(), 0);
  if (scale == 0.0) return out;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    out[i] = static_cast<std::int32_t>(std::clamp(std::round(coeffs[i] / scale), -top, top));
  return out;
}

void write_window(ByteWriter& side, const DipoleWindow& w) {
  for (float v : w.position) side.f32(v);
  side.u16(static_cast<std::uint16_t>(w.length));
  Bitstream packed;
  for (std::int32_t q : w.moments) packed.append_bits(static_cast<std::uint32_t>(q) & 0xFFFu, kMomentBits);
  std::vector<std::uint8_t> bytes = packed.bytes();
  bytes.resize(moment_bytes(w.length), 0);
  side.bytes(bytes);
  side.f32(w.moment_scale);
  side.u8(static_cast<std::uint8_t>(w.coder));
  if (w.coder == ResidualCoder::None) return;
  side.f64(w.residual_scale);
  side.u8(static_cast<std::uint8_t>(w.residual_levels));
  for (auto b : w.stream_bits) side.u32(static_cast<std::uint32_t>(b));
}

}  // namespace

Eigen::MatrixXd dipole_projection(const DipoleWindow& w, const HeadModel& model) {
  const Vec3 p(w.position[0], w.position[1], w.position[2]);
  const auto len = static_cast<Eigen::Index>(w.length);
  Eigen::MatrixXd m(3, len);
  for (Eigen::Index a = 0; a < 3; ++a)
    for (Eigen::Index t = 0; t < len; ++t)
      m(a, t) = w.moments[static_cast<std::size_t>(a * len + t)] * static_cast<double>(w.moment_scale);
  return lead_field(p, model) * m;
}

DipoleCodec::DipoleCodec(CodecConfig config) : config_(std::move(config)) { config_.validate(); }

CompressedRecord DipoleCodec::compress(const SignalMatrix& m, std::uint32_t fs, double target_bps) const {
  return compress(m, fs, target_bps, nullptr);
}

CompressedRecord DipoleCodec::compress(const SignalMatrix& m, std::uint32_t fs, double target_bps,
                                       std::vector<DipoleWindowReport>* report) const {
  check_target_bps(target_bps);
  if (m.empty()) throw SizeError("empty recording");
  if (m.n_samples() < 8) throw SizeError("dipole codec needs at least 8 samples");
  const std::size_t c = m.n_channels();
  const HeadModel model = HeadModel::for_channels(config_.channel_labels, c);
  const bool explicit_labels = config_.channel_labels.size() == c && model.labels == config_.channel_labels;
  const double top = std::ldexp(1.0, config_.precision_bits - 1) - 1.0;

  CompressedRecord rec;
  rec.codec = CodecId::Dipole;
  rec.n_channels = static_cast<std::uint32_t>(c);
  rec.n_samples = static_cast<std::uint32_t>(m.n_samples());
  rec.fs = fs;
  rec.levels = static_cast<std::uint16_t>(config_.levels_2d);
  rec.target_bps = target_bps;

  ByteWriter side;
  side.f64(model.radius);
  side.u16(static_cast<std::uint16_t>(config_.dipole_window));
  side.u8(static_cast<std::uint8_t>(config_.precision_bits));
  side.u16(static_cast<std::uint16_t>(explicit_labels ? c : 0));
  if (explicit_labels)
    for (const auto& l : model.labels) side.str(l);
  const auto windows = detail::split_windows(m.n_samples(), config_.dipole_window, 8);
  side.u32(static_cast<std::uint32_t>(windows.size()));

  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    const auto [first, len] = windows[wi];
    const SignalMatrix block = m.columns(first, len);
    DipoleWindowReport rep;
    rep.fit = fit_window(block, model);

    // Closed loop: the residual is taken against what the decoder will
    // rebuild from the rounded position and quantized moments.
    DipoleWindow w;
    w.first = first;
    w.length = len;
    for (int a = 0; a < 3; ++a) w.position[a] = static_cast<float>(rep.fit.dipole.position[a]);
    const Vec3 p(w.position[0], w.position[1], w.position[2]);
    const Eigen::MatrixXd x = to_eigen(block);
    const Eigen::MatrixXd moments = solve_moments(lead_field(p, model), x);
    const double peak = moments.cwiseAbs().maxCoeff();
    w.moment_scale = static_cast<float>(peak / kMomentMax);
    w.moments.assign(3 * len, 0);
    if (w.moment_scale > 0.0f) {
      for (Eigen::Index a = 0; a < 3; ++a)
        for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(len); ++t)
          w.moments[static_cast<std::size_t>(a) * len + static_cast<std::size_t>(t)] = static_cast<std::int32_t>(
              std::clamp(std::round(moments(a, t) / w.moment_scale), -double(kMomentMax), double(kMomentMax)));
    }
    const SignalMatrix residual = from_eigen(x - dipole_projection(w, model));
    if (wi == 0) rec.quant_scale = w.moment_scale;

    const auto budget = static_cast<std::uint64_t>(std::floor(target_bps * static_cast<double>(c * len)));
    const std::uint64_t base = base_side_bits(len);
    if (base > budget) {
      throw BudgetError("dipole side info needs " + std::to_string(base) + " bits but the window budget is " +
                        std::to_string(budget));
    }
    rep.smoothness = smoothness(residual, fs);

    const int levels_2d = max_levels_for(std::min(c, len), config_.levels_2d);
    const int levels_1d = max_levels_for(len, config_.levels_1d);
    const bool residual_zero = residual.energy() == 0.0;
    const std::uint64_t avail_2d = budget - std::min(budget, base + extension_bits(1));
    const std::uint64_t avail_1d = (budget - std::min(budget, base + extension_bits(c))) / c;
    const bool can_2d = levels_2d >= 1 && avail_2d >= kMinSpihtBudget;
    const bool can_1d = levels_1d >= 1 && avail_1d >= kMinSpihtBudget;
    if (residual_zero || (!can_2d && !can_1d)) {
      w.coder = ResidualCoder::None;
    } else if ((rep.smoothness >= config_.smooth_threshold && can_2d) || !can_1d) {
      w.coder = ResidualCoder::TwoD;
    } else {
      w.coder = ResidualCoder::OneD;
    }

    if (w.coder == ResidualCoder::TwoD) {
      w.residual_levels = levels_2d;
      const WaveletPyramid2D pyr = dwt2d(residual, levels_2d);
      auto coded = detail::code_block(pyr.coeffs, PyramidShape::of(pyr), config_.precision_bits, avail_2d);
      w.residual_scale = coded.scale;
      w.stream_bits = {coded.bits.size()};
      rec.payload.append(coded.bits);
    } else if (w.coder == ResidualCoder::OneD) {
      w.residual_levels = levels_1d;
      std::vector<WaveletPyramid1D> pyrs;
      double coef_peak = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) {
        pyrs.push_back(dwt1d(residual.row(ch), levels_1d));
        for (double v : pyrs.back().flatten()) coef_peak = std::max(coef_peak, std::abs(v));
      }
      w.residual_scale = coef_peak / top;
      for (const auto& pyr : pyrs) {
        IntPyramid ints{PyramidShape::of(pyr), quantize_with(pyr.flatten(), w.residual_scale, top)};
        Bitstream bits = spiht_encode(ints, avail_1d);
        w.stream_bits.push_back(bits.size());
        rec.payload.append(bits);
      }
    }
    const std::size_t before = side.size();
    write_window(side, w);
    rep.side_bits = 8 * (side.size() - before);
    rep.coder = w.coder;
    for (auto b : w.stream_bits) rep.residual_bits += b;
    if (report) report->push_back(std::move(rep));
  }
  rec.side_info = side.take();
  return rec;
}

DipoleSideInfo parse_dipole_side_info(const CompressedRecord& rec) {
  if (rec.codec != CodecId::Dipole) throw FormatError("container is not a dipole record");
  ByteReader side(rec.side_info);
  DipoleSideInfo info;
  info.radius = side.f64();
  if (!(info.radius > 0.0)) throw FormatError("invalid head radius");
  info.window = side.u16();
  info.precision_bits = side.u8();
  const std::size_t n_labels = side.u16();
  for (std::size_t i = 0; i < n_labels; ++i) info.labels.push_back(side.str());
  const std::uint32_t n_windows = side.u32();
  std::size_t first = 0;
  for (std::uint32_t wi = 0; wi < n_windows; ++wi) {
    DipoleWindow w;
    w.first = first;
    for (float& v : w.position) v = side.f32();
    w.length = side.u16();
    if (w.length == 0 || first + w.length > rec.n_samples) throw FormatError("dipole window table is inconsistent");
    const auto bytes = side.bytes(moment_bytes(w.length));
    const Bitstream packed = Bitstream::from_bytes({bytes.begin(), bytes.end()}, 3 * w.length * kMomentBits);
    BitReader reader(packed);
    w.moments.resize(3 * w.length);
    for (auto& q : w.moments) {
      auto raw = static_cast<std::int32_t>(reader.read_bits(kMomentBits));
      if (raw & 0x800) raw -= 0x1000;
      q = raw;
    }
    w.moment_scale = side.f32();
    const std::uint8_t coder = side.u8();
    if (coder > 2) throw FormatError("unknown residual coder");
    w.coder = static_cast<ResidualCoder>(coder);
    if (w.coder != ResidualCoder::None) {
      w.residual_scale = side.f64();
      w.residual_levels = side.u8();
      const std::size_t streams = w.coder == ResidualCoder::TwoD ? 1 : rec.n_channels;
      for (std::size_t s = 0; s < streams; ++s) w.stream_bits.push_back(side.u32());
    }
    first += w.length;
    info.windows.push_back(std::move(w));
  }
  if (first != rec.n_samples || !side.done()) throw FormatError("dipole windows do not cover the record");
  return info;
}

SignalMatrix DipoleCodec::decompress(const CompressedRecord& rec) const {
  const DipoleSideInfo info = parse_dipole_side_info(rec);
  const std::size_t c = rec.n_channels;
  HeadModel model;
  try {
    model = model_for(info.labels, c, info.radius);
  } catch (const DomainError& e) {
    throw FormatError(std::string("dipole head model: ") + e.what());
  }
  SignalMatrix out(c, rec.n_samples);
  detail::PayloadCursor cursor(rec.payload);
  for (const auto& w : info.windows) {
    const Vec3 p(w.position[0], w.position[1], w.position[2]);
    if (!p.allFinite() || !(p.norm() < info.radius)) throw FormatError("dipole position outside the head");
    Eigen::MatrixXd block = dipole_projection(w, model);
    if (w.coder == ResidualCoder::TwoD) {
      PyramidShape shape{Topology::TwoD, c, w.length, w.residual_levels};
      WaveletPyramid2D pyr;
      pyr.levels = w.residual_levels;
      pyr.rows = c;
      pyr.cols = w.length;
      pyr.coeffs = detail::decode_block(cursor.next(w.stream_bits[0]), shape, w.residual_scale);
      block += to_eigen(idwt2d(pyr));
    } else if (w.coder == ResidualCoder::OneD) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const PyramidShape shape{Topology::OneD, 1, w.length, w.residual_levels};
        const auto flat = detail::decode_block(cursor.next(w.stream_bits[ch]), shape, w.residual_scale);
        const auto row = idwt1d(WaveletPyramid1D::unflatten(flat, w.length, w.residual_levels));
        for (std::size_t t = 0; t < w.length; ++t) block(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(t)) += row[t];
      }
    }
    out.set_columns(w.first, from_eigen(block));
  }
  return out;
}

}  // namespace eegc
