#include "eegc/codec_dictionary.hpp"

#include <algorithm>
#include <cmath>

#include "coding.hpp"
#include "eegc/error.hpp"
#include "eegc/ingest.hpp"

namespace eegc {

std::optional<BandEnergyVector> pyramid_features(const WaveletPyramid1D& pyr, double fs) {
  BandEnergyVector e = band_energies(pyr, fs);
  const double total = e.total();
  if (!(total > 0.0)) return std::nullopt;
  for (double& v : e.energy) v /= total;
  return e;
}

std::optional<BandEnergyVector> segment_features(std::span<const double> segment, double fs, int levels) {
  return pyramid_features(dwt1d(segment, levels), fs);
}

double feature_distance(const BandEnergyVector& a, const BandEnergyVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < kRhythmCount; ++i) d += (a.energy[i] - b.energy[i]) * (a.energy[i] - b.energy[i]);
  return std::sqrt(d);
}

double activity_energy(const WaveletPyramid1D& pyr, double fs) {
  const BandEnergyVector e = band_energies(pyr, fs);
  return e[Rhythm::Theta] + e[Rhythm::Alpha] + e[Rhythm::Beta];
}

ReferenceList::ReferenceList(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("reference list capacity must be positive");
}

const ReferenceEntry* ReferenceList::find(std::uint32_t id) const {
  for (const auto& e : entries_)
    if (e.id == id) return &e;
  return nullptr;
}

std::uint32_t ReferenceList::insert(WaveletPyramid1D pyramid, const BandEnergyVector& features,
                                    std::uint64_t counter) {
  if (entries_.size() >= capacity_) {
    auto lru = std::min_element(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return a.last_used != b.last_used ? a.last_used < b.last_used : a.id < b.id;
    });
    entries_.erase(lru);
  }
  const std::uint32_t id = next_id_++;
  entries_.push_back({id, std::move(pyramid), features, 0, counter});
  return id;
}

void ReferenceList::touch(std::uint32_t id, std::uint64_t counter) {
  for (auto& e : entries_) {
    if (e.id == id) {
      ++e.use_count;
      e.last_used = counter;
      return;
    }
  }
  throw FormatError("reference id " + std::to_string(id) + " is not in the list");
}

std::vector<ReferenceSnapshot> ReferenceList::snapshot() const {
  std::vector<ReferenceSnapshot> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({e.id, e.use_count, e.last_used});
  return out;
}

std::optional<MatchResult> match(const BandEnergyVector& features, const ReferenceList& list, double tau) {
  std::optional<MatchResult> best;
  for (const auto& e : list.entries()) {
    const double d = feature_distance(features, e.features);
    if (d > tau) continue;
    if (!best || d < best->distance || (d == best->distance && e.id < best->entry->id)) best = MatchResult{&e, d};
  }
  return best;
}

bool flag_seizure_like(std::span<const double> history, double current, bool matched, std::size_t window,
                       double k) {
  if (matched || window == 0 || history.size() < window || !(current > 0.0)) return false;
  std::vector<double> recent(history.end() - static_cast<std::ptrdiff_t>(window), history.end());
  const std::size_t mid = recent.size() / 2;
  std::nth_element(recent.begin(), recent.begin() + static_cast<std::ptrdiff_t>(mid), recent.end());
  double median = recent[mid];
  if (recent.size() % 2 == 0) {
    const double lower = *std::max_element(recent.begin(), recent.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return current >= k * median;
}

namespace {

std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

double sum_sq(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

}  // namespace

SegmentCoding encode_segment(std::span<const double> segment, ReferenceList& list, std::uint64_t counter,
                             std::uint64_t budget_bits, const DictionaryParams& params) {
  const WaveletPyramid1D pyr = dwt1d(segment, params.levels);
  const PyramidShape shape = PyramidShape::of(pyr);
  const std::vector<double> flat = pyr.flatten();
  SegmentCoding out;
  out.activity = activity_energy(pyr, params.fs);

  std::optional<MatchResult> found;
  std::vector<double> residual;
  if (auto features = pyramid_features(pyr, params.fs)) {
    found = match(*features, list, params.tau);
    if (found) {
      residual = difference(flat, found->entry->pyramid.flatten());
      if (!(sum_sq(residual) < sum_sq(flat))) found.reset();
    }
  }

  if (found) {
    const std::uint32_t id = found->entry->id;
    const std::vector<double> ref = found->entry->pyramid.flatten();
    auto coded = detail::code_block(residual, shape, params.precision_bits, budget_bits);
    std::vector<double> decoded = detail::decode_block(coded.bits, shape, coded.scale);
    for (std::size_t i = 0; i < decoded.size(); ++i) decoded[i] += ref[i];
    list.touch(id, counter);
    out.mode = SegmentMode::Reference;
    out.ref_id = id;
    out.scale = coded.scale;
    out.bits = std::move(coded.bits);
    out.decoded = WaveletPyramid1D::unflatten(decoded, pyr.original_len, pyr.levels);
    out.matched = true;
    return out;
  }

  auto coded = detail::code_block(flat, shape, params.precision_bits, budget_bits);
  out.mode = SegmentMode::Literal;
  out.scale = coded.scale;
  out.decoded = WaveletPyramid1D::unflatten(detail::decode_block(coded.bits, shape, coded.scale),
                                            pyr.original_len, pyr.levels);
  out.bits = std::move(coded.bits);
  if (auto f = pyramid_features(out.decoded, params.fs)) list.insert(out.decoded, *f, counter);
  return out;
}

WaveletPyramid1D decode_segment(SegmentMode mode, std::uint32_t ref_id, double scale, const Bitstream& bits,
                                std::size_t epoch, ReferenceList& list, std::uint64_t counter,
                                const DictionaryParams& params) {
  const PyramidShape shape{Topology::OneD, 1, epoch, params.levels};
  std::vector<double> decoded = detail::decode_block(bits, shape, scale);
  if (mode == SegmentMode::Reference) {
    const ReferenceEntry* ref = list.find(ref_id);
    if (!ref) throw FormatError("segment references unknown dictionary entry " + std::to_string(ref_id));
    const std::vector<double> base = ref->pyramid.flatten();
    for (std::size_t i = 0; i < decoded.size(); ++i) decoded[i] += base[i];
    list.touch(ref_id, counter);
    return WaveletPyramid1D::unflatten(decoded, epoch, params.levels);
  }
  auto pyr = WaveletPyramid1D::unflatten(decoded, epoch, params.levels);
  if (auto f = pyramid_features(pyr, params.fs)) list.insert(pyr, *f, counter);
  return pyr;
}

DictionaryCodec::DictionaryCodec(CodecConfig config) : config_(std::move(config)) { config_.validate(); }

CompressedRecord DictionaryCodec::compress(const SignalMatrix& m, std::uint32_t fs, double target_bps) const {
  return compress(m, fs, target_bps, nullptr);
}

SignalMatrix DictionaryCodec::decompress(const CompressedRecord& rec) const { return decompress(rec, nullptr); }

CompressedRecord DictionaryCodec::compress(const SignalMatrix& m, std::uint32_t fs, double target_bps,
                                           DictionaryTrace* trace) const {
  check_target_bps(target_bps);
  const std::size_t epoch = config_.epoch;
  const auto budget = static_cast<std::uint64_t>(std::floor(target_bps * static_cast<double>(epoch)));
  if (budget < kMinSpihtBudget) {
    throw BudgetError("per-segment budget of " + std::to_string(budget) + " bits is below the SPIHT minimum");
  }
  const DictionaryParams params{static_cast<double>(fs), config_.levels_1d, config_.precision_bits, config_.tau};
  const std::size_t n = m.n_samples();
  const std::size_t n_segments = (n + epoch - 1) / epoch;

  CompressedRecord rec;
  rec.codec = CodecId::Dictionary;
  rec.n_channels = static_cast<std::uint32_t>(m.n_channels());
  rec.n_samples = static_cast<std::uint32_t>(n);
  rec.fs = fs;
  rec.levels = static_cast<std::uint16_t>(config_.levels_1d);
  rec.target_bps = target_bps;

  ByteWriter side;
  side.u32(static_cast<std::uint32_t>(epoch));
  side.u16(static_cast<std::uint16_t>(config_.capacity));
  side.u8(static_cast<std::uint8_t>(config_.levels_1d));
  side.u8(static_cast<std::uint8_t>(config_.precision_bits));
  side.f64(config_.tau);

  if (trace) trace->lists.assign(m.n_channels(), {});
  std::vector<FlagSection> flags;
  std::vector<double> seg(epoch);
  for (std::size_t ch = 0; ch < m.n_channels(); ++ch) {
    ReferenceList list(config_.capacity);
    std::vector<double> history;
    std::optional<FlagSection> open;
    auto row = m.row(ch);
    for (std::size_t s = 0; s < n_segments; ++s) {
      const std::size_t first = s * epoch;
      const std::size_t len = std::min(epoch, n - first);
      std::fill(seg.begin(), seg.end(), 0.0);
      std::copy(row.begin() + static_cast<std::ptrdiff_t>(first),
                row.begin() + static_cast<std::ptrdiff_t>(first + len), seg.begin());

      // A final partial epoch is budgeted by its true length.
      const std::uint64_t seg_budget =
          len == epoch ? budget
                       : std::max(kMinSpihtBudget,
                                  static_cast<std::uint64_t>(std::floor(target_bps * static_cast<double>(len))));
      SegmentCoding coded = encode_segment(seg, list, s, seg_budget, params);
      if (s == 0 && ch == 0) rec.quant_scale = coded.scale;
      const bool flagged =
          flag_seizure_like(history, coded.activity, coded.matched, config_.flag_history, config_.flag_k);
      history.push_back(coded.activity);

      const double t0 = static_cast<double>(first) / fs, t1 = static_cast<double>(first + len) / fs;
      if (flagged) {
        if (open) open->end_s = t1;
        else open = FlagSection{t0, t1, "seizure_like_ch" + std::to_string(ch)};
      } else if (open) {
        flags.push_back(*open);
        open.reset();
      }

      side.u8(static_cast<std::uint8_t>(coded.mode));
      if (coded.mode == SegmentMode::Reference) side.u32(coded.ref_id);
      side.f64(coded.scale);
      side.u32(static_cast<std::uint32_t>(coded.bits.size()));
      rec.payload.append(coded.bits);
      if (trace) trace->lists[ch].push_back(list.snapshot());
    }
    if (open) flags.push_back(*open);
  }
  std::stable_sort(flags.begin(), flags.end(),
                   [](const FlagSection& a, const FlagSection& b) { return a.start_s < b.start_s; });
  side.str(format_flags(flags));
  rec.side_info = side.take();
  return rec;
}

DictionarySideInfo parse_dictionary_side_info(const CompressedRecord& rec) {
  if (rec.codec != CodecId::Dictionary) throw FormatError("container is not a dictionary record");
  ByteReader side(rec.side_info);
  DictionarySideInfo info;
  info.epoch = side.u32();
  info.capacity = side.u16();
  info.levels = side.u8();
  info.precision_bits = side.u8();
  side.f64();  // tau, informational
  if (info.epoch == 0 || info.capacity == 0 || info.levels < 1 || info.epoch < (std::size_t{1} << info.levels)) {
    throw FormatError("dictionary parameters are invalid");
  }
  const std::size_t n_segments = (rec.n_samples + info.epoch - 1) / info.epoch;
  info.segments.resize(rec.n_channels);
  for (auto& channel : info.segments) {
    channel.reserve(n_segments);
    for (std::size_t s = 0; s < n_segments; ++s) {
      DictionarySideInfo::SegmentRecord r{};
      const std::uint8_t mode = side.u8();
      if (mode > 1) throw FormatError("unknown segment mode " + std::to_string(mode));
      r.mode = static_cast<SegmentMode>(mode);
      r.ref_id = r.mode == SegmentMode::Reference ? side.u32() : 0;
      r.scale = side.f64();
      r.bits = side.u32();
      channel.push_back(r);
    }
  }
  info.flags = parse_flags(side.str());
  if (!side.done()) throw FormatError("trailing bytes in dictionary side info");
  return info;
}

SignalMatrix DictionaryCodec::decompress(const CompressedRecord& rec, DictionaryTrace* trace) const {
  const DictionarySideInfo info = parse_dictionary_side_info(rec);
  const DictionaryParams params{static_cast<double>(rec.fs), info.levels, info.precision_bits, 0.0};
  const std::size_t n = rec.n_samples;
  SignalMatrix out(rec.n_channels, n);
  detail::PayloadCursor cursor(rec.payload);
  if (trace) trace->lists.assign(rec.n_channels, {});
  for (std::size_t ch = 0; ch < rec.n_channels; ++ch) {
    ReferenceList list(info.capacity);
    auto row = out.row(ch);
    for (std::size_t s = 0; s < info.segments[ch].size(); ++s) {
      const auto& r = info.segments[ch][s];
      const WaveletPyramid1D pyr =
          decode_segment(r.mode, r.ref_id, r.scale, cursor.next(r.bits), info.epoch, list, s, params);
      const std::vector<double> samples = idwt1d(pyr);
      const std::size_t first = s * info.epoch;
      const std::size_t len = std::min(info.epoch, n - first);
      std::copy(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(len),
                row.begin() + static_cast<std::ptrdiff_t>(first));
      if (trace) trace->lists[ch].push_back(list.snapshot());
    }
  }
  return out;
}

}  // namespace eegc
