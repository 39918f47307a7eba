#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eegc/bitstream.hpp"
#include "eegc/codec.hpp"
#include "eegc/signal.hpp"
#include "eegc/wavelet.hpp"

namespace eegc {

// Rhythm-band energies of a segment divided by their total; nullopt for a
// zero-energy segment (the reserved null feature).
std::optional<BandEnergyVector> segment_features(std::span<const double> segment, double fs, int levels = 5);
std::optional<BandEnergyVector> pyramid_features(const WaveletPyramid1D& pyr, double fs);

double feature_distance(const BandEnergyVector& a, const BandEnergyVector& b);

// Energy in the theta, alpha and beta rhythm bands (the 3-30 Hz activity
// used by the seizure-like flag).
double activity_energy(const WaveletPyramid1D& pyr, double fs);

struct ReferenceEntry {
  std::uint32_t id = 0;
  WaveletPyramid1D pyramid;  // decoded (dequantized) coefficients
  BandEnergyVector features;  // unit sum
  std::uint64_t use_count = 0;
  std::uint64_t last_used = 0;
};

struct ReferenceSnapshot {
  std::uint32_t id;
  std::uint64_t use_count;
  std::uint64_t last_used;
  friend bool operator==(const ReferenceSnapshot&, const ReferenceSnapshot&) = default;
};

// Per-channel dictionary with least-recently-used eviction.
class ReferenceList {
 public:
  explicit ReferenceList(std::size_t capacity);

  const std::vector<ReferenceEntry>& entries() const { return entries_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const ReferenceEntry* find(std::uint32_t id) const;
  // Appends a new entry, evicting the least recently used one (lowest id on
  // ties) when full. Returns the new id.
  std::uint32_t insert(WaveletPyramid1D pyramid, const BandEnergyVector& features, std::uint64_t counter);
  void touch(std::uint32_t id, std::uint64_t counter);

  std::vector<ReferenceSnapshot> snapshot() const;

 private:
  std::size_t capacity_;
  std::uint32_t next_id_ = 0;
  std::vector<ReferenceEntry> entries_;
};

struct MatchResult {
  const ReferenceEntry* entry = nullptr;
  double distance = 0.0;
};

// Nearest entry by Euclidean feature distance if within tau (ties go to the
// lower id); nullopt otherwise.
std::optional<MatchResult> match(const BandEnergyVector& features, const ReferenceList& list, double tau);

// Trailing-median burst rule: true iff at least `window` prior energies are
// available, current >= k * median(last `window` energies), current > 0 and
// the segment found no reference.
bool flag_seizure_like(std::span<const double> history, double current, bool matched, std::size_t window, double k);

enum class SegmentMode : std::uint8_t { Literal = 0, Reference = 1 };

struct DictionaryParams {
  double fs = 256.0;
  int levels = 5;
  int precision_bits = 16;
  double tau = 0.15;
};

struct SegmentCoding {
  SegmentMode mode = SegmentMode::Literal;
  std::uint32_t ref_id = 0;
  double scale = 0.0;
  Bitstream bits;
  WaveletPyramid1D decoded;
  bool matched = false;  // a reference was used
  double activity = 0.0;  // activity_energy of the input segment
};

// Codes one epoch. A feature match whose wavelet-domain residual carries at
// least as much energy as the segment itself is rejected, so the segment is
// coded literally. Literal segments with nonzero decoded energy enter the
// list; the decoded (not the original) pyramid is stored so the decoder can
// mirror the list exactly.
SegmentCoding encode_segment(std::span<const double> segment, ReferenceList& list, std::uint64_t counter,
                             std::uint64_t budget_bits, const DictionaryParams& params);

WaveletPyramid1D decode_segment(SegmentMode mode, std::uint32_t ref_id, double scale, const Bitstream& bits,
                                std::size_t epoch, ReferenceList& list, std::uint64_t counter,
                                const DictionaryParams& params);

// List states after every segment, per channel, for synchrony checks.
struct DictionaryTrace {
  std::vector<std::vector<std::vector<ReferenceSnapshot>>> lists;
};

// Method 2: per-channel epochs coded against a dynamic reference list with
// 1D SPIHT; seizure-like flags travel in the side info.
class DictionaryCodec final : public Codec {
 public:
  explicit DictionaryCodec(CodecConfig config = {});
  CodecId id() const override { return CodecId::Dictionary; }
  CompressedRecord compress(const SignalMatrix& m, std::uint32_t fs, double target_bps) const override;
  SignalMatrix decompress(const CompressedRecord& rec) const override;

  CompressedRecord compress(const SignalMatrix& m, std::uint32_t fs, double target_bps, DictionaryTrace* trace) const;
  SignalMatrix decompress(const CompressedRecord& rec, DictionaryTrace* trace) const;

 private:
  CodecConfig config_;
};

struct DictionarySideInfo {
  std::size_t epoch = 0;
  std::size_t capacity = 0;
  int levels = 0;
  int precision_bits = 0;
  struct SegmentRecord {
    SegmentMode mode;
    std::uint32_t ref_id;
    double scale;
    std::uint64_t bits;
  };
  std::vector<std::vector<SegmentRecord>> segments;  // per channel
  std::vector<FlagSection> flags;
};

DictionarySideInfo parse_dictionary_side_info(const CompressedRecord& rec);

}  // namespace eegc
