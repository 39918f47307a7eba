#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "eegc/container.hpp"
#include "eegc/signal.hpp"

namespace eegc {

// Encoder settings shared by the three codecs. Everything a decoder needs is
// written into the container, so decompression never reads this struct.
struct CodecConfig {
  int precision_bits = 16;

  // 2D SPIHT codec
  int levels_2d = 4;
  std::size_t window_samples = 65536;

  // dictionary codec
  std::size_t epoch = 1024;
  int levels_1d = 5;
  double tau = 0.15;
  std::size_t capacity = 64;
  std::size_t flag_history = 30;
  double flag_k = 5.0;

  // dipole codec
  std::size_t dipole_window = 512;
  double smooth_threshold = 0.7;
  // Channel labels for the head model; empty selects the standard
  // 23-channel bipolar montage.
  std::vector<std::string> channel_labels;

  // Throws ConfigError for out-of-range values.
  void validate() const;
};

// Throws ConfigError unless 0 < bps <= 16.
void check_target_bps(double bps);

class Codec {
 public:
  virtual ~Codec() = default;
  virtual CodecId id() const = 0;
  // Payload bits never exceed floor(target_bps * channels * samples).
  virtual CompressedRecord compress(const SignalMatrix& m, std::uint32_t fs, double target_bps) const = 0;
  virtual SignalMatrix decompress(const CompressedRecord& rec) const = 0;
};

std::unique_ptr<Codec> make_codec(CodecId id, const CodecConfig& config = {});

// Decodes any container with the codec named in its header.
SignalMatrix decompress(const CompressedRecord& rec);

}  // namespace eegc
