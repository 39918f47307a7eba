#include "eegc/codec.hpp"

#include <cmath>
#include <string>

#include "eegc/codec_dictionary.hpp"
#include "eegc/codec_dipole.hpp"
#include "eegc/codec_spiht2d.hpp"
#include "eegc/error.hpp"

namespace eegc {

void CodecConfig::validate() const {
  if (precision_bits < 2 || precision_bits > 24) throw ConfigError("precision must lie in [2, 24] bits");
  if (levels_2d < 1 || levels_2d > 16) throw ConfigError("2D levels must lie in [1, 16]");
  if (window_samples < 1) throw ConfigError("window must be positive");
  if (levels_1d < 1 || levels_1d > 16) throw ConfigError("1D levels must lie in [1, 16]");
  if (epoch < (std::size_t{1} << levels_1d)) {
    throw ConfigError("epoch of " + std::to_string(epoch) + " samples is too short for " +
                      std::to_string(levels_1d) + " levels");
  }
  if (epoch > 0xFFFFFFFFu) throw ConfigError("epoch too long");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be a finite non-negative number");
  if (capacity < 1 || capacity > 0xFFFF) throw ConfigError("capacity must lie in [1, 65535]");
  if (flag_history < 1) throw ConfigError("flag history must be positive");
  if (!(flag_k > 0.0) || !std::isfinite(flag_k)) throw ConfigError("flag factor must be positive");
  if (dipole_window < 8 || dipole_window > 65000) throw ConfigError("dipole window must lie in [8, 65000]");
  if (!(smooth_threshold >= 0.0 && smooth_threshold <= 1.0)) throw ConfigError("smoothness threshold must lie in [0, 1]");
}

void check_target_bps(double bps) {
  if (!(bps > 0.0 && bps <= 16.0)) throw ConfigError("target bit rate must lie in (0, 16] bits per sample");
}

std::unique_ptr<Codec> make_codec(CodecId id, const CodecConfig& config) {
  switch (id) {
    case CodecId::Spiht2D: return std::make_unique<Spiht2DCodec>(config);
    case CodecId::Dictionary: return std::make_unique<DictionaryCodec>(config);
    case CodecId::Dipole: return std::make_unique<DipoleCodec>(config);
  }
  throw ConfigError("unknown codec");
}

SignalMatrix decompress(const CompressedRecord& rec) { return make_codec(rec.codec)->decompress(rec); }

}  // namespace eegc
