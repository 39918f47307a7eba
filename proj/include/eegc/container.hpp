#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eegc/bitstream.hpp"

namespace eegc {

enum class CodecId : std::uint8_t { Spiht2D = 1, Dictionary = 2, Dipole = 3 };

inline constexpr std::uint8_t kContainerVersion = 1;

// Byte layout (little endian):
//   "NCC1" | u8 codec_id | u8 version | u32 n_channels | u32 n_samples |
//   u32 fs | u16 levels | f64 target_bps | f64 quant_scale |
//   u32 side_info_len | side info | u64 payload_bit_len | payload bytes
struct CompressedRecord {
  CodecId codec = CodecId::Spiht2D;
  std::uint8_t version = kContainerVersion;
  std::uint32_t n_channels = 0;
  std::uint32_t n_samples = 0;
  std::uint32_t fs = 0;
  std::uint16_t levels = 0;
  double target_bps = 0.0;
  double quant_scale = 0.0;
  std::vector<std::uint8_t> side_info;
  Bitstream payload;
  // Set by parse_container when the payload was cut short; the payload then
  // holds only the bits that were present.
  bool truncated = false;

  std::uint64_t side_info_bits() const { return 8 * static_cast<std::uint64_t>(side_info.size()); }
  std::uint64_t total_samples() const { return static_cast<std::uint64_t>(n_channels) * n_samples; }
};

std::vector<std::uint8_t> serialize(const CompressedRecord& rec);
// Throws FormatError on a bad magic, unknown codec, unsupported version or a
// header/side info that runs past the end. A short payload is accepted and
// flagged as truncated.
CompressedRecord parse_container(std::span<const std::uint8_t> bytes);

void write_container(const std::filesystem::path& path, const CompressedRecord& rec);
CompressedRecord read_container(const std::filesystem::path& path);

const char* codec_name(CodecId id);
CodecId codec_from_name(const std::string& name);

}  // namespace eegc
