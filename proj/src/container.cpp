#include "eegc/container.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "eegc/error.hpp"

namespace eegc {

std::vector<std::uint8_t> serialize(const CompressedRecord& rec) {
  ByteWriter w;
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("NCC1"), 4));
  w.u8(static_cast<std::uint8_t>(rec.codec));
  w.u8(rec.version);
  w.u32(rec.n_channels);
  w.u32(rec.n_samples);
  w.u32(rec.fs);
  w.u16(rec.levels);
  w.f64(rec.target_bps);
  w.f64(rec.quant_scale);
  w.u32(static_cast<std::uint32_t>(rec.side_info.size()));
  w.bytes(rec.side_info);
  w.u64(rec.payload.size());
  w.bytes(rec.payload.bytes());
  return w.take();
}

CompressedRecord parse_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "NCC1", 4) != 0) {
    throw FormatError("not a compressed record (bad magic)");
  }
  ByteReader r(bytes.subspan(4));
  CompressedRecord rec;
  const std::uint8_t codec = r.u8();
  if (codec < 1 || codec > 3) throw FormatError("unknown codec id " + std::to_string(codec));
  rec.codec = static_cast<CodecId>(codec);
  rec.version = r.u8();
  if (rec.version != kContainerVersion) throw FormatError("unsupported container version " + std::to_string(rec.version));
  rec.n_channels = r.u32();
  rec.n_samples = r.u32();
  rec.fs = r.u32();
  rec.levels = r.u16();
  rec.target_bps = r.f64();
  rec.quant_scale = r.f64();
  if (rec.n_channels == 0 || rec.n_samples == 0 || rec.fs == 0) {
    throw FormatError("container header has empty dimensions");
  }
  const std::uint32_t side_len = r.u32();
  auto side = r.bytes(side_len);
  rec.side_info.assign(side.begin(), side.end());
  const std::uint64_t bit_len = r.u64();
  const std::uint64_t need = (bit_len + 7) / 8;
  const std::uint64_t have = r.remaining();
  if (have > need) throw FormatError("trailing bytes after payload");
  auto payload = r.bytes(static_cast<std::size_t>(have));
  std::vector<std::uint8_t> buf(payload.begin(), payload.end());
  if (have < need) {
    rec.truncated = true;
    rec.payload = Bitstream::from_bytes(std::move(buf), 8 * have);
  } else {
    rec.payload = Bitstream::from_bytes(std::move(buf), bit_len);
  }
  return rec;
}

void write_container(const std::filesystem::path& path, const CompressedRecord& rec) {
  const auto bytes = serialize(rec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

CompressedRecord read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_container(bytes);
}

const char* codec_name(CodecId id) {
  switch (id) {
    case CodecId::Spiht2D: return "spiht2d";
    case CodecId::Dictionary: return "dictionary";
    case CodecId::Dipole: return "dipole";
  }
  return "unknown";
}

CodecId codec_from_name(const std::string& name) {
  if (name == "spiht2d") return CodecId::Spiht2D;
  if (name == "dictionary") return CodecId::Dictionary;
  if (name == "dipole") return CodecId::Dipole;
  throw ConfigError("unknown codec '" + name + "' (expected spiht2d, dictionary or dipole)");
}

}  // namespace eegc
