#include "eegc/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "eegc/error.hpp"

namespace eegc {
namespace {

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\0')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\0')) --e;
  return std::string(s.substr(b, e - b));
}

// Fixed-width ASCII field of an EDF header.
class FieldCursor {
 public:
  FieldCursor(const std::vector<char>& bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::string text(std::size_t width) {
    if (pos_ + width > bytes_.size()) throw FormatError("EDF header truncated");
    std::string out = trim(std::string_view(bytes_.data() + pos_, width));
    pos_ += width;
    return out;
  }

  long integer(std::size_t width, const char* what) {
    std::string t = text(width);
    long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
      throw FormatError(std::string("EDF field '") + what + "' is not an integer: '" + t + "'");
    }
    return v;
  }

  double real(std::size_t width, const char* what) {
    std::string t = text(width);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
      throw FormatError(std::string("EDF field '") + what + "' is not a number: '" + t + "'");
    }
    return v;
  }

 private:
  const std::vector<char>& bytes_;
  std::size_t pos_;
};

double unit_to_microvolts(const std::string& dim) {
  std::string d;
  for (char c : dim) d.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (d == "mv") return 1e3;
  if (d == "v") return 1e6;
  if (d == "nv") return 1e-3;
  return 1.0;  // uV, µV and unlabeled channels
}

std::string pad_field(std::string s, std::size_t width) {
  if (s.size() > width) s.resize(width);
  s.append(width - s.size(), ' ');
  return s;
}

// Shortest %g rendering that fits an 8-character EDF numeric field.
std::string fit_number(double v) {
  char buf[64];
  for (int prec = 8; prec >= 1; --prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strlen(buf) <= 8) return buf;
  }
  throw FormatError("value does not fit an EDF numeric field");
}

// Field text whose parsed value lies on the requested side of `v`.
std::string fit_bound(double v, bool lower) {
  double probe = v;
  for (int i = 0; i < 64; ++i) {
    std::string s = fit_number(probe);
    double parsed = std::strtod(s.c_str(), nullptr);
    if (lower ? parsed <= v : parsed >= v) return s;
    double step = std::max(std::abs(probe) * 1e-6, 1e-6) * (1 << std::min(i, 20));
    probe = lower ? probe - step : probe + step;
  }
  throw FormatError("cannot encode EDF physical bound");
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::vector<char>& b, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[pos + i])) << (8 * i);
  return v;
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("ch" + std::to_string(i));
  return labels;
}

}  // namespace

Recording read_edf(const std::filesystem::path& path) {
  const std::vector<char> bytes = read_file(path);
  if (bytes.size() < 256) throw FormatError("EDF header truncated");

  FieldCursor head(bytes, 0);
  const std::string version = head.text(8);
  if (version != "0") throw FormatError("unsupported EDF version '" + version + "'");
  const std::string patient = head.text(80);
  head.text(80);  // recording id
  head.text(8);   // start date
  head.text(8);   // start time
  const long header_bytes = head.integer(8, "header bytes");
  head.text(44);  // reserved
  long n_records = head.integer(8, "number of data records");
  const double record_duration = head.real(8, "record duration");
  const long ns = head.integer(4, "number of signals");
  if (ns <= 0) throw FormatError("EDF declares no signals");
  if (header_bytes != 256 + 256 * ns) throw FormatError("EDF header size inconsistent with signal count");
  if (bytes.size() < static_cast<std::size_t>(header_bytes)) throw FormatError("EDF signal headers truncated");
  if (!(record_duration > 0.0)) throw FormatError("EDF record duration must be positive");

  const std::size_t n = static_cast<std::size_t>(ns);
  FieldCursor sig(bytes, 256);
  std::vector<std::string> labels(n), dims(n);
  std::vector<double> pmin(n), pmax(n), dmin(n), dmax(n);
  std::vector<long> spr(n);
  for (auto& l : labels) l = sig.text(16);
  for (std::size_t i = 0; i < n; ++i) sig.text(80);  // transducer
  for (auto& d : dims) d = sig.text(8);
  for (auto& v : pmin) v = sig.real(8, "physical minimum");
  for (auto& v : pmax) v = sig.real(8, "physical maximum");
  for (auto& v : dmin) v = sig.real(8, "digital minimum");
  for (auto& v : dmax) v = sig.real(8, "digital maximum");
  for (std::size_t i = 0; i < n; ++i) sig.text(80);  // prefiltering
  for (auto& v : spr) {
    v = sig.integer(8, "samples per record");
    if (v <= 0) throw FormatError("EDF samples per record must be positive");
  }

  std::size_t record_samples = 0;
  for (long v : spr) record_samples += static_cast<std::size_t>(v);
  const std::size_t record_bytes = 2 * record_samples;
  const std::size_t data_bytes = bytes.size() - static_cast<std::size_t>(header_bytes);
  if (n_records < 0) {
    if (data_bytes % record_bytes != 0) throw StructureError("EDF data is not a whole number of records");
    n_records = static_cast<long>(data_bytes / record_bytes);
  }
  if (data_bytes < static_cast<std::size_t>(n_records) * record_bytes) {
    throw StructureError("EDF data record truncated");
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != "EDF Annotations") keep.push_back(i);
  }
  if (keep.empty()) throw FormatError("EDF holds no signal channels");
  const long spr0 = spr[keep.front()];
  for (std::size_t i : keep) {
    if (spr[i] != spr0) throw StructureError("EDF channels have different sample counts per record");
  }
  const double fs_real = static_cast<double>(spr0) / record_duration;
  const auto fs = static_cast<std::uint32_t>(std::llround(fs_real));
  if (fs == 0 || std::abs(fs_real - fs) > 1e-6) throw FormatError("EDF sampling rate is not integral");

  const std::size_t n_samples = static_cast<std::size_t>(n_records) * static_cast<std::size_t>(spr0);
  if (n_samples == 0) throw StructureError("EDF holds no data records");
  std::vector<double> data(keep.size() * n_samples);

  std::vector<double> gain(n), offset(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (dmax[i] == dmin[i]) throw FormatError("EDF digital range is empty");
    const double unit = unit_to_microvolts(dims[i]);
    gain[i] = (pmax[i] - pmin[i]) / (dmax[i] - dmin[i]) * unit;
    offset[i] = (pmin[i] - dmin[i] * (pmax[i] - pmin[i]) / (dmax[i] - dmin[i])) * unit;
  }

  std::size_t pos = static_cast<std::size_t>(header_bytes);
  for (long r = 0; r < n_records; ++r) {
    std::size_t out_ch = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool kept = out_ch < keep.size() && keep[out_ch] == i;
      for (long s = 0; s < spr[i]; ++s) {
        if (kept) {
          const auto lo = static_cast<unsigned char>(bytes[pos]);
          const auto hi = static_cast<unsigned char>(bytes[pos + 1]);
          const auto digital = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
          data[out_ch * n_samples + static_cast<std::size_t>(r * spr0 + s)] = digital * gain[i] + offset[i];
        }
        pos += 2;
      }
      if (kept) ++out_ch;
    }
  }

  Recording rec;
  rec.patient_id = patient;
  for (std::size_t i : keep) rec.channels.push_back(labels[i]);
  rec.fs = fs;
  rec.precision_bits = 16;
  rec.samples = SignalMatrix(keep.size(), n_samples, std::move(data));
  bool shared = true;
  for (std::size_t i : keep) {
    shared = shared && gain[i] == gain[keep.front()] && offset[i] == 0.0;
  }
  rec.resolution_uv = shared ? gain[keep.front()] : 0.0;
  return rec;
}

void write_edf(const std::filesystem::path& path, const Recording& rec) {
  const SignalMatrix& m = rec.samples;
  if (m.empty() || rec.fs == 0) throw StructureError("cannot write an empty recording");
  const std::size_t n = m.n_channels();
  const std::size_t total = m.n_samples();
  std::size_t spr = rec.fs;
  std::size_t n_records = total / spr;
  std::string duration = "1";
  if (total % spr != 0) {
    spr = total;
    n_records = 1;
    duration = fit_number(static_cast<double>(total) / rec.fs);
  }

  std::vector<std::string> pmin_s(n), pmax_s(n);
  std::vector<double> pmin(n), pmax(n);
  for (std::size_t ch = 0; ch < n; ++ch) {
    auto row = m.row(ch);
    double lo = *std::min_element(row.begin(), row.end());
    double hi = *std::max_element(row.begin(), row.end());
    if (hi - lo < 1e-6) {
      lo -= 1.0;
      hi += 1.0;
    }
    pmin_s[ch] = fit_bound(lo, true);
    pmax_s[ch] = fit_bound(hi, false);
    pmin[ch] = std::strtod(pmin_s[ch].c_str(), nullptr);
    pmax[ch] = std::strtod(pmax_s[ch].c_str(), nullptr);
  }

  std::string out;
  const std::size_t header_bytes = 256 + 256 * n;
  out += pad_field("0", 8);
  out += pad_field(rec.patient_id.empty() ? "X" : rec.patient_id, 80);
  out += pad_field("Startdate X X X X", 80);
  out += pad_field("01.01.01", 8);
  out += pad_field("00.00.00", 8);
  out += pad_field(std::to_string(header_bytes), 8);
  out += pad_field("", 44);
  out += pad_field(std::to_string(n_records), 8);
  out += pad_field(duration, 8);
  out += pad_field(std::to_string(n), 4);
  const auto labels = rec.channels.size() == n ? rec.channels : default_labels(n);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field(labels[ch], 16);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field("", 80);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field("uV", 8);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field(pmin_s[ch], 8);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field(pmax_s[ch], 8);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field("-32768", 8);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field("32767", 8);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field("", 80);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field(std::to_string(spr), 8);
  for (std::size_t ch = 0; ch < n; ++ch) out += pad_field("", 32);

  for (std::size_t r = 0; r < n_records; ++r) {
    for (std::size_t ch = 0; ch < n; ++ch) {
      const double scale = (pmax[ch] - pmin[ch]) / 65535.0;
      for (std::size_t s = 0; s < spr; ++s) {
        const double v = m(ch, r * spr + s);
        const double d = std::round((v - pmin[ch]) / scale) - 32768.0;
        const auto digital = static_cast<std::int16_t>(std::clamp(d, -32768.0, 32767.0));
        const auto u = static_cast<std::uint16_t>(digital);
        out.push_back(static_cast<char>(u & 0xFF));
        out.push_back(static_cast<char>(u >> 8));
      }
    }
  }
  write_file(path, out);
}

Recording read_raw(const std::filesystem::path& path) {
  const std::vector<char> bytes = read_file(path);
  constexpr std::size_t kHeader = 24;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), "NCR1", 4) != 0) {
    throw FormatError("not a raw-matrix file (bad magic or header)");
  }
  const std::uint32_t n_channels = get_u32(bytes, 4);
  const std::uint32_t n_samples = get_u32(bytes, 8);
  const std::uint32_t fs = get_u32(bytes, 12);
  double gain = 0.0;
  std::memcpy(&gain, bytes.data() + 16, sizeof gain);
  if (n_channels == 0 || n_samples == 0 || fs == 0 || !std::isfinite(gain) || gain <= 0.0) {
    throw FormatError("raw-matrix header has invalid fields");
  }
  const std::size_t count = static_cast<std::size_t>(n_channels) * n_samples;
  if (bytes.size() != kHeader + 2 * count) {
    throw StructureError("raw-matrix sample block has the wrong length");
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto lo = static_cast<unsigned char>(bytes[kHeader + 2 * i]);
    const auto hi = static_cast<unsigned char>(bytes[kHeader + 2 * i + 1]);
    data[i] = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8))) * gain;
  }
  Recording rec;
  rec.patient_id = path.stem().string();
  rec.channels = default_labels(n_channels);
  rec.fs = fs;
  rec.precision_bits = 16;
  rec.resolution_uv = gain;
  rec.samples = SignalMatrix(n_channels, n_samples, std::move(data));
  return rec;
}

void write_raw(const std::filesystem::path& path, const Recording& rec) {
  const SignalMatrix& m = rec.samples;
  if (m.empty() || rec.fs == 0) throw StructureError("cannot write an empty recording");
  double gain = rec.resolution_uv;
  bool on_grid = gain > 0.0;
  for (std::size_t i = 0; on_grid && i < m.size(); ++i) {
    const double q = m.data()[i] / gain;
    on_grid = q == std::round(q) && std::abs(q) <= 32767.0 && std::round(q) * gain == m.data()[i];
  }
  if (!on_grid) {
    double peak = 0.0;
    for (double v : m.data()) peak = std::max(peak, std::abs(v));
    gain = peak > 0.0 ? peak / 32767.0 : 1.0;
  }
  std::string out = "NCR1";
  put_u32(out, static_cast<std::uint32_t>(m.n_channels()));
  put_u32(out, static_cast<std::uint32_t>(m.n_samples()));
  put_u32(out, rec.fs);
  char gbuf[8];
  std::memcpy(gbuf, &gain, sizeof gain);
  out.append(gbuf, 8);
  out.reserve(out.size() + 2 * m.size());
  for (double v : m.data()) {
    const auto s = static_cast<std::int16_t>(std::clamp(std::round(v / gain), -32768.0, 32767.0));
    const auto u = static_cast<std::uint16_t>(s);
    out.push_back(static_cast<char>(u & 0xFF));
    out.push_back(static_cast<char>(u >> 8));
  }
  write_file(path, out);
}

Recording read_recording(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, "NCR1", 4) == 0) return read_raw(path);
  return read_edf(path);
}

namespace {

std::pair<std::size_t, std::size_t> window_bounds(const Recording& rec, double start_s, double dur_s) {
  const std::size_t total = rec.samples.n_samples();
  if (!(start_s >= 0.0) || !(dur_s > 0.0)) throw RangeError("slice window must start at or after 0 with positive duration");
  const auto first = static_cast<std::size_t>(std::floor(start_s * rec.fs));
  const auto count = static_cast<std::size_t>(std::llround(dur_s * rec.fs));
  if (count == 0 || first >= total || count > total - first) {
    throw RangeError("slice window extends past the end of the recording");
  }
  return {first, count};
}

}  // namespace

SignalMatrix slice(const Recording& rec, double start_s, double dur_s) {
  auto [first, count] = window_bounds(rec, start_s, dur_s);
  return rec.samples.columns(first, count);
}

Recording slice_recording(const Recording& rec, double start_s, double dur_s) {
  Recording out = rec;
  out.samples = slice(rec, start_s, dur_s);
  return out;
}

std::vector<FlagSection> parse_flags(std::string_view text) {
  std::vector<FlagSection> out;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tok{std::istream_iterator<std::string>(fields), {}};
    if (tok.empty() || tok.front().front() == '#') continue;
    if (tok.size() != 3) {
      throw FormatError("flag line " + std::to_string(line_no) + " needs `start_s end_s label`");
    }
    auto number = [&](const std::string& s) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw FormatError("flag line " + std::to_string(line_no) + ": '" + s + "' is not a number");
      }
      return v;
    };
    FlagSection f{number(tok[0]), number(tok[1]), tok[2]};
    if (f.start_s < 0.0 || f.end_s <= f.start_s) {
      throw FormatError("flag line " + std::to_string(line_no) + ": section must satisfy 0 <= start < end");
    }
    out.push_back(std::move(f));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FlagSection& a, const FlagSection& b) { return a.start_s < b.start_s; });
  return out;
}

std::string format_flags(const std::vector<FlagSection>& flags) {
  std::string out;
  char buf[64];
  for (const auto& f : flags) {
    auto r = std::to_chars(buf, buf + sizeof buf, f.start_s);
    out.append(buf, r.ptr);
    out.push_back(' ');
    r = std::to_chars(buf, buf + sizeof buf, f.end_s);
    out.append(buf, r.ptr);
    out.push_back(' ');
    out += f.label.empty() ? "flag" : f.label;
    out.push_back('\n');
  }
  return out;
}

std::vector<FlagSection> read_flags(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_flags(std::string_view(bytes.data(), bytes.size()));
}

void write_flags(const std::filesystem::path& path, const std::vector<FlagSection>& flags) {
  write_file(path, format_flags(flags));
}

}  // namespace eegc
