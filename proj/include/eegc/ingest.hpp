#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eegc/signal.hpp"

namespace eegc {

// EDF reader. Data records are converted to microvolts using each signal's
// physical/digital calibration; "EDF Annotations" signals are skipped.
Recording read_edf(const std::filesystem::path& path);

// Writes a plain EDF (not EDF+) file with one-second data records. Samples
// are quantized per channel onto the signal's digital range.
void write_edf(const std::filesystem::path& path, const Recording& rec);

// Raw-matrix fallback format:
//   "NCR1" | u32 n_channels | u32 n_samples | u32 fs | f64 gain |
//   i16 samples, channel-major, value = sample * gain (little endian).
Recording read_raw(const std::filesystem::path& path);
void write_raw(const std::filesystem::path& path, const Recording& rec);

// Dispatches on the file's leading bytes ("NCR1" selects the raw format).
Recording read_recording(const std::filesystem::path& path);

// Sub-matrix covering [start_s, start_s + dur_s). The start sample is
// floor(start_s * fs) and the length is round(dur_s * fs).
SignalMatrix slice(const Recording& rec, double start_s, double dur_s);
// Same rule applied to a recording, keeping labels and calibration.
Recording slice_recording(const Recording& rec, double start_s, double dur_s);

// Flag files: one whitespace-separated `start_s end_s label` triple per line.
// Blank lines and lines starting with '#' are ignored. Output is sorted by
// start time.
std::vector<FlagSection> parse_flags(std::string_view text);
std::string format_flags(const std::vector<FlagSection>& flags);
std::vector<FlagSection> read_flags(const std::filesystem::path& path);
void write_flags(const std::filesystem::path& path,
                 const std::vector<FlagSection>& flags);

}  // namespace eegc
