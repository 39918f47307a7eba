#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "eegc/signal.hpp"

namespace eegc {

// Settings of the proxy onset detector.
struct DetectorParams {
  double epoch_s = 2.0;
  double k = 5.0;               // onset when statistic > k * trailing median
  double baseline_s = 120.0;    // trailing median span, also the warm-up
  int onset_epochs = 3;
  double end_factor = 2.0;      // section ends below end_factor * median
  int end_epochs = 5;
  double merge_gap_s = 30.0;
  int levels = 5;
};

// Per-epoch statistic: mean over channels of the theta + alpha + beta
// wavelet energy.
std::vector<double> epoch_activity(const Recording& rec, const DetectorParams& params = {});

// Deterministic burst detector. An onset needs `onset_epochs` consecutive
// epochs above k times the median of the preceding baseline; that median is
// held for the section, which closes after `end_epochs` consecutive epochs
// below end_factor times it. Sections closer than merge_gap_s merge.
// Recordings shorter than the baseline give no sections.
std::vector<FlagSection> detect(const Recording& rec, const DetectorParams& params = {});

struct DetectionReport {
  std::size_t ground_truth_count = 0;
  std::size_t tp_count = 0;
  std::size_t fp_count = 0;
  // nullopt when the original run flagged nothing.
  std::optional<double> tp_percent;
};

inline constexpr double kMinOverlapS = 60.0;

// Each compressed section, in time order, is a true positive when its
// overlap summed over the original sections not yet credited reaches 60 s;
// those originals are then credited. Everything else is a false positive.
DetectionReport match_flags(const std::vector<FlagSection>& original, const std::vector<FlagSection>& compressed,
                            double min_overlap_s = kMinOverlapS);

struct AggregateRow {
  std::optional<double> mean_tp_percent;  // over reports with a defined tp_percent
  double mean_fp = 0.0;
  std::size_t count = 0;
};

// Unweighted means across reports. Throws MetricError for an empty list.
AggregateRow aggregate(const std::vector<DetectionReport>& reports);

struct NamedReport {
  std::string name;
  DetectionReport report;
};

// CSV with columns patient,detections,tp_percent,fp_count and a closing
// Average row.
void write_report_csv(std::ostream& out, const std::vector<NamedReport>& rows);

}  // namespace eegc
