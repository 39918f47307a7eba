#include "eegc/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "eegc/error.hpp"
#include "eegc/wavelet.hpp"

namespace eegc {
namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<double> epoch_activity(const Recording& rec, const DetectorParams& params) {
  if (rec.fs == 0) throw DomainError("sampling rate must be positive");
  const auto epoch = static_cast<std::size_t>(std::llround(params.epoch_s * rec.fs));
  if (epoch == 0) throw DomainError("detector epoch is shorter than one sample");
  const SignalMatrix& m = rec.samples;
  const std::size_t n_epochs = m.n_samples() / epoch;
  const int levels = max_levels_for(epoch, params.levels);
  std::vector<double> stat(n_epochs, 0.0);
  for (std::size_t e = 0; e < n_epochs; ++e) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.n_channels(); ++c) {
      const auto seg = m.row(c).subspan(e * epoch, epoch);
      const BandEnergyVector b = band_energies(dwt1d(seg, levels), rec.fs);
      sum += b[Rhythm::Theta] + b[Rhythm::Alpha] + b[Rhythm::Beta];
    }
    stat[e] = sum / static_cast<double>(m.n_channels());
  }
  return stat;
}

std::vector<FlagSection> detect(const Recording& rec, const DetectorParams& params) {
  if (rec.fs == 0) throw DomainError("sampling rate must be positive");
  if (rec.duration_s() < params.baseline_s) return {};
  const std::vector<double> stat = epoch_activity(rec, params);
  const auto baseline = static_cast<std::size_t>(std::llround(params.baseline_s / params.epoch_s));
  const auto onset_n = static_cast<std::size_t>(params.onset_epochs);
  const auto end_n = static_cast<std::size_t>(params.end_epochs);

  auto trailing_median = [&](std::size_t e) {
    return median(std::vector<double>(stat.begin() + static_cast<std::ptrdiff_t>(e - baseline),
                                      stat.begin() + static_cast<std::ptrdiff_t>(e)));
  };
  auto above = [&](std::size_t e) { return stat[e] > params.k * trailing_median(e); };

  std::vector<FlagSection> raw;
  std::size_t e = baseline;
  while (e + onset_n <= stat.size()) {
    bool onset = true;
    for (std::size_t j = 0; j < onset_n && onset; ++j) onset = above(e + j);
    if (!onset) {
      ++e;
      continue;
    }
    const double held = trailing_median(e);
    const std::size_t start = e;
    std::size_t end = stat.size();
    std::size_t quiet = 0;
    for (std::size_t j = e + onset_n; j < stat.size(); ++j) {
      quiet = stat[j] < params.end_factor * held ? quiet + 1 : 0;
      if (quiet == end_n) {
        end = j + 1 - end_n;
        break;
      }
    }
    raw.push_back({start * params.epoch_s, end * params.epoch_s, "seizure"});
    e = end == stat.size() ? end : end + end_n;
  }

  std::vector<FlagSection> merged;
  for (const auto& s : raw) {
    if (!merged.empty() && s.start_s - merged.back().end_s < params.merge_gap_s) {
      merged.back().end_s = std::max(merged.back().end_s, s.end_s);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

DetectionReport match_flags(const std::vector<FlagSection>& original, const std::vector<FlagSection>& compressed,
                            double min_overlap_s) {
  DetectionReport r;
  r.ground_truth_count = original.size();
  std::vector<bool> credited(original.size(), false);
  for (const auto& c : compressed) {
    double overlap = 0.0;
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < original.size(); ++i) {
      if (credited[i]) continue;
      const double o = std::min(c.end_s, original[i].end_s) - std::max(c.start_s, original[i].start_s);
      if (o > 0.0) {
        overlap += o;
        hits.push_back(i);
      }
    }
    if (overlap >= min_overlap_s - 1e-9) {
      ++r.tp_count;
      for (auto i : hits) credited[i] = true;
    } else {
      ++r.fp_count;
    }
  }
  if (!original.empty()) r.tp_percent = 100.0 * static_cast<double>(r.tp_count) / static_cast<double>(original.size());
  return r;
}

AggregateRow aggregate(const std::vector<DetectionReport>& reports) {
  if (reports.empty()) throw MetricError("cannot aggregate an empty report list");
  AggregateRow row;
  row.count = reports.size();
  double tp = 0.0, fp = 0.0;
  std::size_t defined = 0;
  for (const auto& r : reports) {
    fp += static_cast<double>(r.fp_count);
    if (r.tp_percent) {
      tp += *r.tp_percent;
      ++defined;
    }
  }
  row.mean_fp = fp / static_cast<double>(reports.size());
  if (defined > 0) row.mean_tp_percent = tp / static_cast<double>(defined);
  return row;
}

void write_report_csv(std::ostream& out, const std::vector<NamedReport>& rows) {
  out << "patient,detections,tp_percent,fp_count\n";
  std::vector<DetectionReport> reports;
  for (const auto& r : rows) {
    out << r.name << ',' << r.report.ground_truth_count << ','
        << (r.report.tp_percent ? fixed2(*r.report.tp_percent) : "N/A") << ',' << r.report.fp_count << '\n';
    reports.push_back(r.report);
  }
  if (reports.empty()) return;
  const AggregateRow avg = aggregate(reports);
  out << "Average,," << (avg.mean_tp_percent ? fixed2(*avg.mean_tp_percent) : "N/A") << ',' << fixed2(avg.mean_fp)
      << '\n';
}

}  // namespace eegc
