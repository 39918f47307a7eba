#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "eegc/detection.hpp"
#include "eegc/error.hpp"
#include "support/synth.hpp"
#include "support/reference_results.hpp"

namespace eegc {
namespace {

constexpr std::uint32_t kFs = 256;

Recording background(double seconds, unsigned seed) {
  return synth::make_recording(synth::correlated_eeg(4, static_cast<std::size_t>(seconds * kFs), kFs, seed), kFs);
}

TEST(EpochActivity, CountsWholeEpochs) {
  const Recording rec = background(11.5, 1);
  EXPECT_EQ(epoch_activity(rec).size(), 5u);
}

TEST(EpochActivity, IgnoresGammaAndDelta) {
  SignalMatrix alpha(1, 2 * kFs), gamma(1, 2 * kFs), delta(1, 2 * kFs);
  for (std::size_t t = 0; t < 2 * kFs; ++t) {
    const double s = 2 * std::numbers::pi * static_cast<double>(t) / kFs;
    alpha(0, t) = std::sin(10 * s);
    gamma(0, t) = std::sin(70 * s);
    delta(0, t) = std::sin(1.5 * s);
  }
  const double a = epoch_activity(synth::make_recording(alpha, kFs))[0];
  EXPECT_GT(a, 0.0);
  EXPECT_LT(epoch_activity(synth::make_recording(gamma, kFs))[0], 0.05 * a);
  EXPECT_LT(epoch_activity(synth::make_recording(delta, kFs))[0], 0.05 * a);
}

TEST(Detect, StationaryInputIsQuiet) {
  EXPECT_TRUE(detect(background(600, 2)).empty());
}

TEST(Detect, BurstGivesOneSection) {
  Recording rec = background(600, 3);
  synth::inject_burst(rec.samples, kFs, 200, 60, 8);
  const auto sections = detect(rec);
  ASSERT_EQ(sections.size(), 1u);
  EXPECT_EQ(sections[0].start_s, 200.0);
  EXPECT_EQ(sections[0].end_s, 260.0);
}

TEST(Detect, CloseSectionsMerge) {
  Recording rec = background(600, 4);
  synth::inject_burst(rec.samples, kFs, 200, 20, 8);
  synth::inject_burst(rec.samples, kFs, 230, 60, 8);
  const auto sections = detect(rec);
  ASSERT_EQ(sections.size(), 1u);
  EXPECT_EQ(sections[0].start_s, 200.0);
  EXPECT_EQ(sections[0].end_s, 290.0);
}

TEST(Detect, DistantSectionsStaySeparate) {
  Recording rec = background(900, 5);
  synth::inject_burst(rec.samples, kFs, 200, 60, 8);
  synth::inject_burst(rec.samples, kFs, 600, 60, 8);
  EXPECT_EQ(detect(rec).size(), 2u);
}

TEST(Detect, ShortRecordingsGiveNothing) {
  Recording rec = background(100, 6);
  synth::inject_burst(rec.samples, kFs, 20, 60, 50);
  EXPECT_TRUE(detect(rec).empty());
}

TEST(Detect, ScaleInvariant) {
  Recording rec = background(500, 7);
  synth::inject_burst(rec.samples, kFs, 300, 70, 10);
  Recording scaled = rec;
  for (auto& v : scaled.samples.data()) v *= 1000.0;
  EXPECT_EQ(detect(rec), detect(scaled));
  EXPECT_FALSE(detect(rec).empty());
}

std::vector<FlagSection> sections(std::initializer_list<std::pair<double, double>> spans) {
  std::vector<FlagSection> out;
  for (auto [a, b] : spans) out.push_back({a, b, "seizure"});
  return out;
}

TEST(MatchFlags, FiveOfSix) {
  const auto original = sections({{0, 100}, {200, 300}, {400, 500}, {600, 700}, {800, 900}, {1000, 1100}});
  const auto compressed = sections({{0, 100}, {200, 300}, {400, 500}, {600, 700}, {800, 900}, {1500, 1600}});
  const auto r = match_flags(original, compressed);
  EXPECT_EQ(r.tp_count, 5u);
  EXPECT_EQ(r.fp_count, 1u);
  EXPECT_NEAR(*r.tp_percent, 83.33, 0.005);
}

TEST(MatchFlags, FiftyNineSecondsIsNotEnough) {
  const auto r = match_flags(sections({{100, 200}}), sections({{141, 250}}));
  EXPECT_EQ(r.tp_count, 0u);
  EXPECT_EQ(r.fp_count, 1u);
  EXPECT_EQ(*r.tp_percent, 0.0);
  EXPECT_EQ(match_flags(sections({{100, 200}}), sections({{140, 250}})).tp_count, 1u);
}

TEST(MatchFlags, IdenticalAndEmpty) {
  const auto s = sections({{10, 90}, {300, 420}});
  const auto r = match_flags(s, s);
  EXPECT_EQ(*r.tp_percent, 100.0);
  EXPECT_EQ(r.fp_count, 0u);
  const auto none = match_flags({}, s);
  EXPECT_FALSE(none.tp_percent);
  EXPECT_EQ(none.fp_count, 2u);
  EXPECT_EQ(*match_flags(s, {}).tp_percent, 0.0);
}

TEST(MatchFlags, OverlapAccumulatesAcrossOriginals) {
  const auto r = match_flags(sections({{0, 40}, {50, 90}}), sections({{10, 85}}));
  EXPECT_EQ(r.tp_count, 1u);
  // credited originals cannot be claimed twice
  const auto twice = match_flags(sections({{0, 100}}), sections({{0, 100}, {0, 100}}));
  EXPECT_EQ(twice.tp_count, 1u);
  EXPECT_EQ(twice.fp_count, 1u);
}

TEST(Aggregate, ReproducesReferenceAverages) {
  for (std::size_t col = 0; col < 6; ++col) {
    std::vector<DetectionReport> reports;
    for (const auto& row : reference_results::kRows) {
      DetectionReport r;
      r.ground_truth_count = static_cast<std::size_t>(row.detections);
      r.tp_percent = row.cells[col].tp_percent;
      r.fp_count = static_cast<std::size_t>(row.cells[col].fp);
      reports.push_back(r);
    }
    const AggregateRow avg = aggregate(reports);
    EXPECT_EQ(avg.count, 12u);
    EXPECT_NEAR(*avg.mean_tp_percent, reference_results::kAverages[col].tp_percent, 0.01) << reference_results::kColumns[col];
    EXPECT_NEAR(avg.mean_fp, reference_results::kAverages[col].fp, 0.01) << reference_results::kColumns[col];
  }
}

TEST(Aggregate, SkipsUndefinedRates) {
  DetectionReport a, b;
  a.tp_percent = 50.0;
  a.fp_count = 2;
  b.fp_count = 4;
  const AggregateRow row = aggregate({a, b});
  EXPECT_EQ(*row.mean_tp_percent, 50.0);
  EXPECT_EQ(row.mean_fp, 3.0);
  EXPECT_FALSE(aggregate({b}).mean_tp_percent);
  EXPECT_THROW(aggregate({}), MetricError);
}

TEST(ReportCsv, Layout) {
  DetectionReport a;
  a.ground_truth_count = 6;
  a.tp_count = 5;
  a.fp_count = 1;
  a.tp_percent = 500.0 / 6.0;
  DetectionReport b;
  b.fp_count = 2;
  std::ostringstream out;
  write_report_csv(out, {{"p01", a}, {"p02", b}});
  EXPECT_EQ(out.str(),
            "patient,detections,tp_percent,fp_count\n"
            "p01,6,83.33,1\n"
            "p02,0,N/A,2\n"
            "Average,,83.33,1.50\n");
}

}  // namespace
}  // namespace eegc
