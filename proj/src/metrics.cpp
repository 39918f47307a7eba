#include "eegc/metrics.hpp"

#include <cmath>

#include "eegc/error.hpp"

namespace eegc {

double prd(const SignalMatrix& x, const SignalMatrix& xhat, PrdVariant variant) {
  if (x.n_channels() != xhat.n_channels() || x.n_samples() != xhat.n_samples()) {
    throw StructureError("PRD needs matrices of equal shape");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < x.n_channels(); ++c) {
    const auto a = x.row(c), b = xhat.row(c);
    double mean = 0.0;
    if (variant == PrdVariant::MeanRemoved) {
      for (double v : a) mean += v;
      mean /= static_cast<double>(a.size());
    }
    for (std::size_t t = 0; t < a.size(); ++t) {
      num += (a[t] - b[t]) * (a[t] - b[t]);
      den += (a[t] - mean) * (a[t] - mean);
    }
  }
  if (den == 0.0) throw MetricError("PRD is undefined for a zero-energy reference");
  return 100.0 * std::sqrt(num / den);
}

double achieved_bps(const CompressedRecord& rec) {
  if (rec.total_samples() == 0) throw MetricError("bit rate of an empty record");
  return static_cast<double>(rec.payload.size() + rec.side_info_bits()) / static_cast<double>(rec.total_samples());
}

RateDistortionPoint rd_point(const SignalMatrix& original, const CompressedRecord& rec,
                             const SignalMatrix& reconstruction, PrdVariant variant) {
  if (original.n_channels() != rec.n_channels || original.n_samples() != rec.n_samples) {
    throw StructureError("record dimensions do not match the original");
  }
  RateDistortionPoint p;
  p.target_bps = rec.target_bps;
  p.achieved_bps = achieved_bps(rec);
  if (!(p.achieved_bps > 0.0)) throw MetricError("record carries no bits");
  p.cr = 16.0 / p.achieved_bps;
  p.prd = prd(original, reconstruction, variant);
  return p;
}

}  // namespace eegc
