#pragma once

#include "eegc/container.hpp"
#include "eegc/signal.hpp"

namespace eegc {

enum class PrdVariant { Raw, MeanRemoved };

// 100 * |x - xhat| / |x| over all channels and samples. The mean-removed
// variant subtracts each channel's mean of x from the denominator only.
// Throws StructureError on a shape mismatch and MetricError for a
// zero-energy reference.
double prd(const SignalMatrix& x, const SignalMatrix& xhat, PrdVariant variant = PrdVariant::Raw);

struct RateDistortionPoint {
  double target_bps = 0.0;
  double achieved_bps = 0.0;  // (payload + side info bits) / original samples
  double cr = 0.0;            // 16 / achieved_bps
  double prd = 0.0;
};

double achieved_bps(const CompressedRecord& rec);

RateDistortionPoint rd_point(const SignalMatrix& original, const CompressedRecord& rec,
                             const SignalMatrix& reconstruction, PrdVariant variant = PrdVariant::Raw);

}  // namespace eegc
