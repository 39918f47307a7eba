#include "eegc/signal.hpp"

#include <cmath>

#include "eegc/error.hpp"

namespace eegc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format error";
    case ErrorKind::Structure: return "structure error";
    case ErrorKind::Range: return "range error";
    case ErrorKind::Size: return "size error";
    case ErrorKind::Budget: return "budget error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Fit: return "fit error";
    case ErrorKind::Metric: return "metric error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

SignalMatrix::SignalMatrix(std::size_t n_channels, std::size_t n_samples)
    : n_channels_(n_channels),
      n_samples_(n_samples),
      data_(n_channels * n_samples, 0.0) {
  if (n_channels == 0 || n_samples == 0) {
    throw StructureError("signal matrix needs at least one channel and sample");
  }
}

SignalMatrix::SignalMatrix(std::size_t n_channels, std::size_t n_samples,
                           std::vector<double> data)
    : n_channels_(n_channels), n_samples_(n_samples), data_(std::move(data)) {
  if (n_channels == 0 || n_samples == 0) {
    throw StructureError("signal matrix needs at least one channel and sample");
  }
  if (data_.size() != n_channels * n_samples) {
    throw StructureError("signal matrix data size does not match dimensions");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw StructureError("signal matrix holds a non-finite value");
  }
}

SignalMatrix SignalMatrix::columns(std::size_t first, std::size_t count) const {
  if (first + count > n_samples_ || count == 0) {
    throw RangeError("column block outside matrix");
  }
  SignalMatrix out(n_channels_, count);
  for (std::size_t ch = 0; ch < n_channels_; ++ch) {
    const double* src = data_.data() + ch * n_samples_ + first;
    std::copy(src, src + count, out.row(ch).begin());
  }
  return out;
}

void SignalMatrix::set_columns(std::size_t first, const SignalMatrix& block) {
  if (block.n_channels() != n_channels_ ||
      first + block.n_samples() > n_samples_) {
    throw StructureError("column block does not fit matrix");
  }
  for (std::size_t ch = 0; ch < n_channels_; ++ch) {
    auto src = block.row(ch);
    std::copy(src.begin(), src.end(), data_.begin() + ch * n_samples_ + first);
  }
}

double SignalMatrix::energy() const {
  double e = 0.0;
  for (double v : data_) e += v * v;
  return e;
}

}  // namespace eegc
