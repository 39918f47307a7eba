#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eegc {

// Channel-major matrix of EEG amplitudes in microvolts.
class SignalMatrix {
 public:
  SignalMatrix() = default;
  // Zero-filled matrix. Both dimensions must be at least 1.
  SignalMatrix(std::size_t n_channels, std::size_t n_samples);
  // Takes ownership of channel-major data; every value must be finite.
  SignalMatrix(std::size_t n_channels, std::size_t n_samples,
               std::vector<double> data);

  std::size_t n_channels() const { return n_channels_; }
  std::size_t n_samples() const { return n_samples_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t ch, std::size_t t) {
    return data_[ch * n_samples_ + t];
  }
  double operator()(std::size_t ch, std::size_t t) const {
    return data_[ch * n_samples_ + t];
  }

  std::span<double> row(std::size_t ch) {
    return {data_.data() + ch * n_samples_, n_samples_};
  }
  std::span<const double> row(std::size_t ch) const {
    return {data_.data() + ch * n_samples_, n_samples_};
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  // Columns [first, first + count) of every channel.
  SignalMatrix columns(std::size_t first, std::size_t count) const;
  // Writes `block` into columns starting at `first`.
  void set_columns(std::size_t first, const SignalMatrix& block);

  double energy() const;

  friend bool operator==(const SignalMatrix&, const SignalMatrix&) = default;

 private:
  std::size_t n_channels_ = 0;
  std::size_t n_samples_ = 0;
  std::vector<double> data_;
};

struct Recording {
  std::string patient_id;
  std::vector<std::string> channels;
  std::uint32_t fs = 0;
  SignalMatrix samples;
  int precision_bits = 16;
  // Microvolts per integer step when the samples came from a 16-bit grid
  // with one shared step; 0 when unknown or per-channel.
  double resolution_uv = 0.0;

  double duration_s() const {
    return fs == 0 ? 0.0 : static_cast<double>(samples.n_samples()) / fs;
  }
};

struct FlagSection {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;

  double duration() const { return end_s - start_s; }
  friend bool operator==(const FlagSection&, const FlagSection&) = default;
};

}  // namespace eegc
