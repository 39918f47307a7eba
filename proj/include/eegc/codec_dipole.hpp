#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eegc/codec.hpp"
#include "eegc/dipole.hpp"
#include "eegc/head_model.hpp"

namespace eegc {

enum class ResidualCoder : std::uint8_t { None = 0, TwoD = 1, OneD = 2 };

inline constexpr int kMomentBits = 12;
inline constexpr std::int32_t kMomentMax = (1 << (kMomentBits - 1)) - 1;

// Per-window record of the dipole side info.
struct DipoleWindow {
  std::size_t first = 0;
  std::size_t length = 0;
  float position[3] = {0, 0, 0};
  float moment_scale = 0.0f;
  std::vector<std::int32_t> moments;  // 3 x length, axis-major
  ResidualCoder coder = ResidualCoder::None;
  double residual_scale = 0.0;
  int residual_levels = 0;
  std::vector<std::uint64_t> stream_bits;  // one per residual stream
};

struct DipoleSideInfo {
  double radius = HeadModel::kDefaultRadius;
  std::size_t window = 0;
  int precision_bits = 0;
  std::vector<std::string> labels;  // empty: standard montage
  std::vector<DipoleWindow> windows;
};

DipoleSideInfo parse_dipole_side_info(const CompressedRecord& rec);

// Encoder-side diagnostics for one window.
struct DipoleWindowReport {
  FitResult fit;
  double smoothness = 0.0;
  ResidualCoder coder = ResidualCoder::None;
  std::uint64_t side_bits = 0;
  std::uint64_t residual_bits = 0;
};

// Forward projection L(p) M of a window's quantized dipole.
Eigen::MatrixXd dipole_projection(const DipoleWindow& w, const HeadModel& model);

// Method 3: single-dipole fit per window; position and the 12-bit moment
// trajectory go into the side info, the fit residual is SPIHT-coded (2D when
// smooth, per channel otherwise) with what is left of the window's budget.
class DipoleCodec final : public Codec {
 public:
  explicit DipoleCodec(CodecConfig config = {});
  CodecId id() const override { return CodecId::Dipole; }
  CompressedRecord compress(const SignalMatrix& m, std::uint32_t fs, double target_bps) const override;
  SignalMatrix decompress(const CompressedRecord& rec) const override;

  CompressedRecord compress(const SignalMatrix& m, std::uint32_t fs, double target_bps,
                            std::vector<DipoleWindowReport>* report) const;

 private:
  CodecConfig config_;
};

}  // namespace eegc
