#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eegc {

using Vec3 = Eigen::Vector3d;

// Unit direction of a 10-20 electrode on an idealized spherical head
// (x right, y toward the nasion, z up). Accepts old temporal names
// (T3/T4/T5/T6) and is case-insensitive.
std::optional<Vec3> electrode_direction(std::string_view name);

// A channel is the potential difference plus - minus; minus < 0 marks a
// referential channel.
struct ChannelPair {
  int plus = -1;
  int minus = -1;
};

struct HeadModel {
  static constexpr double kDefaultRadius = 0.09;    // meters
  static constexpr double kConductivity = 1.0;      // S/m

  double radius = kDefaultRadius;
  std::vector<std::string> electrode_names;
  std::vector<Vec3> electrodes;  // on the sphere, norm == radius
  std::vector<ChannelPair> channels;
  std::vector<std::string> labels;

  std::size_t n_channels() const { return channels.size(); }

  // Parses labels such as "FP1-F7" (bipolar) or "CZ" (referential). Throws
  // DomainError for an unknown electrode.
  static HeadModel from_labels(const std::vector<std::string>& labels, double radius = kDefaultRadius);
  // The 23-channel longitudinal bipolar montage of the CHB-MIT recordings.
  static const std::vector<std::string>& standard_montage();
  // `labels` when they all parse, otherwise the first n channels of the
  // standard montage (n <= 23).
  static HeadModel for_channels(const std::vector<std::string>& labels, std::size_t n,
                                double radius = kDefaultRadius);
};

// Channels x 3 lead field of a current dipole at `position` inside a
// homogeneous conducting sphere. Throws DomainError unless |position| < R.
Eigen::MatrixXd lead_field(const Vec3& position, const HeadModel& model);

// Potential at electrode `electrode` (on the sphere) of a dipole with the
// given moment, using the closed-form single-shell solution.
double sphere_potential(const Vec3& electrode, const Vec3& position, const Vec3& moment, double conductivity);

}  // namespace eegc
