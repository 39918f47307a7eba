#include "eegc/head_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <utility>

#include "eegc/error.hpp"

namespace eegc {
namespace {

Vec3 from_angles(double azimuth_deg, double elevation_deg) {
  const double az = azimuth_deg * std::numbers::pi / 180.0;
  const double el = elevation_deg * std::numbers::pi / 180.0;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

std::string upper(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::optional<Vec3> electrode_direction(std::string_view raw) {
  std::string name = upper(raw);
  if (name == "T3") name = "T7";
  if (name == "T4") name = "T8";
  if (name == "T5") name = "P7";
  if (name == "T6") name = "P8";

  // Midline and 10% ring positions: 18 degree steps of the 10-20 arcs.
  static const std::pair<const char*, std::pair<double, double>> kAngles[] = {
      {"FPZ", {90, 18}}, {"FZ", {90, 54}},  {"CZ", {90, 90}},   {"PZ", {270, 54}}, {"OZ", {270, 18}},
      {"FP1", {108, 18}}, {"FP2", {72, 18}}, {"F7", {144, 18}}, {"F8", {36, 18}},  {"T7", {180, 18}},
      {"T8", {0, 18}},   {"P7", {216, 18}}, {"P8", {324, 18}}, {"O1", {252, 18}}, {"O2", {288, 18}},
      {"C3", {180, 54}}, {"C4", {0, 54}},   {"FT9", {162, -18}}, {"FT10", {18, -18}},
  };
  for (const auto& [n, angles] : kAngles) {
    if (name == n) return from_angles(angles.first, angles.second);
  }
  // Intermediate chain electrodes sit midway along the great arc.
  static const std::pair<const char*, std::pair<const char*, const char*>> kMidpoints[] = {
      {"F3", {"F7", "FZ"}}, {"F4", {"F8", "FZ"}}, {"P3", {"P7", "PZ"}}, {"P4", {"P8", "PZ"}},
  };
  for (const auto& [n, ends] : kMidpoints) {
    if (name == n) return (*electrode_direction(ends.first) + *electrode_direction(ends.second)).normalized();
  }
  return std::nullopt;
}

const std::vector<std::string>& HeadModel::standard_montage() {
  static const std::vector<std::string> kMontage = {
      "FP1-F7", "F7-T7", "T7-P7", "P7-O1",   "FP1-F3",   "F3-C3",   "C3-P3",  "P3-O1",
      "FP2-F4", "F4-C4", "C4-P4", "P4-O2",   "FP2-F8",   "F8-T8",   "T8-P8",  "P8-O2",
      "FZ-CZ",  "CZ-PZ", "P7-T7", "T7-FT9", "FT9-FT10", "FT10-T8", "T8-P8"};
  return kMontage;
}

HeadModel HeadModel::from_labels(const std::vector<std::string>& labels, double radius) {
  if (!(radius > 0.0)) throw DomainError("head radius must be positive");
  HeadModel model;
  model.radius = radius;
  model.labels = labels;
  auto electrode_index = [&](const std::string& name) {
    const std::string key = upper(name);
    for (std::size_t i = 0; i < model.electrode_names.size(); ++i)
      if (model.electrode_names[i] == key) return static_cast<int>(i);
    auto dir = electrode_direction(key);
    if (!dir) throw DomainError("unknown electrode '" + name + "'");
    model.electrode_names.push_back(key);
    model.electrodes.push_back(*dir * radius);
    return static_cast<int>(model.electrodes.size() - 1);
  };
  for (const auto& label : labels) {
    const auto dash = label.find('-');
    ChannelPair pair;
    if (dash == std::string::npos) {
      pair.plus = electrode_index(label);
    } else {
      pair.plus = electrode_index(label.substr(0, dash));
      pair.minus = electrode_index(label.substr(dash + 1));
    }
    model.channels.push_back(pair);
  }
  return model;
}

HeadModel HeadModel::for_channels(const std::vector<std::string>& labels, std::size_t n, double radius) {
  if (labels.size() == n) {
    try {
      return from_labels(labels, radius);
    } catch (const DomainError&) {
    }
  }
  const auto& montage = standard_montage();
  if (n == 0 || n > montage.size()) {
    throw DomainError("no head model for " + std::to_string(n) + " unlabeled channels");
  }
  return from_labels(std::vector<std::string>(montage.begin(), montage.begin() + static_cast<std::ptrdiff_t>(n)),
                     radius);
}

double sphere_potential(const Vec3& electrode, const Vec3& position, const Vec3& moment, double conductivity) {
  const Vec3 d = electrode - position;
  const double dn = d.norm();
  const double rn = electrode.norm();
  const double far = 2.0 * d.dot(moment) / (dn * dn * dn);
  const double near = (electrode * dn + rn * d).dot(moment) / (rn * dn * (rn * dn + electrode.dot(d)));
  return (far + near) / (4.0 * std::numbers::pi * conductivity);
}

Eigen::MatrixXd lead_field(const Vec3& position, const HeadModel& model) {
  if (!(position.norm() < model.radius)) throw DomainError("dipole position lies outside the head sphere");
  Eigen::MatrixXd unipolar(static_cast<Eigen::Index>(model.electrodes.size()), 3);
  for (std::size_t e = 0; e < model.electrodes.size(); ++e) {
    const Vec3& r = model.electrodes[e];
    const Vec3 d = r - position;
    const double dn = d.norm();
    const double rn = r.norm();
    const Vec3 g = 2.0 * d / (dn * dn * dn) + (r * dn + rn * d) / (rn * dn * (rn * dn + r.dot(d)));
    unipolar.row(static_cast<Eigen::Index>(e)) = g.transpose() / (4.0 * std::numbers::pi * HeadModel::kConductivity);
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(model.channels.size()), 3);
  for (std::size_t c = 0; c < model.channels.size(); ++c) {
    const auto& ch = model.channels[c];
    out.row(static_cast<Eigen::Index>(c)) = unipolar.row(ch.plus);
    if (ch.minus >= 0) out.row(static_cast<Eigen::Index>(c)) -= unipolar.row(ch.minus);
  }
  return out;
}

}  // namespace eegc
