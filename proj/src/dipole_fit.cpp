#include "eegc/dipole.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "eegc/error.hpp"
#include "eegc/wavelet.hpp"

namespace eegc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSmoothCutoffHz = 32.0;

struct Candidate {
  Vec3 position;
  double value;
};

// Nelder-Mead on R^3 with the standard coefficients.
Candidate nelder_mead(const Vec3& start, double step, double stop_range, int max_iterations,
                      const auto& f, std::vector<double>& history, double& best_so_far) {
  std::array<Vec3, 4> x;
  std::array<double, 4> fx;
  x[0] = start;
  for (int i = 0; i < 3; ++i) {
    x[i + 1] = start;
    x[i + 1][i] += step;
  }
  for (int i = 0; i < 4; ++i) fx[i] = f(x[i]);

  std::array<int, 4> order{0, 1, 2, 3};
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const int best = order[0], worst = order[3], second = order[2];
    best_so_far = std::min(best_so_far, fx[best]);
    history.push_back(best_so_far);
    if (std::isfinite(fx[worst]) && fx[worst] - fx[best] <= stop_range) break;

    Vec3 centroid = (x[order[0]] + x[order[1]] + x[order[2]]) / 3.0;
    const Vec3 xr = centroid + (centroid - x[worst]);
    const double fr = f(xr);
    if (fr < fx[best]) {
      const Vec3 xe = centroid + 2.0 * (centroid - x[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        x[worst] = xe, fx[worst] = fe;
      } else {
        x[worst] = xr, fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[second]) {
      x[worst] = xr, fx[worst] = fr;
      continue;
    }
    const bool outside = fr < fx[worst];
    const Vec3 xc = outside ? Vec3(centroid + 0.5 * (xr - centroid)) : Vec3(centroid + 0.5 * (x[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : fx[worst])) {
      x[worst] = xc, fx[worst] = fc;
      continue;
    }
    for (int i = 1; i < 4; ++i) {
      const int k = order[i];
      x[k] = x[best] + 0.5 * (x[k] - x[best]);
      fx[k] = f(x[k]);
    }
  }
  const auto it = std::min_element(fx.begin(), fx.end());
  const auto k = static_cast<std::size_t>(it - fx.begin());
  best_so_far = std::min(best_so_far, fx[k]);
  return {x[k], fx[k]};
}

// Polls +-step along each axis; halves the step after a failed poll.
Candidate compass_search(Candidate c, double step, double min_step, double stop_gain, int max_iterations,
                         const auto& f, std::vector<double>& history) {
  for (int iter = 0; iter < max_iterations && step >= min_step; ++iter) {
    Candidate best = c;
    for (int axis = 0; axis < 3; ++axis) {
      for (double sign : {1.0, -1.0}) {
        Vec3 p = c.position;
        p[axis] += sign * step;
        const double v = f(p);
        if (v < best.value) best = {p, v};
      }
    }
    const double gain = c.value - best.value;
    if (gain > 0.0) {
      c = best;
    } else {
      step *= 0.5;
    }
    history.push_back(c.value);
    if (gain > 0.0 && gain <= stop_gain) break;
  }
  return c;
}

}  // namespace

std::vector<Vec3> fit_seeds(double radius) {
  const double s = 0.3 * radius;
  std::vector<Vec3> seeds;
  for (double x : {-s, s})
    for (double y : {-s, s})
      for (double z : {-s, s}) seeds.emplace_back(x, y, z);
  return seeds;
}

Eigen::MatrixXd to_eigen(const SignalMatrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.n_channels()), static_cast<Eigen::Index>(m.n_samples()));
  for (std::size_t c = 0; c < m.n_channels(); ++c)
    for (std::size_t t = 0; t < m.n_samples(); ++t)
      out(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) = m(c, t);
  return out;
}

SignalMatrix from_eigen(const Eigen::MatrixXd& m) {
  SignalMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.rows(); ++c)
    for (Eigen::Index t = 0; t < m.cols(); ++t) out(static_cast<std::size_t>(c), static_cast<std::size_t>(t)) = m(c, t);
  return out;
}

Eigen::MatrixXd solve_moments(const Eigen::MatrixXd& lead, const Eigen::MatrixXd& window) {
  return lead.colPivHouseholderQr().solve(window);
}

namespace {

bool degenerate(const Eigen::Matrix3d& normal) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return !(ev[2] > 0.0) || ev[0] <= 1e-12 * ev[2];
}

}  // namespace

double fit_objective(const Vec3& position, const HeadModel& model, const Eigen::MatrixXd& gram,
                     const FitOptions& opts) {
  if (!position.allFinite() || position.norm() > opts.max_radius_fraction * model.radius) return kInf;
  const Eigen::MatrixXd lead = lead_field(position, model);
  const Eigen::Matrix3d normal = lead.transpose() * lead;
  if (degenerate(normal)) return kInf;
  const Eigen::Matrix3d projected = lead.transpose() * gram * lead;
  const double explained = normal.ldlt().solve(projected).trace();
  return std::max(0.0, gram.trace() - explained);
}

FitResult fit_window(const SignalMatrix& window, const HeadModel& model, const FitOptions& opts) {
  if (window.n_samples() < 8) throw SizeError("dipole fit needs at least 8 samples per window");
  if (window.n_channels() != model.n_channels()) throw StructureError("window channels do not match the head model");

  const Eigen::MatrixXd x = to_eigen(window);
  const std::vector<Vec3> seeds = fit_seeds(model.radius);
  FitResult result;
  const double energy = x.squaredNorm();
  if (energy == 0.0) {
    result.dipole.position = seeds.front();
    result.dipole.moments = Eigen::MatrixXd::Zero(3, x.cols());
    result.residual = SignalMatrix(window.n_channels(), window.n_samples());
    result.rho = 0.0;
    return result;
  }

  // The objective is normalized to the window energy so the tolerances are
  // relative.
  const Eigen::MatrixXd gram = (x * x.transpose()) / energy;
  auto f = [&](const Vec3& p) { return fit_objective(p, model, gram, opts); };

  double best_so_far = kInf;
  Candidate best{seeds.front(), kInf};
  bool any = false;
  for (const Vec3& seed : seeds) {
    if (!std::isfinite(f(seed))) continue;
    any = true;
    Candidate c = nelder_mead(seed, 0.1 * model.radius, opts.rel_tolerance, opts.max_iterations, f,
                              result.history, best_so_far);
    if (c.value < best.value) best = c;
  }
  if (!any) throw FitError("lead field is rank deficient at every seed position");

  best = compass_search(best, 1e-3 * model.radius, 1e-10 * model.radius, opts.rel_tolerance * 1e-3,
                        opts.max_iterations, f, result.history);

  const Eigen::MatrixXd lead = lead_field(best.position, model);
  result.dipole.position = best.position;
  result.dipole.moments = solve_moments(lead, x);
  const Eigen::MatrixXd residual = x - lead * result.dipole.moments;
  result.residual = from_eigen(residual);
  result.rho = std::clamp(residual.squaredNorm() / energy, 0.0, 1.0);
  return result;
}

double smoothness(const SignalMatrix& residual, double fs) {
  if (residual.empty()) throw SizeError("smoothness of an empty residual");
  double total = 0.0, low = 0.0;
  for (std::size_t c = 0; c < residual.n_channels(); ++c) {
    const auto row = residual.row(c);
    const int levels = max_levels_for(row.size(), 5);
    if (levels == 0) {
      for (double v : row) total += v * v, low += v * v;
      continue;
    }
    const WaveletPyramid1D pyr = dwt1d(row, levels);
    const auto energies = group_energies(pyr);
    const auto bands = dyadic_bands(levels, fs);
    for (std::size_t g = 0; g < bands.size(); ++g) {
      const double width = bands[g].high_hz - bands[g].low_hz;
      const double below = std::clamp(kSmoothCutoffHz - bands[g].low_hz, 0.0, width);
      total += energies[g];
      low += energies[g] * (width > 0.0 ? below / width : 1.0);
    }
  }
  return total == 0.0 ? 1.0 : std::clamp(low / total, 0.0, 1.0);
}

}  // namespace eegc
