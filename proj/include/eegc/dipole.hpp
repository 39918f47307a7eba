#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "eegc/head_model.hpp"
#include "eegc/signal.hpp"

namespace eegc {

struct DipoleState {
  Vec3 position = Vec3::Zero();
  Eigen::MatrixXd moments;  // 3 x W, one moment per sample
};

struct FitResult {
  DipoleState dipole;
  SignalMatrix residual;
  double rho = 0.0;  // |residual|^2 / |window|^2, 0 for a zero window
  // Best objective after every optimizer iteration (all seeds, then the
  // local refinement).
  std::vector<double> history;
};

struct FitOptions {
  int max_iterations = 200;
  double rel_tolerance = 1e-10;
  // Candidate positions are confined to this fraction of the radius.
  double max_radius_fraction = 0.95;
};

// Interior starting points of the multi-start search: the 8 corners of a
// cube with half-side 0.3 R.
std::vector<Vec3> fit_seeds(double radius);

// Channels x W matrix as Eigen (row c = channel c).
Eigen::MatrixXd to_eigen(const SignalMatrix& m);
SignalMatrix from_eigen(const Eigen::MatrixXd& m);

// Least-squares moments for a fixed lead field: argmin_M |X - L M|.
Eigen::MatrixXd solve_moments(const Eigen::MatrixXd& lead, const Eigen::MatrixXd& window);

// Residual energy after the least-squares moment fit at `position`, given
// the window's Gram matrix X X^T. +inf outside the search region or when
// the lead field is rank deficient.
double fit_objective(const Vec3& position, const HeadModel& model, const Eigen::MatrixXd& gram,
                     const FitOptions& opts = {});

// Single-dipole inverse fit: Nelder-Mead from every seed, then a
// coordinate-shrinking pattern search from the best candidate. Throws
// FitError when every seed is degenerate and SizeError for W < 8.
FitResult fit_window(const SignalMatrix& window, const HeadModel& model, const FitOptions& opts = {});

// Energy-weighted fraction of residual energy below 32 Hz, from the
// 5-level dwt1d band split of each channel. 1 for a zero residual.
double smoothness(const SignalMatrix& residual, double fs);

}  // namespace eegc
