// SPDX-License-Identifier: Apache-2.0
//
// Closed-form reproducing kernels and covariance kernels on [0,1].
#pragma once

#include <Eigen/Dense>
#include <string>

#include "flr/grid.hpp"

namespace flr {

enum class KernelKind { sobolev_bernoulli, gaussian };

// Kernel selector. sobolev_bernoulli is the second-order Sobolev-type
// kernel with Bernoulli-polynomial closed form
//   k(s,t) = -(1/3) (B4((s+t)/2) + B4(|s-t|/2));
// gaussian is exp(-gamma (s-t)^2) with gamma > 0.
struct KernelSpec {
  KernelKind kind = KernelKind::sobolev_bernoulli;
  double gamma = 1.0;

  static KernelSpec sobolev_bernoulli() { return {KernelKind::sobolev_bernoulli, 0.0}; }
  static KernelSpec gaussian(double gamma);
};

// String forms used by the CLI and model files: "sobolev-bernoulli",
// "gaussian:gamma=<float>". parse_kernel also accepts the spelled-out
// Greek form "gaussian:γ=<float>".
std::string to_string(const KernelSpec& spec);
KernelSpec parse_kernel(const std::string& text);

// Bernoulli polynomial B2(x) = x^2 - x + 1/6.
double bernoulli_b2(double x);
// Bernoulli polynomial B4(x) = x^4 - 2x^3 + x^2 - 1/30.
double bernoulli_b4(double x);
// Euler polynomial E1(x) = x - 1/2.
double euler_e1(double x);

// Evaluates the kernel at (s,t); both arguments must lie in [0,1].
double kernel_eval(const KernelSpec& spec, double s, double t);

// Truncated cosine series sum_{k=1}^{kmax} 2/(k pi)^4 cos(k pi s) cos(k pi t).
// Test oracle for the sobolev_bernoulli closed form; too slow for fitting.
double kernel_series(double s, double t, int kmax);

enum class CovarianceKind { brownian, custom_grid };

// Covariance kernel selector. brownian is C(s,t) = min(s,t); custom_grid
// carries an explicit symmetric PSD matrix of values C(t_p, t_q) tied to a
// grid (validated on construction, pointwise evaluation not defined).
struct CovarianceSpec {
  CovarianceKind kind = CovarianceKind::brownian;
  Eigen::MatrixXd matrix;
  Grid grid;

  static CovarianceSpec brownian() { return {}; }
  static CovarianceSpec custom(Eigen::MatrixXd values, Grid grid);
};

std::string to_string(const CovarianceSpec& spec);

// Pointwise covariance; only defined for the brownian kind.
// min(s,t) coincides with E1((s+t)/2) - E1(|s-t|/2).
double covariance_eval(const CovarianceSpec& spec, double s, double t);

}  // namespace flr
