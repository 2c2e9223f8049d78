// SPDX-License-Identifier: Apache-2.0
//
// Synthetic experiment: Karhunen-Loeve sine-basis predictors with Brownian
// covariance, a closed-form target slope, and noisy scalar responses.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "flr/grid.hpp"

namespace flr {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct SynthConfig {
  int n_total = 650;
  int n_train = 550;
  int modes = 500;       // series truncation of the predictor process
  double sigma2 = 0.5;   // response noise variance
  int grid_size = 256;
  std::uint64_t seed = kDefaultSeed;

  void check() const;  // throws std::invalid_argument
};

// n_total curves X_i(t) = sum_{k=1}^{modes} sqrt(2)/((k-1/2) pi) Z_ik
// sin((k-1/2) pi t) with Z_ik iid standard normal, drawn curve-major from
// the predictor sub-stream of cfg.seed (rng.hpp). The process covariance is
// the Brownian kernel min(s,t), truncated at `modes` terms.
std::vector<Curve> gen_predictors(const SynthConfig& cfg);

// Deterministic part of gen_predictors: curves from an explicit coefficient
// matrix (one row per curve, one column per mode).
std::vector<Curve> predictors_from_coefficients(const Eigen::MatrixXd& coeffs,
                                                const Grid& grid);

// Target slope in closed form: -sqrt(2) pi^2 (E1(t) + B2(t)), equivalently
// the cosine series sum_k 4 sqrt(2) (-1)^{k-1} k^-2 cos(k pi t).
Curve beta_star(const Grid& grid);

// Faster-decaying variant sum_{k=1}^{200} 4 sqrt(2) (-1)^{k-1} k^-decay
// cos(k pi t); requires decay >= 4. For decay > 4.5 the coefficient decay
// makes sum_k (k pi)^4 f_k^2 finite, i.e. the target has finite norm in the
// sobolev_bernoulli kernel space, unlike beta_star.
Curve beta_star_h_variant(const Grid& grid, double decay);

// Y_i = <X_i, beta>_{L2} + eps_i with eps_i iid N(0, sigma2) drawn from the
// noise sub-stream of `seed`, independent of the predictor stream.
std::vector<double> gen_responses(std::span<const Curve> curves, const Curve& beta,
                                  double sigma2, std::uint64_t seed);

// Full generation: the first n_train pairs form the training set, the
// remaining n_total - n_train the test set, in generation order.
std::pair<Dataset, Dataset> make_experiment(const SynthConfig& cfg);

}  // namespace flr
