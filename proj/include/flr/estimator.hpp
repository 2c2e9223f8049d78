// SPDX-License-Identifier: Apache-2.0
//
// Ridge-regularized functional linear regression: the full kernel solver,
// the Nystrom-subsampled solver, and prediction.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "flr/gram.hpp"
#include "flr/grid.hpp"
#include "flr/kernels.hpp"

namespace flr {

// Jitter fallback for near-singular systems: on a failed factorization the
// solver adds eps = rel * trace(M)/dim to the diagonal and retries, then
// escalates rel by x100 for a final attempt. off() fails immediately.
struct JitterPolicy {
  bool enabled = true;
  double rel = 1e-10;

  static JitterPolicy off() { return {false, 0.0}; }
  static JitterPolicy with_rel(double rel) { return {true, rel}; }
};

struct RidgeConfig {
  double lambda = 1e-3;  // must be > 0
  JitterPolicy jitter{};
};

enum class SolverKind { full, nystrom };

// A fitted model: representer coefficients over retained basis curves.
// For the full solver the basis is the whole training set; for Nystrom it
// is the m subsampled curves, with their (sorted, distinct) indices kept.
struct FittedModel {
  SolverKind kind = SolverKind::full;
  Eigen::VectorXd coeff;
  std::vector<Curve> basis_curves;
  std::vector<int> subsample_indices;  // empty for full
  double lambda = 0.0;
  KernelSpec kernel;
  Grid grid;
};

// Solves (K + n lambda I) a = Y with K the full Gram matrix, via a
// symmetrized SPD Cholesky factorization with the jitter ladder above.
// Throws numeric_error with condition diagnostics if all attempts fail.
// threads parallelizes the Gram assembly only; results are identical for
// any thread count.
FittedModel fit_full(const Dataset& data, const KernelSpec& kernel,
                     const RidgeConfig& cfg, int threads = 1);

// m distinct indices drawn uniformly without replacement from {0,...,n-1},
// returned sorted. Deterministic per seed: a partial Fisher-Yates shuffle
// of the identity permutation driven by mt19937_64(splitmix64(seed)) with
// rejection-sampled bounded draws (see rng.hpp).
std::vector<int> subsample_uniform(int n, int m, std::uint64_t seed);

// Solves (K_nm^T K_nm + lambda n K_mm) a = K_nm^T Y over the m curves
// selected by subsample_uniform(n, m, seed). The dominant costs are the
// n x m Gram block and an m x m factorization.
FittedModel fit_nystrom(const Dataset& data, const KernelSpec& kernel,
                        const RidgeConfig& cfg, int m, std::uint64_t seed,
                        int threads = 1);

// coeff . embed_vector(basis_curves, x_new); x_new must be on the model grid.
double predict(const FittedModel& model, const Curve& x_new);

// predict for each curve; identical arithmetic to predict per entry.
std::vector<double> predict_many(const FittedModel& model,
                                 std::span<const Curve> curves);

// Slope function of the fitted model sampled on out_grid.
Curve reconstruct_slope(const FittedModel& model, const Grid& out_grid);

namespace detail {

// Shared SPD solve (symmetrize, Cholesky, jitter ladder). context is used
// in diagnostics on failure.
Eigen::VectorXd solve_spd(Eigen::MatrixXd system, const Eigen::VectorXd& rhs,
                          const JitterPolicy& jitter, const char* context);

// The Nystrom normal system given pre-assembled blocks; fit_nystrom and the
// sweep harness both route through here.
Eigen::VectorXd solve_nystrom_system(const Eigen::MatrixXd& k_nm,
                                     const Eigen::MatrixXd& k_mm,
                                     const Eigen::VectorXd& y, double lambda,
                                     const JitterPolicy& jitter);

}  // namespace detail

}  // namespace flr
