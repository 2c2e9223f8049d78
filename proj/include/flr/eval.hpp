// SPDX-License-Identifier: Apache-2.0
//
// Error metrics, the (m, lambda) sweep harness, and the fit-time benchmark.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flr/estimator.hpp"
#include "flr/grid.hpp"
#include "flr/kernels.hpp"
#include "flr/synth.hpp"

namespace flr {

// Root mean squared prediction error over the test set. With beta_true the
// targets are the noiseless inner products <beta_true, X_i>; without it the
// stored responses are used.
double rmse(const FittedModel& model, const Dataset& test, const Curve* beta_true);

// || reconstruct_slope(model) - beta_true ||_{L2} on beta_true's grid.
double l2_slope_error(const FittedModel& model, const Curve& beta_true);

// sqrt( int int d(s) C(s,t) d(t) ds dt ) for d = slope error, clipped at 0
// before the root. A custom_grid covariance must live on beta_true's grid.
double prediction_seminorm_error(const FittedModel& model, const Curve& beta_true,
                                 const CovarianceSpec& cov);

// Log-spaced lambda grid (inclusive ends; a single point uses lo).
std::vector<double> lambda_grid_log(double lo, double hi, int points);
// Linearly spaced integer m grid, rounded, duplicates removed.
std::vector<int> m_grid_linear(int lo, int hi, int points);

struct SweepSpec {
  double lambda_min = 1e-7;
  double lambda_max = 1e-4;
  int lambda_points = 25;
  int m_min = 10;
  int m_max = 240;
  int m_points = 25;
  int reps = 100;
  std::uint64_t base_seed = kDefaultSeed;
  int threads = 1;
  JitterPolicy jitter{};

  void check() const;
};

struct SweepRow {
  int m = 0;
  double lambda = 0.0;
  double mean_rmse = 0.0;
  double std_rmse = 0.0;
  int reps = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // m-major, lambda-minor order
  int failed_fits = 0;
};

// Per-cell repetition seed: splitmix64 chain over (base_seed, cell, rep)
// with cell = m_index * lambda_points + lambda_index. Fixed by definition
// so sweeps are reproducible and schedule-independent.
std::uint64_t sweep_cell_seed(std::uint64_t base_seed, std::size_t cell, int rep);

// Fits Nystrom at every (m, lambda) cell for `reps` subsample seeds and
// records mean/std RMSE. Targets are noiseless against beta_true when given,
// otherwise the stored test responses. A failed fit marks its cell NaN and
// increments failed_fits; the sweep never aborts. Cells may be processed by
// `threads` workers; results are independent of the schedule.
SweepResult run_sweep(const Dataset& train, const Dataset& test,
                      const KernelSpec& kernel, const SweepSpec& spec,
                      const Curve* beta_true);

struct BenchRow {
  std::string method;  // "full" or "nystrom"
  long n = 0;
  int m = 0;  // basis size used (n for the full solver)
  double wall_time_seconds = 0.0;
  double fit_residual = 0.0;  // relative residual of the solved system
};

struct BenchResult {
  std::vector<BenchRow> rows;
  int threads = 1;
};

// Median wall time over `reps` fits per method and train size, on freshly
// generated synthetic data. Gram assembly is inside the timed region; the
// G x G kernel grid table is warmed beforehand and excluded (shared fixed
// cost). full_size_cap skips the full solver above that size (0 = no cap).
BenchResult run_bench(std::span<const long> train_sizes, int m, int reps,
                      const KernelSpec& kernel, double lambda = 1e-3,
                      std::uint64_t seed = kDefaultSeed, int threads = 1,
                      long full_size_cap = 0);

// CSV with header m,lambda,mean_rmse,std_rmse,reps; floats at 17 significant
// digits, NaN as an empty cell.
void write_sweep_csv(const SweepResult& result, const std::string& path);
SweepResult read_sweep_csv(const std::string& path);

// Raster heatmap of mean RMSE over the (m, lambda) grid. Monotone two-stop
// color map (dark blue #14286E at the minimum to yellow #FDC832 at the
// maximum, linear in normalized value); NaN cells gray. Axes labeled (m
// horizontal, lambda vertical, log ticks) with a legend keyed to the
// min/max mean RMSE.
void write_heatmap_svg(const SweepResult& result, const std::string& path);

void write_bench_csv(const BenchResult& result, const std::string& path);

}  // namespace flr
