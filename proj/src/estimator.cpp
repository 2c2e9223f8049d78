// SPDX-License-Identifier: Apache-2.0
#include "flr/estimator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "flr/detail/dotsum.hpp"
#include "flr/errors.hpp"
#include "flr/rng.hpp"

namespace flr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void check_ridge(const RidgeConfig& cfg) {
  if (!(cfg.lambda > 0.0))
    throw std::invalid_argument("RidgeConfig: lambda must be > 0");
  if (cfg.jitter.enabled && !(cfg.jitter.rel > 0.0))
    throw std::invalid_argument("RidgeConfig: jitter rel must be > 0");
}

VectorXd responses_vector(const Dataset& data) {
  VectorXd y(static_cast<Eigen::Index>(data.responses.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = data.responses[i];
  return y;
}

}  // namespace

namespace detail {

VectorXd solve_spd(MatrixXd system, const VectorXd& rhs, const JitterPolicy& jitter,
                   const char* context) {
  const Eigen::Index dim = system.rows();
  if (dim != system.cols() || dim != rhs.size())
    throw std::invalid_argument("solve_spd: dimension mismatch");
  system = 0.5 * (system + system.transpose()).eval();
  const double trace = system.trace();

  double jitters[3] = {0.0, 0.0, 0.0};
  int attempts = 1;
  if (jitter.enabled) {
    jitters[1] = jitter.rel * trace / static_cast<double>(dim);
    jitters[2] = 100.0 * jitters[1];
    attempts = 3;
  }

  for (int a = 0; a < attempts; ++a) {
    MatrixXd shifted = system;
    if (jitters[a] != 0.0) shifted.diagonal().array() += jitters[a];
    Eigen::LLT<MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      VectorXd x = llt.solve(rhs);
      if (x.allFinite()) return x;
    }
  }

  std::ostringstream msg;
  msg << context << ": SPD factorization failed; dim=" << dim << " trace=" << trace
      << " diag(min)=" << system.diagonal().minCoeff()
      << " diag(max)=" << system.diagonal().maxCoeff() << " jitter attempts=[";
  for (int a = 0; a < attempts; ++a) msg << (a ? "," : "") << jitters[a];
  msg << "]";
  throw numeric_error(msg.str());
}

VectorXd solve_nystrom_system(const MatrixXd& k_nm, const MatrixXd& k_mm,
                              const VectorXd& y, double lambda,
                              const JitterPolicy& jitter) {
  const auto n = static_cast<double>(k_nm.rows());
  MatrixXd system = k_nm.transpose() * k_nm;
  system.noalias() += (lambda * n) * k_mm;
  const VectorXd rhs = k_nm.transpose() * y;
  return solve_spd(std::move(system), rhs, jitter, "fit_nystrom");
}

}  // namespace detail

FittedModel fit_full(const Dataset& data, const KernelSpec& kernel,
                     const RidgeConfig& cfg, int threads) {
  data.check();
  check_ridge(cfg);
  const auto n = static_cast<Eigen::Index>(data.curves.size());
  if (n < 1) throw std::invalid_argument("fit_full: empty dataset");

  GramMatrix gram = gram_full(data.curves, kernel, threads);
  MatrixXd system = gram.entries;
  system.diagonal().array() += cfg.lambda * static_cast<double>(n);
  const VectorXd y = responses_vector(data);

  FittedModel model;
  model.kind = SolverKind::full;
  model.coeff = detail::solve_spd(std::move(system), y, cfg.jitter, "fit_full");
  model.basis_curves = data.curves;
  model.lambda = cfg.lambda;
  model.kernel = kernel;
  model.grid = data.grid;
  return model;
}

std::vector<int> subsample_uniform(int n, int m, std::uint64_t seed) {
  if (m < 1 || m > n)
    throw std::invalid_argument("subsample_uniform: need 1 <= m <= n");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 eng(splitmix64(seed));
  for (int i = 0; i < m; ++i) {
    const auto span = static_cast<std::uint64_t>(n - i);
    const auto j = i + static_cast<int>(bounded_uniform(eng, span));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

FittedModel fit_nystrom(const Dataset& data, const KernelSpec& kernel,
                        const RidgeConfig& cfg, int m, std::uint64_t seed,
                        int threads) {
  data.check();
  check_ridge(cfg);
  const int n = static_cast<int>(data.curves.size());
  if (m < 1 || m > n) throw std::invalid_argument("fit_nystrom: need 1 <= m <= n");

  FittedModel model;
  model.kind = SolverKind::nystrom;
  model.subsample_indices = subsample_uniform(n, m, seed);
  model.basis_curves.reserve(model.subsample_indices.size());
  for (int i : model.subsample_indices)
    model.basis_curves.push_back(data.curves[static_cast<std::size_t>(i)]);

  const GramMatrix k_nm = gram_cross(data.curves, model.basis_curves, kernel, threads);
  const GramMatrix k_mm =
      gram_cross(model.basis_curves, model.basis_curves, kernel, threads);
  const VectorXd y = responses_vector(data);
  model.coeff =
      detail::solve_nystrom_system(k_nm.entries, k_mm.entries, y, cfg.lambda, cfg.jitter);
  model.lambda = cfg.lambda;
  model.kernel = kernel;
  model.grid = data.grid;
  return model;
}

std::vector<double> predict_many(const FittedModel& model,
                                 std::span<const Curve> curves) {
  if (model.coeff.size() != static_cast<Eigen::Index>(model.basis_curves.size()))
    throw std::invalid_argument("predict: model coefficient/basis mismatch");
  for (const auto& c : curves)
    if (!c.grid.same_as(model.grid))
      throw std::invalid_argument("predict: curve not on the model grid");
  if (curves.empty()) return {};

  const GramMatrix embed = gram_cross(model.basis_curves, curves, model.kernel);
  std::vector<double> out(curves.size());
  const auto m = static_cast<std::size_t>(model.coeff.size());
  for (std::size_t t = 0; t < curves.size(); ++t)
    out[t] = detail::dot_ordered(model.coeff.data(),
                                 embed.entries.col(static_cast<Eigen::Index>(t)).data(),
                                 m);
  return out;
}

double predict(const FittedModel& model, const Curve& x_new) {
  const Curve* one = &x_new;
  return predict_many(model, std::span<const Curve>(one, 1)).front();
}

Curve reconstruct_slope(const FittedModel& model, const Grid& out_grid) {
  return slope_from_coefficients(
      std::span<const double>(model.coeff.data(),
                              static_cast<std::size_t>(model.coeff.size())),
      model.basis_curves, model.kernel, out_grid);
}

}  // namespace flr
