// SPDX-License-Identifier: Apache-2.0
#include "flr/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "flr/detail/dotsum.hpp"
#include "flr/kernels.hpp"
#include "flr/rng.hpp"

namespace flr {

namespace {

constexpr double kPi = std::numbers::pi;

// Mode table: column k holds amp_k * sin(a_k t_p) with a_k = (k + 1/2) pi
// (zero-based k) and amp_k = sqrt(2) / a_k. Columns are contiguous so curve
// synthesis can accumulate mode by mode in fixed order.
Eigen::MatrixXd sine_mode_table(int modes, const Grid& grid) {
  const auto g = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd table(g, modes);
  const auto& t = grid.points();
  for (int k = 1; k <= modes; ++k) {
    const double a = (static_cast<double>(k) - 0.5) * kPi;
    const double amp = std::numbers::sqrt2 / a;
    for (Eigen::Index p = 0; p < g; ++p)
      table(p, k - 1) = amp * std::sin(a * t[p]);
  }
  return table;
}

}  // namespace

void SynthConfig::check() const {
  if (n_total < 1) throw std::invalid_argument("SynthConfig: n_total must be >= 1");
  if (n_train < 1 || n_train >= n_total)
    throw std::invalid_argument("SynthConfig: need 1 <= n_train < n_total");
  if (modes < 1) throw std::invalid_argument("SynthConfig: modes must be >= 1");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("SynthConfig: sigma2 must be >= 0");
  if (grid_size < 3) throw std::invalid_argument("SynthConfig: grid_size must be >= 3");
}

std::vector<Curve> predictors_from_coefficients(const Eigen::MatrixXd& coeffs,
                                                const Grid& grid) {
  if (!grid.valid())
    throw std::invalid_argument("predictors_from_coefficients: missing grid");
  const int modes = static_cast<int>(coeffs.cols());
  if (modes < 1)
    throw std::invalid_argument("predictors_from_coefficients: no modes");
  const Eigen::MatrixXd table = sine_mode_table(modes, grid);
  const auto g = grid.size();

  std::vector<Curve> out(static_cast<std::size_t>(coeffs.rows()));
  for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
    Curve& c = out[static_cast<std::size_t>(i)];
    c.grid = grid;
    c.values.assign(g, 0.0);
    for (int k = 0; k < modes; ++k)
      detail::axpy_ordered(coeffs(i, k), table.col(k).data(), c.values.data(), g);
  }
  return out;
}

std::vector<Curve> gen_predictors(const SynthConfig& cfg) {
  cfg.check();
  const Grid grid = make_uniform_grid(cfg.grid_size);
  NormalStream stream(substream_seed(cfg.seed, kPredictorStreamTag));
  Eigen::MatrixXd coeffs(cfg.n_total, cfg.modes);
  for (Eigen::Index i = 0; i < coeffs.rows(); ++i)
    for (Eigen::Index k = 0; k < coeffs.cols(); ++k) coeffs(i, k) = stream.next();
  return predictors_from_coefficients(coeffs, grid);
}

Curve beta_star(const Grid& grid) {
  const double scale = std::numbers::sqrt2 * kPi * kPi;
  Curve c;
  c.grid = grid;
  c.values.resize(grid.size());
  const auto& t = grid.points();
  for (std::size_t p = 0; p < grid.size(); ++p)
    c.values[p] = -scale * (euler_e1(t[p]) + bernoulli_b2(t[p]));
  return c;
}

Curve beta_star_h_variant(const Grid& grid, double decay) {
  if (!(decay >= 4.0))
    throw std::invalid_argument("beta_star_h_variant: decay must be >= 4");
  constexpr int kTerms = 200;
  Curve c;
  c.grid = grid;
  c.values.assign(grid.size(), 0.0);
  const auto& t = grid.points();
  for (int k = 1; k <= kTerms; ++k) {
    const double coef =
        4.0 * std::numbers::sqrt2 * (k % 2 == 1 ? 1.0 : -1.0) * std::pow(k, -decay);
    for (std::size_t p = 0; p < grid.size(); ++p)
      c.values[p] += coef * std::cos(static_cast<double>(k) * kPi * t[p]);
  }
  return c;
}

std::vector<double> gen_responses(std::span<const Curve> curves, const Curve& beta,
                                  double sigma2, std::uint64_t seed) {
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("gen_responses: sigma2 must be >= 0");
  for (const auto& c : curves)
    if (!c.grid.same_as(beta.grid))
      throw std::invalid_argument("gen_responses: curve/beta grid mismatch");
  NormalStream noise(substream_seed(seed, kNoiseStreamTag));
  const double sd = std::sqrt(sigma2);
  std::vector<double> y(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i)
    y[i] = l2_inner(curves[i], beta) + sd * noise.next();
  return y;
}

std::pair<Dataset, Dataset> make_experiment(const SynthConfig& cfg) {
  cfg.check();
  std::vector<Curve> curves = gen_predictors(cfg);
  const Grid grid = curves.front().grid;
  const Curve beta = beta_star(grid);
  std::vector<double> y = gen_responses(curves, beta, cfg.sigma2, cfg.seed);

  Dataset train, test;
  train.grid = test.grid = grid;
  const auto split = static_cast<std::size_t>(cfg.n_train);
  train.curves.assign(curves.begin(), curves.begin() + split);
  train.responses.assign(y.begin(), y.begin() + split);
  test.curves.assign(curves.begin() + split, curves.end());
  test.responses.assign(y.begin() + split, y.end());
  train.check();
  test.check();
  return {std::move(train), std::move(test)};
}

}  // namespace flr
