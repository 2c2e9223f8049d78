// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "flr/grid.hpp"
#include "flr/rng.hpp"
#include "flr/synth.hpp"

using namespace flr;

TEST_CASE("predictors_from_coefficients: zero coefficients give zero curves") {
  const Grid g = make_uniform_grid(16);
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(3, 25);
  for (const Curve& c : predictors_from_coefficients(zeros, g))
    for (double v : c.values) CHECK(v == 0.0);
}

TEST_CASE("gen_predictors: curves vanish exactly at t = 0") {
  SynthConfig cfg;
  cfg.n_total = 20;
  cfg.n_train = 10;
  cfg.grid_size = 32;
  cfg.seed = 7;
  for (const Curve& c : gen_predictors(cfg)) CHECK(c.values.front() == 0.0);
}

TEST_CASE("gen_predictors: variance at t = 1 matches the covariance diagonal") {
  SynthConfig cfg;
  cfg.n_total = 10000;
  cfg.n_train = 1;
  cfg.grid_size = 3;  // only the endpoint value matters
  cfg.seed = 2025;
  const std::vector<Curve> curves = gen_predictors(cfg);
  double mean = 0.0;
  for (const Curve& c : curves) mean += c.values.back();
  mean /= static_cast<double>(curves.size());
  double var = 0.0;
  for (const Curve& c : curves) {
    const double d = c.values.back() - mean;
    var += d * d;
  }
  var /= static_cast<double>(curves.size() - 1);
  CHECK(std::abs(var - 1.0) <= 0.05);  // C(1,1) = min(1,1) = 1
}

TEST_CASE("gen_predictors: empirical covariance matches min(s,t)") {
  SynthConfig cfg;
  cfg.n_total = 10000;
  cfg.n_train = 1;
  cfg.grid_size = 5;  // points 0, 1/4, 1/2, 3/4, 1
  cfg.seed = 31337;
  const std::vector<Curve> curves = gen_predictors(cfg);
  const auto cov_at = [&curves](std::size_t p, std::size_t q) {
    double acc = 0.0;
    for (const Curve& c : curves) acc += c.values[p] * c.values[q];
    return acc / static_cast<double>(curves.size());
  };
  CHECK(std::abs(cov_at(1, 1) - 0.25) <= 0.05);  // (0.25, 0.25)
  CHECK(std::abs(cov_at(1, 3) - 0.25) <= 0.05);  // (0.25, 0.75)
  CHECK(std::abs(cov_at(3, 3) - 0.75) <= 0.05);  // (0.75, 0.75)
}

TEST_CASE("beta_star: endpoint values") {
  const Grid g = make_uniform_grid(3);
  const Curve b = beta_star(g);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(b.values.front() - std::numbers::sqrt2 * pi2 / 3.0) <= 1e-12);
  CHECK(std::abs(b.values.back() + 2.0 * std::numbers::sqrt2 / 3.0 * pi2) <= 1e-12);
}

TEST_CASE("beta_star: closed form matches the cosine series in sup norm") {
  const Grid g = make_uniform_grid(128);
  const Curve closed = beta_star(g);
  constexpr int kmax = 100000;
  double worst = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    double acc = 0.0;
    for (int k = 1; k <= kmax; ++k)
      acc += 4.0 * std::numbers::sqrt2 * (k % 2 ? 1.0 : -1.0) *
             std::cos(k * std::numbers::pi * g.points()[p]) /
             (static_cast<double>(k) * k);
    worst = std::max(worst, std::abs(acc - closed.values[p]));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("gen_responses: zero curves and zero noise give zero responses") {
  const Grid g = make_uniform_grid(8);
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(4, 10);
  const std::vector<Curve> curves = predictors_from_coefficients(zeros, g);
  for (double y : gen_responses(curves, beta_star(g), 0.0, 9)) CHECK(y == 0.0);
}

TEST_CASE("gen_responses: noiseless responses equal the quadrature inner product") {
  SynthConfig cfg;
  cfg.n_total = 6;
  cfg.n_train = 3;
  cfg.grid_size = 32;
  cfg.seed = 11;
  const std::vector<Curve> curves = gen_predictors(cfg);
  const Curve beta = beta_star(curves.front().grid);
  const std::vector<double> y = gen_responses(curves, beta, 0.0, cfg.seed);
  for (std::size_t i = 0; i < curves.size(); ++i)
    CHECK(y[i] == l2_inner(curves[i], beta));
}

TEST_CASE("gen_responses: noise variance concentrates at sigma2") {
  SynthConfig cfg;
  cfg.n_total = 10000;
  cfg.n_train = 1;
  cfg.grid_size = 8;
  cfg.modes = 10;
  cfg.seed = 47;
  const std::vector<Curve> curves = gen_predictors(cfg);
  const Curve beta = beta_star(curves.front().grid);
  const std::vector<double> y = gen_responses(curves, beta, 0.5, cfg.seed);
  std::vector<double> eps(y.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    eps[i] = y[i] - l2_inner(curves[i], beta);
    mean += eps[i];
  }
  mean /= static_cast<double>(eps.size());
  double var = 0.0;
  for (double e : eps) var += (e - mean) * (e - mean);
  var /= static_cast<double>(eps.size() - 1);
  CHECK(std::abs(var - 0.5) <= 0.03);
}

TEST_CASE("noise stream is independent of the predictor stream") {
  SynthConfig a;
  a.n_total = 5;
  a.n_train = 2;
  a.grid_size = 16;
  a.seed = 321;
  SynthConfig b = a;
  b.sigma2 = 0.0;
  const auto [train_a, test_a] = make_experiment(a);
  const auto [train_b, test_b] = make_experiment(b);
  // Same curves regardless of sigma2.
  for (std::size_t i = 0; i < train_a.curves.size(); ++i)
    CHECK(train_a.curves[i].values == train_b.curves[i].values);
}

TEST_CASE("make_experiment: default split sizes and order") {
  SynthConfig cfg;  // defaults: 650 total, 550 train
  const auto [train, test] = make_experiment(cfg);
  CHECK(train.curves.size() == 550);
  CHECK(test.curves.size() == 100);

  // Split respects generation order.
  const std::vector<Curve> all = gen_predictors(cfg);
  CHECK(train.curves.front().values == all.front().values);
  CHECK(test.curves.front().values == all[550].values);
  CHECK(test.curves.back().values == all.back().values);
}

TEST_CASE("make_experiment: tiny split is deterministic and disjoint") {
  SynthConfig cfg;
  cfg.n_total = 3;
  cfg.n_train = 2;
  cfg.grid_size = 8;
  cfg.seed = 77;
  const auto [train, test] = make_experiment(cfg);
  REQUIRE(train.curves.size() == 2);
  REQUIRE(test.curves.size() == 1);
  for (const Curve& tr : train.curves) CHECK(tr.values != test.curves[0].values);

  const auto [train2, test2] = make_experiment(cfg);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(train.curves[i].values == train2.curves[i].values);
  CHECK(train.responses == train2.responses);
  CHECK(test.responses == test2.responses);
}

TEST_CASE("make_experiment: responses have mean near zero") {
  SynthConfig cfg;
  cfg.n_total = 4000;
  cfg.n_train = 3999;
  cfg.grid_size = 16;
  cfg.modes = 50;
  cfg.seed = 4242;
  const auto [train, test] = make_experiment(cfg);
  double mean = 0.0;
  for (double y : train.responses) mean += y;
  mean /= static_cast<double>(train.responses.size());
  // Var(Y) ~ signal (~1.65) + noise 0.5; 5 sigma of the mean over 3999.
  CHECK(std::abs(mean) <= 5.0 * std::sqrt(2.2 / 3999.0));
}

TEST_CASE("config validation") {
  SynthConfig bad;
  bad.n_train = bad.n_total;
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  SynthConfig neg;
  neg.sigma2 = -0.1;
  CHECK_THROWS_AS(neg.check(), std::invalid_argument);
  SynthConfig tiny;
  tiny.grid_size = 2;
  CHECK_THROWS_AS(tiny.check(), std::invalid_argument);
}

TEST_CASE("beta_star_h_variant: domain checks and decay limit direction") {
  const Grid g = make_uniform_grid(64);
  CHECK_THROWS_AS(beta_star_h_variant(g, 3.9), std::invalid_argument);
  // For huge decay only the first mode survives: 4 sqrt(2) cos(pi t).
  const Curve huge = beta_star_h_variant(g, 60.0);
  for (std::size_t p = 0; p < g.size(); ++p)
    CHECK(std::abs(huge.values[p] - 4.0 * std::numbers::sqrt2 *
                                        std::cos(std::numbers::pi * g.points()[p])) <=
          1e-12);
}

TEST_CASE("beta_star_h_variant: value at zero matches an eta-series oracle") {
  const Grid g = make_uniform_grid(16);
  for (double decay : {4.0, 4.5, 5.0, 6.0}) {
    const Curve c = beta_star_h_variant(g, decay);
    // Oracle: alternating series summed far past the variant's truncation;
    // the variant keeps 200 terms, so allow its own tail on top of 1e-10.
    double eta = 0.0;
    for (int k = 1; k <= 4000; ++k)
      eta += (k % 2 ? 1.0 : -1.0) * std::pow(static_cast<double>(k), -decay);
    const double tail = std::pow(201.0, -decay);  // alternating series bound
    CHECK(std::abs(c.values.front() - 4.0 * std::numbers::sqrt2 * eta) <=
          1e-10 + 4.0 * std::numbers::sqrt2 * tail);
  }
}

TEST_CASE("beta_star_h_variant: decay 5 has a finite kernel-space norm") {
  // Direct summation oracle for sum_{k<=200} (k pi)^4 f_k^2 with
  // f_k = 4 (-1)^{k-1} k^-5; the tail beyond 200 is below 1e-9.
  double partial = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double fk = 4.0 * std::pow(static_cast<double>(k), -5.0);
    partial += std::pow(k * std::numbers::pi, 4.0) * fk * fk;
  }
  // 16 pi^4 sum k^-6 -> 16 pi^4 zeta(6) = 16 pi^4 pi^6/945.
  const double zeta6 = std::pow(std::numbers::pi, 6.0) / 945.0;
  const double full = 16.0 * std::pow(std::numbers::pi, 4.0) * zeta6;
  CHECK(partial < full);
  CHECK(full - partial <= 1e-6);
}

TEST_CASE("generation determinism: same seed, same datasets") {
  SynthConfig cfg;
  cfg.n_total = 12;
  cfg.n_train = 8;
  cfg.grid_size = 24;
  cfg.seed = 90210;
  const auto [tr1, te1] = make_experiment(cfg);
  const auto [tr2, te2] = make_experiment(cfg);
  CHECK(tr1.responses == tr2.responses);
  CHECK(te1.responses == te2.responses);
  for (std::size_t i = 0; i < tr1.curves.size(); ++i)
    CHECK(tr1.curves[i].values == tr2.curves[i].values);
}
