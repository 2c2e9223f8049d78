// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <vector>

#include "flr/errors.hpp"
#include "flr/gram.hpp"
#include "flr/grid.hpp"
#include "flr/kernels.hpp"

using namespace flr;

namespace {

// Naive quadruple-loop quadrature oracle for a single entry, O(G^2) per
// pair, organized differently from the production path on purpose.
double entry_oracle(const Curve& a, const Curve& b, const KernelSpec& kernel) {
  const auto& t = a.grid.points();
  const auto& w = a.grid.weights();
  double acc = 0.0;
  for (std::size_t p = 0; p < t.size(); ++p)
    for (std::size_t q = 0; q < t.size(); ++q)
      acc += w[p] * w[q] * kernel_eval(kernel, t[p], t[q]) * a.values[p] * b.values[q];
  return acc;
}

std::vector<Curve> random_curves(int n, const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<Curve> out(static_cast<std::size_t>(n));
  for (auto& c : out) {
    c.grid = grid;
    c.values.resize(grid.size());
    for (auto& v : c.values) v = u(eng);
  }
  return out;
}

}  // namespace

TEST_CASE("gram_full: constant curve annihilates the cosine kernel") {
  const Grid g = make_uniform_grid(256);
  const std::vector<Curve> one{curve_from_function([](double) { return 1.0; }, g)};
  const GramMatrix m = gram_full(one, KernelSpec::sobolev_bernoulli());
  CHECK(std::abs(m.entries(0, 0)) <= 1e-10);
  // Refined-grid confirmation that the integral really is 0.
  const Grid fine = make_uniform_grid(2049);
  const std::vector<Curve> onef{curve_from_function([](double) { return 1.0; }, fine)};
  const GramMatrix mf = gram_full(onef, KernelSpec::sobolev_bernoulli());
  CHECK(std::abs(mf.entries(0, 0)) <= 1e-12);
}

TEST_CASE("gram_full: duplicated curve gives equal entries") {
  const Grid g = make_uniform_grid(64);
  const Curve x = curve_from_function([](double t) { return std::sin(3.0 * t) + t; }, g);
  const std::vector<Curve> pair{x, x};
  const GramMatrix m = gram_full(pair, KernelSpec::sobolev_bernoulli());
  CHECK(m.entries(0, 0) == m.entries(0, 1));
  CHECK(m.entries(0, 0) == m.entries(1, 0));
  CHECK(m.entries(0, 0) == m.entries(1, 1));
}

TEST_CASE("gram_full: matches the quadruple-loop oracle") {
  const Grid g = make_uniform_grid(48);
  const std::vector<Curve> curves = random_curves(5, g, 101);
  const KernelSpec kernel = KernelSpec::sobolev_bernoulli();
  const GramMatrix m = gram_full(curves, kernel);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(std::abs(m.entries(i, j) - entry_oracle(curves[i], curves[j], kernel)) <=
            1e-10);
}

TEST_CASE("gram oracle equivalence across small instances") {
  std::mt19937_64 eng(5);
  for (const KernelSpec& kernel :
       {KernelSpec::sobolev_bernoulli(), KernelSpec::gaussian(4.0)}) {
    for (int inst = 0; inst < 4; ++inst) {
      const int n = 1 + static_cast<int>(eng() % 6);
      const int gsz = 8 + static_cast<int>(eng() % 57);
      const Grid g = make_uniform_grid(gsz);
      const std::vector<Curve> curves = random_curves(n, g, eng());
      const GramMatrix m = gram_full(curves, kernel);
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          worst = std::max(worst, std::abs(m.entries(i, j) -
                                           entry_oracle(curves[i], curves[j], kernel)));
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("gram_cross: rows as columns reproduces gram_full bit for bit") {
  const Grid g = make_uniform_grid(96);
  const std::vector<Curve> curves = random_curves(7, g, 23);
  const KernelSpec kernel = KernelSpec::sobolev_bernoulli();
  const GramMatrix full = gram_full(curves, kernel);
  const GramMatrix cross = gram_cross(curves, curves, kernel);
  CHECK(full.entries == cross.entries);
  CHECK(full.row_set_id == cross.col_set_id);
}

TEST_CASE("gram_cross: column subset is a bit-identical slice of gram_full") {
  // Odd grid size on purpose: column alignments differ between the sliced
  // and the standalone layout, which the fixed-order path must not see.
  const Grid g = make_uniform_grid(101);
  const std::vector<Curve> curves = random_curves(9, g, 37);
  const KernelSpec kernel = KernelSpec::sobolev_bernoulli();
  const GramMatrix full = gram_full(curves, kernel);

  const std::vector<int> subset{1, 4, 8};
  std::vector<Curve> cols;
  for (int i : subset) cols.push_back(curves[static_cast<std::size_t>(i)]);
  const GramMatrix cross = gram_cross(curves, cols, kernel);

  for (int i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < subset.size(); ++j)
      CHECK(cross.entries(i, static_cast<Eigen::Index>(j)) ==
            full.entries(i, subset[j]));
}

TEST_CASE("gram_cross: rectangular case matches the oracle") {
  const Grid g = make_uniform_grid(33);
  const std::vector<Curve> rows = random_curves(3, g, 41);
  const std::vector<Curve> cols = random_curves(2, g, 43);
  const KernelSpec kernel = KernelSpec::gaussian(1.5);
  const GramMatrix m = gram_cross(rows, cols, kernel);
  REQUIRE(m.entries.rows() == 3);
  REQUIRE(m.entries.cols() == 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(m.entries(i, j) - entry_oracle(rows[i], cols[j], kernel)) <= 1e-10);
}

TEST_CASE("gram: grid mismatch is rejected") {
  const std::vector<Curve> a = random_curves(2, make_uniform_grid(16), 3);
  const std::vector<Curve> b = random_curves(2, make_uniform_grid(17), 3);
  CHECK_THROWS_AS(gram_cross(a, b, KernelSpec::sobolev_bernoulli()),
                  std::invalid_argument);
}

TEST_CASE("gram: non-finite curves are a numeric error") {
  const Grid g = make_uniform_grid(8);
  std::vector<Curve> bad = random_curves(2, g, 7);
  bad[1].values[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(gram_full(bad, KernelSpec::sobolev_bernoulli()), numeric_error);
}

TEST_CASE("gram_full: symmetric and PSD on random instances") {
  std::mt19937_64 eng(71);
  for (int inst = 0; inst < 20; ++inst) {
    const int n = 2 + static_cast<int>(eng() % 10);
    const Grid g = make_uniform_grid(24 + static_cast<int>(eng() % 40));
    const KernelSpec kernel =
        inst % 2 ? KernelSpec::gaussian(0.5 + (inst % 5)) : KernelSpec::sobolev_bernoulli();
    const GramMatrix m = gram_full(random_curves(n, g, eng()), kernel);
    const double scale = m.entries.cwiseAbs().maxCoeff();
    CHECK((m.entries - m.entries.transpose()).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(scale, 1e-30));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (m.entries + m.entries.transpose()), Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * top);
  }
}

TEST_CASE("gram_full: scaling one curve scales its row and column") {
  const Grid g = make_uniform_grid(40);
  std::vector<Curve> curves = random_curves(4, g, 53);
  const KernelSpec kernel = KernelSpec::sobolev_bernoulli();
  const GramMatrix base = gram_full(curves, kernel);
  const double c = -2.5;
  for (auto& v : curves[2].values) v *= c;
  const GramMatrix scaled = gram_full(curves, kernel);
  const double scale = base.entries.cwiseAbs().maxCoeff();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double expect = base.entries(i, j);
      if (i == 2) expect *= c;
      if (j == 2) expect *= c;
      CHECK(std::abs(scaled.entries(i, j) - expect) <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("gram assembly is schedule independent") {
  const Grid g = make_uniform_grid(129);
  const std::vector<Curve> curves = random_curves(13, g, 97);
  const KernelSpec kernel = KernelSpec::sobolev_bernoulli();
  const GramMatrix serial = gram_full(curves, kernel, 1);
  const GramMatrix parallel = gram_full(curves, kernel, 4);
  CHECK(serial.entries == parallel.entries);
}

TEST_CASE("embed_vector: training curve reproduces its gram column and row") {
  const Grid g = make_uniform_grid(65);
  const std::vector<Curve> curves = random_curves(6, g, 19);
  const KernelSpec kernel = KernelSpec::sobolev_bernoulli();
  const GramMatrix full = gram_full(curves, kernel);
  const std::vector<double> e = embed_vector(curves, curves[3], kernel);
  const double scale = full.entries.cwiseAbs().maxCoeff();
  for (int i = 0; i < 6; ++i) {
    CHECK(e[static_cast<std::size_t>(i)] == full.entries(i, 3));  // same path
    CHECK(std::abs(e[static_cast<std::size_t>(i)] - full.entries(3, i)) <=
          1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("embed_vector: zero curve embeds to zero") {
  const Grid g = make_uniform_grid(32);
  const std::vector<Curve> curves = random_curves(4, g, 29);
  const Curve zero = curve_from_function([](double) { return 0.0; }, g);
  for (double v : embed_vector(curves, zero, KernelSpec::sobolev_bernoulli()))
    CHECK(v == 0.0);
}

TEST_CASE("embed_vector: random case matches the oracle") {
  const Grid g = make_uniform_grid(40);
  const std::vector<Curve> curves = random_curves(5, g, 31);
  const std::vector<Curve> probe = random_curves(1, g, 33);
  const KernelSpec kernel = KernelSpec::gaussian(2.0);
  const std::vector<double> e = embed_vector(curves, probe[0], kernel);
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs(e[static_cast<std::size_t>(i)] -
                   entry_oracle(curves[i], probe[0], kernel)) <= 1e-10);
}

TEST_CASE("slope_from_coefficients: zero coefficients give the zero curve") {
  const Grid g = make_uniform_grid(24);
  const std::vector<Curve> curves = random_curves(3, g, 59);
  const std::vector<double> coeff(3, 0.0);
  const Curve slope =
      slope_from_coefficients(coeff, curves, KernelSpec::sobolev_bernoulli(), g);
  for (double v : slope.values) CHECK(v == 0.0);
}

TEST_CASE("slope_from_coefficients: single curve vs refined-grid oracle") {
  const Grid g = make_uniform_grid(257);
  const Curve x = curve_from_function([](double t) { return std::cos(2.1 * t) + 0.3 * t; }, g);
  const KernelSpec kernel = KernelSpec::sobolev_bernoulli();
  const std::vector<Curve> curves{x};
  const std::vector<double> coeff{1.0};
  const Grid out = make_uniform_grid(17);
  const Curve slope = slope_from_coefficients(coeff, curves, kernel, out);

  // Oracle: same integral on a much finer inner grid.
  const Grid fine = make_uniform_grid(8193);
  const Curve xf = curve_from_function([](double t) { return std::cos(2.1 * t) + 0.3 * t; }, fine);
  for (std::size_t u = 0; u < out.size(); ++u) {
    double acc = 0.0;
    for (std::size_t p = 0; p < fine.size(); ++p)
      acc += fine.weights()[p] * kernel_eval(kernel, out.points()[u], fine.points()[p]) *
             xf.values[p];
    CHECK(std::abs(slope.values[u] - acc) <= 1e-7);
  }
}

TEST_CASE("slope_from_coefficients: linear in the coefficients") {
  const Grid g = make_uniform_grid(48);
  const std::vector<Curve> curves = random_curves(4, g, 61);
  const KernelSpec kernel = KernelSpec::sobolev_bernoulli();
  std::vector<double> a{0.3, -1.0, 0.7, 2.0}, b{1.1, 0.4, -0.2, -0.5}, ab(4);
  for (std::size_t i = 0; i < 4; ++i) ab[i] = a[i] + b[i];
  const Curve sa = slope_from_coefficients(a, curves, kernel, g);
  const Curve sb = slope_from_coefficients(b, curves, kernel, g);
  const Curve sab = slope_from_coefficients(ab, curves, kernel, g);
  for (std::size_t p = 0; p < g.size(); ++p)
    CHECK(std::abs(sab.values[p] - (sa.values[p] + sb.values[p])) <= 1e-12);
}

TEST_CASE("slope_from_coefficients: length mismatch is rejected") {
  const Grid g = make_uniform_grid(8);
  const std::vector<Curve> curves = random_curves(3, g, 67);
  const std::vector<double> coeff{1.0, 2.0};
  CHECK_THROWS_AS(
      slope_from_coefficients(coeff, curves, KernelSpec::sobolev_bernoulli(), g),
      std::invalid_argument);
}

TEST_CASE("kernel_grid_matrix: cached object is reused") {
  const Grid g = make_uniform_grid(21);
  const KernelSpec kernel = KernelSpec::gaussian(1.25);
  const Eigen::MatrixXd& a = kernel_grid_matrix(kernel, g);
  const Eigen::MatrixXd& b = kernel_grid_matrix(kernel, g);
  CHECK(&a == &b);
  // A value-equal grid built independently hits the same cache entry.
  const Grid g2 = grid_from_points(g.points());
  CHECK(&kernel_grid_matrix(kernel, g2) == &a);
}
