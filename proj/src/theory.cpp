// SPDX-License-Identifier: Apache-2.0
#include "flr/theory.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace flr {

void TheoryParams::check() const {
  if (!(b > 1.0)) throw std::invalid_argument("TheoryParams: b must be > 1");
  if (!(s >= 0.0 && s <= 0.5))
    throw std::invalid_argument("TheoryParams: s must lie in [0, 1/2]");
}

double lambda_rule(long n, const TheoryParams& p) {
  p.check();
  if (n < 1) throw std::invalid_argument("lambda_rule: n must be >= 1");
  const double exponent = -p.b / (1.0 + p.b + 2.0 * p.s * p.b);
  return std::pow(static_cast<double>(n), exponent);
}

long min_subsample(double lambda, const TheoryParams& p, long n) {
  p.check();
  if (!(lambda > 0.0)) throw std::invalid_argument("min_subsample: lambda must be > 0");
  if (n < 1) throw std::invalid_argument("min_subsample: n must be >= 1");
  const double raw = std::pow(lambda, -p.b);
  if (!(raw < static_cast<double>(n)))  // also catches overflow/inf
    return n;
  // Relative nudge so that values within rounding of an integer do not get
  // pushed to the next one (e.g. 0.1^-2 must yield exactly 100).
  const auto m = static_cast<long>(std::ceil(raw * (1.0 - 1e-12)));
  return std::max(1L, std::min(n, m));
}

double empirical_effective_dimension(const GramMatrix& gram, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("empirical_effective_dimension: lambda must be > 0");
  const Eigen::MatrixXd& k = gram.entries;
  if (k.rows() != k.cols())
    throw std::invalid_argument("empirical_effective_dimension: matrix not square");
  const double scale = std::max(k.cwiseAbs().maxCoeff(), 1e-300);
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("empirical_effective_dimension: matrix not symmetric");

  const double n = static_cast<double>(k.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 / n * (k + k.transpose()),
                                                    Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double mu = std::max(0.0, es.eigenvalues()[i]);
    acc += mu / (mu + lambda);
  }
  return acc;
}

Rates predicted_rates(long n, const TheoryParams& p) {
  p.check();
  if (n < 1) throw std::invalid_argument("predicted_rates: n must be >= 1");
  const double denom = 1.0 + p.b + 2.0 * p.s * p.b;
  Rates r;
  r.prediction_rate =
      std::pow(static_cast<double>(n), -p.b * (1.0 + 2.0 * p.s) / (2.0 * denom));
  r.estimation_rate = std::pow(static_cast<double>(n), -p.b * p.s / denom);
  return r;
}

}  // namespace flr
