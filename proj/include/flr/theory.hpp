// SPDX-License-Identifier: Apache-2.0
//
// Parameter rules from the convergence analysis (regularization level,
// minimal subsample size, predicted rates) and the empirical effective
// dimension diagnostic.
#pragma once

#include "flr/gram.hpp"

namespace flr {

// b > 1: eigenvalue decay exponent of the population operator;
// s in [0, 1/2]: source-condition smoothness of the target.
struct TheoryParams {
  double b = 2.0;
  double s = 0.0;

  void check() const;  // throws std::invalid_argument
};

// lambda(n) = n^(-b / (1 + b + 2 s b)). The formula is applied as-is; the
// underlying analysis also wants lambda above an n-dependent floor whose
// constant is not available, so no clamping is attempted here.
double lambda_rule(long n, const TheoryParams& p);

// Smallest m with m^(-1/b) <= lambda (implied constant 1), capped at n:
// min(n, ceil(lambda^-b)). Requires lambda > 0.
long min_subsample(double lambda, const TheoryParams& p, long n);

// sum_i mu_i / (mu_i + lambda) over the eigenvalues mu_i of (1/n) K,
// clipped at zero from below. A diagnostic estimate of the effective
// dimension computed from the empirical Gram spectrum, not an estimator
// with guarantees. Requires a square symmetric input.
double empirical_effective_dimension(const GramMatrix& gram, double lambda);

struct Rates {
  double prediction_rate = 1.0;  // n^(-b(1+2s) / (2(1+b+2sb)))
  double estimation_rate = 1.0;  // n^(-bs / (1+b+2sb))
};

Rates predicted_rates(long n, const TheoryParams& p);

}  // namespace flr
