// SPDX-License-Identifier: Apache-2.0
#include "flr/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flr {

namespace {

void check_unit_interval(double s, double t, const char* who) {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0))
    throw std::invalid_argument(std::string(who) + ": arguments must lie in [0,1]");
}

}  // namespace

KernelSpec KernelSpec::gaussian(double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("KernelSpec: gaussian gamma must be > 0");
  return {KernelKind::gaussian, gamma};
}

std::string to_string(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::sobolev_bernoulli:
      return "sobolev-bernoulli";
    case KernelKind::gaussian: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "gaussian:gamma=%.17g", spec.gamma);
      return buf;
    }
  }
  throw std::invalid_argument("KernelSpec: unknown kind");
}

KernelSpec parse_kernel(const std::string& text) {
  if (text == "sobolev-bernoulli") return KernelSpec::sobolev_bernoulli();
  for (const char* prefix : {"gaussian:gamma=", "gaussian:\xce\xb3="}) {
    if (text.rfind(prefix, 0) == 0) {
      const std::string num = text.substr(std::string(prefix).size());
      std::size_t used = 0;
      double gamma = 0.0;
      try {
        gamma = std::stod(num, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("parse_kernel: bad gamma in '" + text + "'");
      }
      if (used != num.size())
        throw std::invalid_argument("parse_kernel: bad gamma in '" + text + "'");
      return KernelSpec::gaussian(gamma);
    }
  }
  throw std::invalid_argument("parse_kernel: unknown kernel '" + text + "'");
}

double bernoulli_b2(double x) { return x * x - x + 1.0 / 6.0; }

double bernoulli_b4(double x) {
  const double x2 = x * x;
  return x2 * x2 - 2.0 * x2 * x + x2 - 1.0 / 30.0;
}

double euler_e1(double x) { return x - 0.5; }

double kernel_eval(const KernelSpec& spec, double s, double t) {
  check_unit_interval(s, t, "kernel_eval");
  switch (spec.kind) {
    case KernelKind::sobolev_bernoulli:
      return -(bernoulli_b4(0.5 * (s + t)) + bernoulli_b4(0.5 * std::abs(s - t))) / 3.0;
    case KernelKind::gaussian: {
      const double d = s - t;
      return std::exp(-spec.gamma * d * d);
    }
  }
  throw std::invalid_argument("kernel_eval: unknown kind");
}

double kernel_series(double s, double t, int kmax) {
  if (kmax < 1) throw std::invalid_argument("kernel_series: kmax must be >= 1");
  const double pi = std::numbers::pi;
  double acc = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double kp = static_cast<double>(k) * pi;
    const double kp2 = kp * kp;
    acc += 2.0 / (kp2 * kp2) * std::cos(kp * s) * std::cos(kp * t);
  }
  return acc;
}

CovarianceSpec CovarianceSpec::custom(Eigen::MatrixXd values, Grid grid) {
  if (!grid.valid()) throw std::invalid_argument("CovarianceSpec: missing grid");
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (values.rows() != n || values.cols() != n)
    throw std::invalid_argument("CovarianceSpec: matrix does not match grid size");
  const double scale = values.cwiseAbs().maxCoeff();
  if ((values - values.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1.0))
    throw std::invalid_argument("CovarianceSpec: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (values + values.transpose()),
                                                    Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  if (lo < -1e-10 * std::max(hi, 1.0))
    throw std::invalid_argument("CovarianceSpec: matrix not PSD");
  CovarianceSpec spec;
  spec.kind = CovarianceKind::custom_grid;
  spec.matrix = std::move(values);
  spec.grid = std::move(grid);
  return spec;
}

std::string to_string(const CovarianceSpec& spec) {
  return spec.kind == CovarianceKind::brownian ? "brownian" : "custom-grid";
}

double covariance_eval(const CovarianceSpec& spec, double s, double t) {
  check_unit_interval(s, t, "covariance_eval");
  if (spec.kind != CovarianceKind::brownian)
    throw std::invalid_argument(
        "covariance_eval: pointwise evaluation is only defined for brownian");
  return std::min(s, t);
}

}  // namespace flr
