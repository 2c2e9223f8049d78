// SPDX-License-Identifier: Apache-2.0
#include "flr/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "flr/errors.hpp"
#include "flr/rng.hpp"

namespace flr {

namespace {

void validate_grid(const std::vector<double>& points,
                   const std::vector<double>& weights) {
  if (points.size() != weights.size())
    throw std::invalid_argument("grid: points/weights length mismatch");
  if (points.size() < 2) throw std::invalid_argument("grid: need at least 2 points");
  if (points.front() != 0.0 || points.back() != 1.0)
    throw std::invalid_argument("grid: endpoints must be 0 and 1");
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] < points[i + 1]))
      throw std::invalid_argument("grid: points must be strictly increasing");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("grid: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("grid: weights sum to " + std::to_string(sum) +
                                ", expected 1");
}

}  // namespace

Grid::Grid(std::vector<double> points, std::vector<double> weights) {
  validate_grid(points, weights);
  auto data = std::make_shared<Data>();
  data->hash = fnv1a64(points.data(), points.size() * sizeof(double)) ^
               points.size();
  data->points = std::move(points);
  data->weights = std::move(weights);
  data_ = std::move(data);
}

bool Grid::same_as(const Grid& other) const {
  if (data_ == other.data_) return true;
  if (!data_ || !other.data_) return false;
  return data_->points == other.data_->points;
}

Grid make_uniform_grid(int size) {
  if (size < 3) throw std::invalid_argument("make_uniform_grid: size must be >= 3");
  const double h = 1.0 / static_cast<double>(size - 1);
  std::vector<double> points(size), weights(size);
  for (int i = 0; i < size; ++i)
    points[i] = static_cast<double>(i) / static_cast<double>(size - 1);
  points.front() = 0.0;
  points.back() = 1.0;
  weights.front() = weights.back() = 0.5 * h;
  for (int i = 1; i + 1 < size; ++i) weights[i] = h;
  return Grid(std::move(points), std::move(weights));
}

Grid grid_from_points(std::vector<double> points) {
  if (points.size() < 2)
    throw std::invalid_argument("grid_from_points: need at least 2 points");
  const std::size_t n = points.size();
  std::vector<double> weights(n);
  weights.front() = 0.5 * (points[1] - points[0]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    weights[i] = 0.5 * (points[i + 1] - points[i - 1]);
  weights.back() = 0.5 * (points[n - 1] - points[n - 2]);
  return Grid(std::move(points), std::move(weights));
}

Curve curve_from_function(const std::function<double(double)>& eval,
                          const Grid& grid) {
  Curve c;
  c.grid = grid;
  c.values.resize(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double v = eval(grid.points()[p]);
    if (!std::isfinite(v))
      throw numeric_error("curve_from_function: non-finite value at t=" +
                          std::to_string(grid.points()[p]));
    c.values[p] = v;
  }
  return c;
}

double l2_inner(const Curve& f, const Curve& g) {
  if (!f.grid.same_as(g.grid))
    throw std::invalid_argument("l2_inner: curves on different grids");
  if (f.values.size() != f.grid.size() || g.values.size() != g.grid.size())
    throw std::invalid_argument("l2_inner: curve length does not match grid");
  const auto& w = f.grid.weights();
  double acc = 0.0;
  for (std::size_t p = 0; p < w.size(); ++p) acc += w[p] * (f.values[p] * g.values[p]);
  return acc;
}

void Dataset::check() const {
  if (curves.size() != responses.size())
    throw std::invalid_argument("dataset: curve/response count mismatch");
  if (!grid.valid()) throw std::invalid_argument("dataset: missing grid");
  for (const auto& c : curves) {
    if (!c.grid.same_as(grid))
      throw std::invalid_argument("dataset: curve on a different grid");
    if (c.values.size() != grid.size())
      throw std::invalid_argument("dataset: curve length does not match grid");
  }
}

}  // namespace flr
