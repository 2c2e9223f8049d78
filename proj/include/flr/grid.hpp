// SPDX-License-Identifier: Apache-2.0
//
// Quadrature grids on [0,1], sampled curves, and the L2 inner product that
// backs every integral in the library.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace flr {

// An ordered quadrature grid on [0,1] with nonnegative weights summing to 1.
// Grids are immutable and cheap to copy (shared payload); equality is by
// shared identity first, point values second.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<double> points, std::vector<double> weights);

  std::size_t size() const { return data_ ? data_->points.size() : 0; }
  const std::vector<double>& points() const { return data_->points; }
  const std::vector<double>& weights() const { return data_->weights; }

  bool same_as(const Grid& other) const;
  std::uint64_t content_hash() const { return data_ ? data_->hash : 0; }
  bool valid() const { return static_cast<bool>(data_); }

 private:
  struct Data {
    std::vector<double> points;
    std::vector<double> weights;
    std::uint64_t hash = 0;
  };
  std::shared_ptr<const Data> data_;
};

// G equally spaced points 0 = t_0 < ... < t_{G-1} = 1 with composite
// trapezoid weights (h/2, h, ..., h, h/2), h = 1/(G-1). Requires G >= 3.
Grid make_uniform_grid(int size);

// Grid from explicit points (e.g. a dataset file header); weights are the
// general trapezoid weights w_p = (t_{p+1} - t_{p-1})/2 with halved ends.
Grid grid_from_points(std::vector<double> points);

// A functional predictor (or slope function) sampled on a grid.
struct Curve {
  std::vector<double> values;
  Grid grid;
};

// Samples eval at the grid points; throws numeric_error on non-finite values.
Curve curve_from_function(const std::function<double(double)>& eval,
                          const Grid& grid);

// Quadrature inner product sum_p w_p f(t_p) g(t_p). Symmetric to the last
// bit (one summation order, commutative factors). Curves must share a grid.
double l2_inner(const Curve& f, const Curve& g);

// Paired curves and scalar responses on a common grid.
struct Dataset {
  std::vector<Curve> curves;
  std::vector<double> responses;
  Grid grid;

  // Throws std::invalid_argument on count/grid mismatches.
  void check() const;
};

}  // namespace flr
