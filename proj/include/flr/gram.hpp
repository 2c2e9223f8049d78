// SPDX-License-Identifier: Apache-2.0
//
// Double-integral kernel matrices over sets of curves: the full n x n
// matrix, rectangular cross blocks, embedding vectors for prediction, and
// slope reconstruction from representer coefficients.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "flr/grid.hpp"
#include "flr/kernels.hpp"

namespace flr {

// Dense matrix of entries \int\int k(s,t) X_i(s) X_j(t) ds dt under the
// grid's quadrature rule. row_set_id / col_set_id are content hashes of the
// two curve sets; equal ids mean the matrix is symmetric PSD up to roundoff.
struct GramMatrix {
  Eigen::MatrixXd entries;
  std::uint64_t row_set_id = 0;
  std::uint64_t col_set_id = 0;
  KernelSpec kernel;
  Grid grid;
};

// Content hash of a curve set (values only; all curves share a grid).
std::uint64_t curve_set_id(std::span<const Curve> curves);

// The G x G matrix [k(t_p, t_q)], cached per (kernel, grid) pair. The cache
// is filled once and read-only afterwards; returned references stay valid
// for the life of the program. Thread-safe.
const Eigen::MatrixXd& kernel_grid_matrix(const KernelSpec& kernel, const Grid& grid);

// Entry (i,j) is computed as dot(w.*rows[i], K_grid (w.*cols[j])): first the
// G-vector z_j = K_grid (w.*cols[j]) in fixed column order, then a fixed-
// order dot against the weighted row curve. Cost O(G^2 m + G n m); every
// entry depends only on its own row curve, column curve and K_grid, so a
// column subset of a larger assembly is bit-identical to assembling the
// subset directly, and row-parallel assembly is schedule-independent.
GramMatrix gram_cross(std::span<const Curve> rows, std::span<const Curve> cols,
                      const KernelSpec& kernel, int threads = 1);

// gram_cross with rows == cols.
GramMatrix gram_full(std::span<const Curve> data, const KernelSpec& kernel,
                     int threads = 1);

// Component i = \int\int k(s,t) X_i(t) x_new(s) dt ds; equals column i of
// gram_cross(train, {x_new}) bit for bit.
std::vector<double> embed_vector(std::span<const Curve> train, const Curve& x_new,
                                 const KernelSpec& kernel);

// The curve u -> sum_i coeff_i sum_p w_p k(u, t_p) X_i(t_p) sampled on
// out_grid. The inner quadrature uses the curves' grid.
Curve slope_from_coefficients(std::span<const double> coeff,
                              std::span<const Curve> curves,
                              const KernelSpec& kernel, const Grid& out_grid);

}  // namespace flr
