// SPDX-License-Identifier: Apache-2.0
#include "flr/gram.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>

#include "flr/detail/dotsum.hpp"
#include "flr/errors.hpp"
#include "flr/rng.hpp"

namespace flr {

namespace {

using Eigen::MatrixXd;

const Grid& common_grid(std::span<const Curve> rows, std::span<const Curve> cols,
                        const char* who) {
  if (rows.empty() || cols.empty())
    throw std::invalid_argument(std::string(who) + ": empty curve set");
  const Grid& grid = rows.front().grid;
  for (const auto& c : rows)
    if (!c.grid.same_as(grid) || c.values.size() != grid.size())
      throw std::invalid_argument(std::string(who) + ": curve grid mismatch");
  for (const auto& c : cols)
    if (!c.grid.same_as(grid) || c.values.size() != grid.size())
      throw std::invalid_argument(std::string(who) + ": curve grid mismatch");
  return grid;
}

// Weighted curve matrix: column i = w .* curve_i, G x n.
MatrixXd weighted_columns(std::span<const Curve> curves, const Grid& grid) {
  const auto g = static_cast<Eigen::Index>(grid.size());
  const auto& w = grid.weights();
  MatrixXd bw(g, static_cast<Eigen::Index>(curves.size()));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    double* out = bw.col(static_cast<Eigen::Index>(i)).data();
    const double* v = curves[i].values.data();
    for (Eigen::Index p = 0; p < g; ++p) out[p] = w[p] * v[p];
  }
  return bw;
}

// z_j = K_grid * bw_j accumulated column by column of K_grid in fixed order.
void apply_kernel_grid(const MatrixXd& kgrid, const double* bw, double* z) {
  const Eigen::Index g = kgrid.rows();
  for (Eigen::Index p = 0; p < g; ++p) z[p] = 0.0;
  for (Eigen::Index q = 0; q < g; ++q)
    detail::axpy_ordered(bw[q], kgrid.col(q).data(), z, static_cast<std::size_t>(g));
}

// Chunked parallel loop; each worker owns a contiguous index range so the
// result layout never depends on scheduling.
void parallel_chunks(Eigen::Index count, int threads,
                     const std::function<void(Eigen::Index, Eigen::Index)>& body) {
  if (threads <= 1 || count < 2) {
    body(0, count);
    return;
  }
  const int used = static_cast<int>(std::min<Eigen::Index>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(used);
  const Eigen::Index chunk = (count + used - 1) / used;
  for (int t = 0; t < used; ++t) {
    const Eigen::Index lo = t * chunk;
    const Eigen::Index hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& th : pool) th.join();
}

struct GridKernelCache {
  std::mutex mu;
  std::unordered_map<std::string, std::shared_ptr<const MatrixXd>> entries;
};

GridKernelCache& cache() {
  static GridKernelCache c;
  return c;
}

}  // namespace

std::uint64_t curve_set_id(std::span<const Curve> curves) {
  std::uint64_t h = fnv1a64(nullptr, 0) ^ curves.size();
  for (const auto& c : curves)
    h = fnv1a64(c.values.data(), c.values.size() * sizeof(double), h);
  return h;
}

const MatrixXd& kernel_grid_matrix(const KernelSpec& kernel, const Grid& grid) {
  char keybuf[32];
  std::snprintf(keybuf, sizeof keybuf, "#%016llx",
                static_cast<unsigned long long>(grid.content_hash()));
  const std::string key = to_string(kernel) + keybuf + "/" + std::to_string(grid.size());

  auto& c = cache();
  {
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.entries.find(key);
    if (it != c.entries.end()) return *it->second;
  }
  const auto g = static_cast<Eigen::Index>(grid.size());
  auto fresh = std::make_shared<MatrixXd>(g, g);
  const auto& t = grid.points();
  for (Eigen::Index p = 0; p < g; ++p) {
    for (Eigen::Index q = p; q < g; ++q) {
      const double v = kernel_eval(kernel, t[p], t[q]);
      (*fresh)(p, q) = v;
      (*fresh)(q, p) = v;
    }
  }
  std::lock_guard<std::mutex> lock(c.mu);
  auto [it, inserted] = c.entries.emplace(key, std::move(fresh));
  return *it->second;
}

GramMatrix gram_cross(std::span<const Curve> rows, std::span<const Curve> cols,
                      const KernelSpec& kernel, int threads) {
  const Grid& grid = common_grid(rows, cols, "gram_cross");
  const MatrixXd& kgrid = kernel_grid_matrix(kernel, grid);
  const auto g = static_cast<Eigen::Index>(grid.size());
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(cols.size());

  const MatrixXd bw_rows = weighted_columns(rows, grid);
  const MatrixXd bw_cols = weighted_columns(cols, grid);

  MatrixXd z(g, m);
  parallel_chunks(m, threads, [&](Eigen::Index lo, Eigen::Index hi) {
    for (Eigen::Index j = lo; j < hi; ++j)
      apply_kernel_grid(kgrid, bw_cols.col(j).data(), z.col(j).data());
  });

  GramMatrix out;
  out.entries.resize(n, m);
  parallel_chunks(n, threads, [&](Eigen::Index lo, Eigen::Index hi) {
    for (Eigen::Index i = lo; i < hi; ++i) {
      const double* bwi = bw_rows.col(i).data();
      for (Eigen::Index j = 0; j < m; ++j)
        out.entries(i, j) =
            detail::dot_ordered(bwi, z.col(j).data(), static_cast<std::size_t>(g));
    }
  });

  if (!out.entries.allFinite())
    throw numeric_error("gram_cross: non-finite entry in assembled matrix");

  out.row_set_id = curve_set_id(rows);
  out.col_set_id = (rows.data() == cols.data() && rows.size() == cols.size())
                       ? out.row_set_id
                       : curve_set_id(cols);
  out.kernel = kernel;
  out.grid = grid;
  return out;
}

GramMatrix gram_full(std::span<const Curve> data, const KernelSpec& kernel,
                     int threads) {
  return gram_cross(data, data, kernel, threads);
}

std::vector<double> embed_vector(std::span<const Curve> train, const Curve& x_new,
                                 const KernelSpec& kernel) {
  const Curve* one = &x_new;
  GramMatrix col = gram_cross(train, std::span<const Curve>(one, 1), kernel);
  std::vector<double> out(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    out[i] = col.entries(static_cast<Eigen::Index>(i), 0);
  return out;
}

Curve slope_from_coefficients(std::span<const double> coeff,
                              std::span<const Curve> curves,
                              const KernelSpec& kernel, const Grid& out_grid) {
  if (coeff.size() != curves.size())
    throw std::invalid_argument("slope_from_coefficients: coefficient count mismatch");
  if (curves.empty())
    throw std::invalid_argument("slope_from_coefficients: empty curve set");
  const Grid& grid = common_grid(curves, curves, "slope_from_coefficients");
  if (!out_grid.valid())
    throw std::invalid_argument("slope_from_coefficients: missing output grid");

  // Combine first: gw = w .* sum_i coeff_i X_i, then one kernel quadrature
  // per output point.
  const auto g = static_cast<Eigen::Index>(grid.size());
  std::vector<double> gw(static_cast<std::size_t>(g), 0.0);
  for (std::size_t i = 0; i < curves.size(); ++i)
    detail::axpy_ordered(coeff[i], curves[i].values.data(), gw.data(),
                         static_cast<std::size_t>(g));
  const auto& w = grid.weights();
  for (Eigen::Index p = 0; p < g; ++p) gw[p] *= w[p];

  Curve out;
  out.grid = out_grid;
  out.values.resize(out_grid.size());
  const auto& t_in = grid.points();
  const auto& t_out = out_grid.points();
  std::vector<double> krow(static_cast<std::size_t>(g));
  for (std::size_t u = 0; u < out_grid.size(); ++u) {
    for (Eigen::Index p = 0; p < g; ++p)
      krow[p] = kernel_eval(kernel, t_out[u], t_in[p]);
    out.values[u] = detail::dot_ordered(krow.data(), gw.data(),
                                        static_cast<std::size_t>(g));
    if (!std::isfinite(out.values[u]))
      throw numeric_error("slope_from_coefficients: non-finite slope value");
  }
  return out;
}

}  // namespace flr
