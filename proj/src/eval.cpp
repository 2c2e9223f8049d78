// SPDX-License-Identifier: Apache-2.0
#include "flr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "flr/detail/dotsum.hpp"
#include "flr/errors.hpp"
#include "flr/io.hpp"
#include "flr/rng.hpp"

namespace flr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rms_gap(std::span<const double> pred, std::span<const double> target) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

std::vector<double> test_targets(const Dataset& test, const Curve* beta_true) {
  if (!beta_true) return test.responses;
  std::vector<double> t(test.curves.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = l2_inner(*beta_true, test.curves[i]);
  return t;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double rmse(const FittedModel& model, const Dataset& test, const Curve* beta_true) {
  test.check();
  if (test.curves.empty()) throw std::invalid_argument("rmse: empty test set");
  if (beta_true && !beta_true->grid.same_as(test.grid))
    throw std::invalid_argument("rmse: beta_true not on the test grid");
  const std::vector<double> preds = predict_many(model, test.curves);
  const std::vector<double> targets = test_targets(test, beta_true);
  return rms_gap(preds, targets);
}

double l2_slope_error(const FittedModel& model, const Curve& beta_true) {
  const Curve slope = reconstruct_slope(model, beta_true.grid);
  Curve diff = slope;
  for (std::size_t p = 0; p < diff.values.size(); ++p)
    diff.values[p] -= beta_true.values[p];
  return std::sqrt(std::max(0.0, l2_inner(diff, diff)));
}

double prediction_seminorm_error(const FittedModel& model, const Curve& beta_true,
                                 const CovarianceSpec& cov) {
  const Grid& grid = beta_true.grid;
  if (cov.kind == CovarianceKind::custom_grid && !cov.grid.same_as(grid))
    throw std::invalid_argument(
        "prediction_seminorm_error: covariance grid does not match beta grid");

  const Curve slope = reconstruct_slope(model, grid);
  const auto g = grid.size();
  const auto& w = grid.weights();
  const auto& t = grid.points();
  std::vector<double> wd(g);
  for (std::size_t p = 0; p < g; ++p)
    wd[p] = w[p] * (slope.values[p] - beta_true.values[p]);

  double quad = 0.0;
  for (std::size_t p = 0; p < g; ++p) {
    double row = 0.0;
    if (cov.kind == CovarianceKind::brownian) {
      for (std::size_t q = 0; q < g; ++q) row += std::min(t[p], t[q]) * wd[q];
    } else {
      for (std::size_t q = 0; q < g; ++q)
        row += cov.matrix(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) *
               wd[q];
    }
    quad += wd[p] * row;
  }
  return std::sqrt(std::max(0.0, quad));
}

std::vector<double> lambda_grid_log(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > 0.0) || lo > hi)
    throw std::invalid_argument("lambda_grid_log: need 0 < lo <= hi");
  if (points < 1) throw std::invalid_argument("lambda_grid_log: points must be >= 1");
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * static_cast<double>(i) / (points - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<int> m_grid_linear(int lo, int hi, int points) {
  if (lo < 1 || lo > hi) throw std::invalid_argument("m_grid_linear: need 1 <= lo <= hi");
  if (points < 1) throw std::invalid_argument("m_grid_linear: points must be >= 1");
  std::vector<int> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double x =
        points == 1 ? lo
                    : lo + (static_cast<double>(hi) - lo) * i / static_cast<double>(points - 1);
    const int v = static_cast<int>(std::lround(x));
    if (grid.empty() || grid.back() != v) grid.push_back(v);
  }
  return grid;
}

void SweepSpec::check() const {
  if (!(lambda_min > 0.0) || lambda_min > lambda_max)
    throw std::invalid_argument("SweepSpec: need 0 < lambda_min <= lambda_max");
  if (m_min < 1 || m_min > m_max)
    throw std::invalid_argument("SweepSpec: need 1 <= m_min <= m_max");
  if (lambda_points < 1 || m_points < 1)
    throw std::invalid_argument("SweepSpec: grid points must be >= 1");
  if (reps < 1) throw std::invalid_argument("SweepSpec: reps must be >= 1");
  if (threads < 1) throw std::invalid_argument("SweepSpec: threads must be >= 1");
}

std::uint64_t sweep_cell_seed(std::uint64_t base_seed, std::size_t cell, int rep) {
  std::uint64_t h = splitmix64(base_seed);
  h ^= splitmix64(0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(cell) + 1));
  h ^= splitmix64(0xC2B2AE3D27D4EB4Full * (static_cast<std::uint64_t>(rep) + 1));
  return splitmix64(h);
}

SweepResult run_sweep(const Dataset& train, const Dataset& test,
                      const KernelSpec& kernel, const SweepSpec& spec,
                      const Curve* beta_true) {
  train.check();
  test.check();
  spec.check();
  const int n = static_cast<int>(train.curves.size());
  if (spec.m_max > n)
    throw std::invalid_argument("run_sweep: m_max exceeds the training size");
  if (test.curves.empty()) throw std::invalid_argument("run_sweep: empty test set");
  if (beta_true && !beta_true->grid.same_as(test.grid))
    throw std::invalid_argument("run_sweep: beta_true not on the test grid");

  const std::vector<int> m_grid = m_grid_linear(spec.m_min, spec.m_max, spec.m_points);
  const std::vector<double> l_grid =
      lambda_grid_log(spec.lambda_min, spec.lambda_max, spec.lambda_points);

  // Shared precomputation. Entries of these matrices are bit-identical to
  // what a per-cell gram_cross would produce, so slicing them inside a cell
  // reproduces a standalone fit_nystrom exactly.
  const GramMatrix k_full = gram_full(train.curves, kernel, spec.threads);
  const GramMatrix embed_all = gram_cross(train.curves, test.curves, kernel, spec.threads);
  const std::vector<double> targets = test_targets(test, beta_true);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = train.responses[static_cast<std::size_t>(i)];
  const auto n_test = static_cast<Eigen::Index>(test.curves.size());

  const std::size_t n_cells = m_grid.size() * l_grid.size();
  SweepResult result;
  result.rows.resize(n_cells);
  std::atomic<std::size_t> next_cell{0};
  std::atomic<int> failed{0};

  auto worker = [&]() {
    std::vector<double> cell_rmse;
    std::vector<double> preds(static_cast<std::size_t>(n_test));
    for (;;) {
      const std::size_t cell = next_cell.fetch_add(1);
      if (cell >= n_cells) return;
      const std::size_t mi = cell / l_grid.size();
      const std::size_t li = cell % l_grid.size();
      const int m = m_grid[mi];
      const double lambda = l_grid[li];

      // Cell seed index: m-major over the produced grid.
      const std::size_t seed_cell = mi * l_grid.size() + li;

      cell_rmse.clear();
      bool cell_failed = false;
      for (int rep = 0; rep < spec.reps; ++rep) {
        const std::uint64_t seed = sweep_cell_seed(spec.base_seed, seed_cell, rep);
        const std::vector<int> idx = subsample_uniform(n, m, seed);

        MatrixXd k_nm(n, m);
        MatrixXd k_mm(m, m);
        for (int j = 0; j < m; ++j) {
          k_nm.col(j) = k_full.entries.col(idx[static_cast<std::size_t>(j)]);
          for (int i = 0; i < m; ++i)
            k_mm(i, j) = k_full.entries(idx[static_cast<std::size_t>(i)],
                                        idx[static_cast<std::size_t>(j)]);
        }
        try {
          const VectorXd coeff =
              detail::solve_nystrom_system(k_nm, k_mm, y, lambda, spec.jitter);
          // Predictions: dot(coeff, embed_all(idx, t)) with the same fixed
          // order as predict_many, via a gathered contiguous column.
          std::vector<double> embed_col(static_cast<std::size_t>(m));
          for (Eigen::Index t = 0; t < n_test; ++t) {
            for (int j = 0; j < m; ++j)
              embed_col[static_cast<std::size_t>(j)] =
                  embed_all.entries(idx[static_cast<std::size_t>(j)], t);
            preds[static_cast<std::size_t>(t)] = detail::dot_ordered(
                coeff.data(), embed_col.data(), static_cast<std::size_t>(m));
          }
          cell_rmse.push_back(rms_gap(preds, targets));
        } catch (const numeric_error&) {
          failed.fetch_add(1);
          cell_failed = true;
        }
      }

      SweepRow& row = result.rows[cell];
      row.m = m;
      row.lambda = lambda;
      row.reps = spec.reps;
      if (cell_failed || cell_rmse.empty()) {
        row.mean_rmse = kNaN;
        row.std_rmse = kNaN;
      } else {
        double mean = 0.0;
        for (double v : cell_rmse) mean += v;
        mean /= static_cast<double>(cell_rmse.size());
        double var = 0.0;
        for (double v : cell_rmse) var += (v - mean) * (v - mean);
        row.mean_rmse = mean;
        row.std_rmse = cell_rmse.size() > 1
                           ? std::sqrt(var / static_cast<double>(cell_rmse.size() - 1))
                           : 0.0;
      }
    }
  };

  if (spec.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < spec.threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.failed_fits = failed.load();
  return result;
}

BenchResult run_bench(std::span<const long> train_sizes, int m, int reps,
                      const KernelSpec& kernel, double lambda, std::uint64_t seed,
                      int threads, long full_size_cap) {
  if (train_sizes.empty()) throw std::invalid_argument("run_bench: no sizes");
  for (long n : train_sizes)
    if (n < 1) throw std::invalid_argument("run_bench: sizes must be positive");
  const long n_min = *std::min_element(train_sizes.begin(), train_sizes.end());
  if (m < 1 || m > n_min)
    throw std::invalid_argument("run_bench: need 1 <= m <= min(sizes)");
  if (reps < 1) throw std::invalid_argument("run_bench: reps must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("run_bench: lambda must be > 0");

  using clock = std::chrono::steady_clock;
  BenchResult result;
  result.threads = threads;
  const RidgeConfig cfg{lambda, JitterPolicy{}};

  for (long n : train_sizes) {
    SynthConfig synth_cfg;
    synth_cfg.n_total = static_cast<int>(n) + 1;  // generator needs train < total
    synth_cfg.n_train = static_cast<int>(n);
    synth_cfg.seed = splitmix64(seed ^ static_cast<std::uint64_t>(n));
    std::vector<Curve> curves = gen_predictors(synth_cfg);
    curves.resize(static_cast<std::size_t>(n));
    const Grid grid = curves.front().grid;
    const Curve beta = beta_star(grid);
    Dataset train;
    train.grid = grid;
    train.responses = gen_responses(curves, beta, synth_cfg.sigma2, synth_cfg.seed);
    train.curves = std::move(curves);

    // Shared fixed cost, excluded from the timed region.
    kernel_grid_matrix(kernel, grid);

    VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < y.size(); ++i)
      y[i] = train.responses[static_cast<std::size_t>(i)];

    if (full_size_cap == 0 || n <= full_size_cap) {
      std::vector<double> times;
      FittedModel model;
      for (int r = 0; r < reps; ++r) {
        const auto t0 = clock::now();
        model = fit_full(train, kernel, cfg, threads);
        const auto t1 = clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      // Residual of the (deterministic) fit, computed outside the timing.
      const GramMatrix k = gram_full(train.curves, kernel, threads);
      MatrixXd system = k.entries;
      system.diagonal().array() += lambda * static_cast<double>(n);
      const double residual = (system * model.coeff - y).norm() / y.norm();
      result.rows.push_back(
          {"full", n, static_cast<int>(n), median_of(times), residual});
    }

    {
      std::vector<double> times;
      FittedModel model;
      std::uint64_t fit_seed = 0;
      for (int r = 0; r < reps; ++r) {
        fit_seed = splitmix64(seed ^ (static_cast<std::uint64_t>(n) * 0x9E3779B9ull) ^
                              static_cast<std::uint64_t>(r));
        const auto t0 = clock::now();
        model = fit_nystrom(train, kernel, cfg, m, fit_seed, threads);
        const auto t1 = clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      const GramMatrix k_nm = gram_cross(train.curves, model.basis_curves, kernel, threads);
      const GramMatrix k_mm =
          gram_cross(model.basis_curves, model.basis_curves, kernel, threads);
      MatrixXd system = k_nm.entries.transpose() * k_nm.entries;
      system.noalias() += (lambda * static_cast<double>(n)) * k_mm.entries;
      const VectorXd rhs = k_nm.entries.transpose() * y;
      const double residual = (system * model.coeff - rhs).norm() / rhs.norm();
      result.rows.push_back({"nystrom", n, m, median_of(times), residual});
    }
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  if (result.rows.empty()) throw std::invalid_argument("write_sweep_csv: empty result");
  std::ofstream out(path);
  if (!out) throw io_error("write_sweep_csv: cannot open " + path);
  out << "m,lambda,mean_rmse,std_rmse,reps\n";
  for (const auto& r : result.rows) {
    out << r.m << ',' << format_double(r.lambda) << ',';
    if (!std::isnan(r.mean_rmse)) out << format_double(r.mean_rmse);
    out << ',';
    if (!std::isnan(r.std_rmse)) out << format_double(r.std_rmse);
    out << ',' << r.reps << '\n';
  }
  if (!out.flush()) throw io_error("write_sweep_csv: write failed for " + path);
}

SweepResult read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("read_sweep_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("m,lambda,mean_rmse", 0) != 0)
    throw io_error("read_sweep_csv: bad header in " + path);
  SweepResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    SweepRow row;
    auto next = [&]() {
      if (!std::getline(ss, field, ',')) throw io_error("read_sweep_csv: short row");
      return field;
    };
    row.m = std::stoi(next());
    row.lambda = std::stod(next());
    field = next();
    row.mean_rmse = field.empty() ? kNaN : std::stod(field);
    field = next();
    row.std_rmse = field.empty() ? kNaN : std::stod(field);
    row.reps = std::stoi(next());
    result.rows.push_back(row);
  }
  return result;
}

namespace {

std::string cell_color(double v, double lo, double hi) {
  if (std::isnan(v)) return "#BBBBBB";
  const double span = hi > lo ? hi - lo : 1.0;
  const double x = std::clamp((v - lo) / span, 0.0, 1.0);
  const auto lerp = [x](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * x));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", lerp(0x14, 0xFD), lerp(0x28, 0xC8),
                lerp(0x6E, 0x32));
  return buf;
}

std::string short_num(double v) {
  if (std::isnan(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void write_heatmap_svg(const SweepResult& result, const std::string& path) {
  if (result.rows.empty()) throw std::invalid_argument("write_heatmap_svg: empty result");

  std::vector<int> ms;
  std::vector<double> ls;
  for (const auto& r : result.rows) {
    if (ms.empty() || ms.back() != r.m) ms.push_back(r.m);
    if (std::find(ls.begin(), ls.end(), r.lambda) == ls.end()) ls.push_back(r.lambda);
  }
  const std::size_t nm = ms.size(), nl = ls.size();

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : result.rows) {
    if (std::isnan(r.mean_rmse)) continue;
    lo = std::min(lo, r.mean_rmse);
    hi = std::max(hi, r.mean_rmse);
  }
  if (!std::isfinite(lo)) lo = hi = kNaN;

  const double plot_w = 440, plot_h = 440;
  const double left = 80, top = 24, bottom = 56, right = 150;
  const double cw = plot_w / static_cast<double>(nm);
  const double ch = plot_h / static_cast<double>(nl);
  const double width = left + plot_w + right, height = top + plot_h + bottom;

  std::ofstream out(path);
  if (!out) throw io_error("write_heatmap_svg: cannot open " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // Raster: m left-to-right ascending, lambda bottom-to-top ascending.
  for (const auto& r : result.rows) {
    const auto mi = static_cast<std::size_t>(
        std::find(ms.begin(), ms.end(), r.m) - ms.begin());
    const auto li = static_cast<std::size_t>(
        std::find(ls.begin(), ls.end(), r.lambda) - ls.begin());
    const double x = left + static_cast<double>(mi) * cw;
    const double y = top + static_cast<double>(nl - 1 - li) * ch;
    out << "  <rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw
        << "\" height=\"" << ch << "\" fill=\"" << cell_color(r.mean_rmse, lo, hi)
        << "\"><title>m=" << r.m << " lambda=" << short_num(r.lambda)
        << " rmse=" << short_num(r.mean_rmse) << "</title></rect>\n";
  }

  // Axis tick labels (ends plus middle).
  const auto tick_text = [&out](double x, double y, const std::string& s,
                                const char* anchor) {
    out << "  <text x=\"" << x << "\" y=\"" << y << "\" font-size=\"12\" text-anchor=\""
        << anchor << "\" font-family=\"sans-serif\">" << s << "</text>\n";
  };
  tick_text(left + 0.5 * cw, top + plot_h + 18, std::to_string(ms.front()), "middle");
  tick_text(left + (static_cast<double>(nm) - 0.5) * cw, top + plot_h + 18,
            std::to_string(ms.back()), "middle");
  if (nm > 2)
    tick_text(left + (static_cast<double>(nm / 2) + 0.5) * cw, top + plot_h + 18,
              std::to_string(ms[nm / 2]), "middle");
  tick_text(left - 6, top + plot_h - 0.5 * ch + 4, short_num(ls.front()), "end");
  tick_text(left - 6, top + 0.5 * ch + 4, short_num(ls.back()), "end");
  if (nl > 2)
    tick_text(left - 6, top + (static_cast<double>(nl - 1 - nl / 2) + 0.5) * ch + 4,
              short_num(ls[nl / 2]), "end");
  tick_text(left + 0.5 * plot_w, top + plot_h + 40, "m (subsample size)", "middle");
  out << "  <text x=\"18\" y=\"" << top + 0.5 * plot_h
      << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 "
      << top + 0.5 * plot_h << ")\">lambda</text>\n";

  // Legend: vertical gradient keyed to [lo, hi], low at the bottom.
  const double lx = left + plot_w + 40, lw = 22, lh = plot_h * 0.8, ly = top + 0.1 * plot_h;
  const int steps = 64;
  for (int i = 0; i < steps; ++i) {
    const double frac = (static_cast<double>(i) + 0.5) / steps;
    const double v = std::isnan(lo) ? kNaN : hi - frac * (hi - lo);
    out << "  <rect x=\"" << lx << "\" y=\"" << ly + lh * i / steps << "\" width=\"" << lw
        << "\" height=\"" << lh / steps + 0.5 << "\" fill=\"" << cell_color(v, lo, hi)
        << "\"/>\n";
  }
  tick_text(lx + lw + 6, ly + 10, short_num(hi), "start");
  tick_text(lx + lw + 6, ly + lh, short_num(lo), "start");
  tick_text(lx + lw / 2, ly - 8, "mean RMSE", "middle");
  out << "</svg>\n";
  if (!out.flush()) throw io_error("write_heatmap_svg: write failed for " + path);
}

void write_bench_csv(const BenchResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("write_bench_csv: cannot open " + path);
  out << "method,n,m,wall_time_seconds,fit_residual\n";
  for (const auto& r : result.rows)
    out << r.method << ',' << r.n << ',' << r.m << ',' << format_double(r.wall_time_seconds)
        << ',' << format_double(r.fit_residual) << '\n';
  if (!out.flush()) throw io_error("write_bench_csv: write failed for " + path);
}

}  // namespace flr
