// SPDX-License-Identifier: Apache-2.0
//
// flrn: command-line driver for functional linear regression with Nystrom
// subsampling. Subcommands: generate, fit, predict, sweep, bench, rates.
// Exit codes: 0 success, 1 i/o failure, 2 usage error, 3 numeric failure.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "flr/errors.hpp"
#include "flr/eval.hpp"
#include "flr/io.hpp"
#include "flr/synth.hpp"
#include "flr/theory.hpp"
#include "flr/version.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

// Every file-writing command records a manifest next to its outputs: the
// resolved arguments, seeds, artifact list, tool version and wall time. It
// is written last, after all artifacts exist.
void write_manifest(const std::string& path, const std::string& command,
                    const json& args, const std::vector<std::string>& artifacts,
                    double wall_seconds, const json& diagnostics = json::object()) {
  json doc;
  doc["command"] = command;
  doc["args"] = args;
  doc["artifacts"] = artifacts;
  doc["tool_version"] = flr::kVersion;
  doc["wall_time_seconds"] = wall_seconds;
  if (!diagnostics.empty()) doc["diagnostics"] = diagnostics;
  std::ofstream out(path);
  if (!out) throw flr::io_error("cannot open manifest " + path);
  out << doc.dump() << '\n';
  if (!out.flush()) throw flr::io_error("manifest write failed for " + path);
}

// Flat key=value config support: `--config file` anywhere after the
// subcommand expands, in place, to `--key value` pairs with identical
// semantics to typing the flags. Lines starting with '#' are comments.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 0; i < argc; ++i) {
    std::string tok = argv[i];
    std::string path;
    if (tok == "--config") {
      if (i + 1 >= argc) throw CLI::ValidationError("--config", "missing file path");
      path = argv[++i];
    } else if (tok.rfind("--config=", 0) == 0) {
      path = tok.substr(9);
    } else {
      out.push_back(std::move(tok));
      continue;
    }
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
      const auto a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos || line[a] == '#') continue;
      const auto b = line.find_last_not_of(" \t\r");
      line = line.substr(a, b - a + 1);
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        out.push_back("--" + line);  // bare flag
      } else {
        out.push_back("--" + line.substr(0, eq));
        out.push_back(line.substr(eq + 1));
      }
    }
  }
  return out;
}

flr::KernelSpec kernel_from_flag(const std::string& text) {
  try {
    return flr::parse_kernel(text);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--kernel", e.what());
  }
}

flr::JitterPolicy jitter_from_flags(const std::string& mode, double rel) {
  if (mode == "off") return flr::JitterPolicy::off();
  if (mode == "auto") return flr::JitterPolicy::with_rel(rel);
  throw CLI::ValidationError("--jitter", "expected 'auto' or 'off'");
}

struct GenerateArgs {
  std::string out_dir = ".";
  flr::SynthConfig cfg;
};

int run_generate(const GenerateArgs& a) {
  const auto t0 = clock_type::now();
  auto [train, test] = flr::make_experiment(a.cfg);

  fs::create_directories(a.out_dir);
  const std::string train_path = (fs::path(a.out_dir) / "train.csv").string();
  const std::string test_path = (fs::path(a.out_dir) / "test.csv").string();
  flr::write_dataset_csv(train, train_path);
  flr::write_dataset_csv(test, test_path);

  // Noise diagnostics: sample variance of Y - <X, beta*> over all rows.
  const flr::Curve beta = flr::beta_star(train.grid);
  double mean = 0.0, count = 0.0;
  std::vector<double> gaps;
  for (const flr::Dataset* d : {&train, &test})
    for (std::size_t i = 0; i < d->curves.size(); ++i) {
      gaps.push_back(d->responses[i] - flr::l2_inner(d->curves[i], beta));
      mean += gaps.back();
      count += 1.0;
    }
  mean /= count;
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var = count > 1 ? var / (count - 1.0) : 0.0;

  json args{{"out_dir", a.out_dir},     {"n_total", a.cfg.n_total},
            {"n_train", a.cfg.n_train}, {"modes", a.cfg.modes},
            {"sigma2", a.cfg.sigma2},   {"grid_size", a.cfg.grid_size},
            {"seed", a.cfg.seed}};
  json diag{{"empirical_noise_variance", var},
            {"train_rows", train.curves.size()},
            {"test_rows", test.curves.size()}};
  const double wall = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest((fs::path(a.out_dir) / "manifest.json").string(), "generate", args,
                 {train_path, test_path}, wall, diag);
  return 0;
}

struct FitArgs {
  std::string train_path;
  std::string method = "full";
  double lambda = 1e-3;
  int m = 0;
  std::uint64_t seed = flr::kDefaultSeed;
  std::string kernel = "sobolev-bernoulli";
  std::string jitter = "auto";
  double jitter_rel = 1e-10;
  std::string out = "model.csv";
};

int run_fit(const FitArgs& a) {
  const auto t0 = clock_type::now();
  if (!(a.lambda > 0.0)) throw CLI::ValidationError("--lambda", "must be > 0");
  const flr::Dataset train = flr::read_dataset_csv(a.train_path);
  const flr::KernelSpec kernel = kernel_from_flag(a.kernel);
  const flr::RidgeConfig cfg{a.lambda, jitter_from_flags(a.jitter, a.jitter_rel)};

  flr::FittedModel model;
  if (a.method == "full") {
    model = flr::fit_full(train, kernel, cfg);
  } else if (a.method == "nystrom") {
    if (a.m < 1) throw CLI::ValidationError("--m", "nystrom requires --m >= 1");
    if (a.m > static_cast<int>(train.curves.size()))
      throw CLI::ValidationError("--m", "exceeds the training size");
    model = flr::fit_nystrom(train, kernel, cfg, a.m, a.seed);
  } else {
    throw CLI::ValidationError("--method", "expected 'full' or 'nystrom'");
  }

  flr::write_model_csv(model, a.out);
  json args{{"train", a.train_path}, {"method", a.method},
            {"lambda", a.lambda},    {"m", a.m},
            {"seed", a.seed},        {"kernel", a.kernel},
            {"jitter", a.jitter},    {"jitter_rel", a.jitter_rel},
            {"out", a.out}};
  const double wall = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(a.out + ".manifest.json", "fit", args, {a.out}, wall);
  return 0;
}

struct PredictArgs {
  std::string model_path;
  std::string train_path;
  std::string data_path;
  std::string out = "predictions.csv";
};

int run_predict(const PredictArgs& a) {
  const auto t0 = clock_type::now();
  const flr::Dataset train = flr::read_dataset_csv(a.train_path);
  const flr::Dataset data = flr::read_dataset_csv(a.data_path);
  const flr::FittedModel model = flr::read_model_csv(a.model_path, train);
  const std::vector<double> preds = flr::predict_many(model, data.curves);

  std::ofstream out(a.out);
  if (!out) throw flr::io_error("cannot open " + a.out);
  out << "index,prediction\n";
  for (std::size_t i = 0; i < preds.size(); ++i)
    out << i << ',' << flr::format_double(preds[i]) << '\n';
  if (!out.flush()) throw flr::io_error("write failed for " + a.out);

  json args{{"model", a.model_path},
            {"train", a.train_path},
            {"data", a.data_path},
            {"out", a.out}};
  const double wall = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(a.out + ".manifest.json", "predict", args, {a.out}, wall);
  return 0;
}

struct SweepArgs {
  std::string train_path;
  std::string test_path;
  flr::SweepSpec spec;
  std::string kernel = "sobolev-bernoulli";
  std::string out = "sweep.csv";
  std::string svg;
  bool noisy_targets = false;
};

int run_sweep_cmd(const SweepArgs& a) {
  const auto t0 = clock_type::now();
  a.spec.check();  // flag validation before any file access
  const flr::Dataset train = flr::read_dataset_csv(a.train_path);
  const flr::Dataset test = flr::read_dataset_csv(a.test_path);
  const flr::KernelSpec kernel = kernel_from_flag(a.kernel);
  if (a.spec.m_max > static_cast<int>(train.curves.size()))
    throw CLI::ValidationError("--m-max", "exceeds the training size");

  const flr::Curve beta = flr::beta_star(test.grid);
  const flr::SweepResult result =
      flr::run_sweep(train, test, kernel, a.spec, a.noisy_targets ? nullptr : &beta);

  flr::write_sweep_csv(result, a.out);
  std::vector<std::string> artifacts{a.out};
  if (!a.svg.empty()) {
    flr::write_heatmap_svg(result, a.svg);
    artifacts.push_back(a.svg);
  }
  if (result.failed_fits > 0)
    std::cerr << "warning: " << result.failed_fits
              << " fits failed and produced NaN cells\n";

  json args{{"train", a.train_path},
            {"test", a.test_path},
            {"kernel", a.kernel},
            {"lambda_min", a.spec.lambda_min},
            {"lambda_max", a.spec.lambda_max},
            {"lambda_points", a.spec.lambda_points},
            {"m_min", a.spec.m_min},
            {"m_max", a.spec.m_max},
            {"m_points", a.spec.m_points},
            {"reps", a.spec.reps},
            {"base_seed", a.spec.base_seed},
            {"threads", a.spec.threads},
            {"noisy_targets", a.noisy_targets},
            {"out", a.out},
            {"svg", a.svg}};
  json diag{{"failed_fits", result.failed_fits}};
  const double wall = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(a.out + ".manifest.json", "sweep", args, artifacts, wall, diag);
  return 0;
}

struct BenchArgs {
  std::vector<long> sizes;
  int m = 100;
  int reps = 5;
  double lambda = 1e-3;
  std::string kernel = "sobolev-bernoulli";
  std::uint64_t seed = flr::kDefaultSeed;
  int threads = 1;
  long full_cap = 0;
  std::string out = "bench.csv";
};

int run_bench_cmd(const BenchArgs& a) {
  const auto t0 = clock_type::now();
  for (std::size_t i = 0; i + 1 < a.sizes.size(); ++i)
    if (a.sizes[i] >= a.sizes[i + 1])
      throw CLI::ValidationError("--sizes", "must be positive ascending");
  const flr::KernelSpec kernel = kernel_from_flag(a.kernel);
  const flr::BenchResult result = flr::run_bench(a.sizes, a.m, a.reps, kernel, a.lambda,
                                                 a.seed, a.threads, a.full_cap);
  flr::write_bench_csv(result, a.out);

  json args{{"sizes", a.sizes}, {"m", a.m},
            {"reps", a.reps},   {"lambda", a.lambda},
            {"kernel", a.kernel}, {"seed", a.seed},
            {"threads", a.threads}, {"full_cap", a.full_cap},
            {"out", a.out}};
  json diag{{"threads", result.threads}};
  const double wall = std::chrono::duration<double>(clock_type::now() - t0).count();
  write_manifest(a.out + ".manifest.json", "bench", args, {a.out}, wall, diag);
  return 0;
}

struct RatesArgs {
  long n = 0;
  double b = 2.0;
  double s = 0.0;
  double lambda_override = 0.0;  // 0 = use the rule
  std::string out;
};

int run_rates(const RatesArgs& a) {
  const auto t0 = clock_type::now();
  const flr::TheoryParams p{a.b, a.s};
  const double lambda = a.lambda_override > 0.0 ? a.lambda_override : flr::lambda_rule(a.n, p);
  const long min_m = flr::min_subsample(lambda, p, a.n);
  const flr::Rates rates = flr::predicted_rates(a.n, p);

  std::ostringstream row;
  row << "n,b,s,lambda,min_m,pred_rate,est_rate\n";
  row << a.n << ',' << flr::format_double(a.b) << ',' << flr::format_double(a.s) << ','
      << flr::format_double(lambda) << ',' << min_m << ','
      << flr::format_double(rates.prediction_rate) << ','
      << flr::format_double(rates.estimation_rate) << '\n';
  std::cout << row.str();

  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw flr::io_error("cannot open " + a.out);
    out << row.str();
    if (!out.flush()) throw flr::io_error("write failed for " + a.out);
    json args{{"n", a.n},
              {"b", a.b},
              {"s", a.s},
              {"lambda_override", a.lambda_override},
              {"out", a.out}};
    const double wall = std::chrono::duration<double>(clock_type::now() - t0).count();
    write_manifest(a.out + ".manifest.json", "rates", args, {a.out}, wall);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional linear regression with Nystrom subsampling"};
  app.set_version_flag("--version", flr::kVersion);
  app.require_subcommand(1);

  std::string config_help_sink;
  const char* config_desc = "flat key=value file of these flags (expanded in place)";

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "write synthetic train/test datasets");
  cmd_gen->add_option("--config", config_help_sink, config_desc);
  cmd_gen->add_option("--out-dir", gen.out_dir, "output directory");
  cmd_gen->add_option("--n-total", gen.cfg.n_total, "total sample count");
  cmd_gen->add_option("--n-train", gen.cfg.n_train, "training sample count");
  cmd_gen->add_option("--modes", gen.cfg.modes, "series truncation of the predictors");
  cmd_gen->add_option("--sigma2", gen.cfg.sigma2, "response noise variance");
  cmd_gen->add_option("--grid-size", gen.cfg.grid_size, "quadrature grid size");
  cmd_gen->add_option("--seed", gen.cfg.seed, "master seed");

  FitArgs fit;
  auto* cmd_fit = app.add_subcommand("fit", "fit a model to a dataset file");
  cmd_fit->add_option("--config", config_help_sink, config_desc);
  cmd_fit->add_option("--train", fit.train_path, "training dataset CSV")->required();
  cmd_fit->add_option("--method", fit.method, "full|nystrom");
  cmd_fit->add_option("--lambda", fit.lambda, "regularization level (> 0)");
  cmd_fit->add_option("--m", fit.m, "subsample size (nystrom)");
  cmd_fit->add_option("--seed", fit.seed, "subsample seed (nystrom)");
  cmd_fit->add_option("--kernel", fit.kernel, "kernel spec string");
  cmd_fit->add_option("--jitter", fit.jitter, "auto|off");
  cmd_fit->add_option("--jitter-rel", fit.jitter_rel, "relative jitter level");
  cmd_fit->add_option("--out", fit.out, "model CSV path");

  PredictArgs pred;
  auto* cmd_pred = app.add_subcommand("predict", "predict responses for a dataset file");
  cmd_pred->add_option("--config", config_help_sink, config_desc);
  cmd_pred->add_option("--model", pred.model_path, "model CSV")->required();
  cmd_pred->add_option("--train", pred.train_path, "training dataset the model references")
      ->required();
  cmd_pred->add_option("--data", pred.data_path, "dataset to predict on")->required();
  cmd_pred->add_option("--out", pred.out, "predictions CSV path");

  SweepArgs sweep;
  auto* cmd_sweep = app.add_subcommand("sweep", "mean RMSE over an (m, lambda) grid");
  cmd_sweep->add_option("--config", config_help_sink, config_desc);
  cmd_sweep->add_option("--train", sweep.train_path, "training dataset CSV")->required();
  cmd_sweep->add_option("--test", sweep.test_path, "test dataset CSV")->required();
  cmd_sweep->add_option("--kernel", sweep.kernel, "kernel spec string");
  cmd_sweep->add_option("--lambda-min", sweep.spec.lambda_min);
  cmd_sweep->add_option("--lambda-max", sweep.spec.lambda_max);
  cmd_sweep->add_option("--lambda-points", sweep.spec.lambda_points);
  cmd_sweep->add_option("--m-min", sweep.spec.m_min);
  cmd_sweep->add_option("--m-max", sweep.spec.m_max);
  cmd_sweep->add_option("--m-points", sweep.spec.m_points);
  cmd_sweep->add_option("--reps", sweep.spec.reps, "repetitions per cell");
  cmd_sweep->add_option("--base-seed", sweep.spec.base_seed);
  cmd_sweep->add_option("--threads", sweep.spec.threads, "worker threads over cells");
  cmd_sweep->add_flag("--noisy-targets", sweep.noisy_targets,
                      "score against stored responses instead of noiseless targets");
  cmd_sweep->add_option("--out", sweep.out, "sweep CSV path");
  cmd_sweep->add_option("--svg", sweep.svg, "optional heatmap SVG path");

  BenchArgs bench;
  auto* cmd_bench = app.add_subcommand("bench", "fit-time benchmark over train sizes");
  cmd_bench->add_option("--config", config_help_sink, config_desc);
  cmd_bench->add_option("--sizes", bench.sizes, "train sizes, ascending")
      ->required()
      ->delimiter(',');
  cmd_bench->add_option("--m", bench.m, "nystrom subsample size");
  cmd_bench->add_option("--reps", bench.reps, "repetitions (median reported)");
  cmd_bench->add_option("--lambda", bench.lambda);
  cmd_bench->add_option("--kernel", bench.kernel);
  cmd_bench->add_option("--seed", bench.seed);
  cmd_bench->add_option("--threads", bench.threads, "gram assembly threads");
  cmd_bench->add_option("--full-cap", bench.full_cap,
                        "skip the full solver above this size (0 = never)");
  cmd_bench->add_option("--out", bench.out, "bench CSV path");

  RatesArgs rates;
  auto* cmd_rates = app.add_subcommand("rates", "regularization rule and predicted rates");
  cmd_rates->add_option("--config", config_help_sink, config_desc);
  cmd_rates->add_option("--n", rates.n, "sample size")->required();
  cmd_rates->add_option("--b", rates.b, "eigenvalue decay exponent (> 1)");
  cmd_rates->add_option("--s", rates.s, "source smoothness in [0, 1/2]");
  cmd_rates->add_option("--lambda", rates.lambda_override,
                        "override the lambda rule (> 0)");
  cmd_rates->add_option("--out", rates.out, "optional CSV path");

  std::vector<std::string> args;
  std::vector<const char*> arg_ptrs;
  try {
    args = expand_config_args(argc, argv);
    for (const std::string& s : args) arg_ptrs.push_back(s.c_str());
    app.parse(static_cast<int>(arg_ptrs.size()), arg_ptrs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_gen) return run_generate(gen);
    if (*cmd_fit) return run_fit(fit);
    if (*cmd_pred) return run_predict(pred);
    if (*cmd_sweep) return run_sweep_cmd(sweep);
    if (*cmd_bench) return run_bench_cmd(bench);
    if (*cmd_rates) return run_rates(rates);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const flr::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const flr::io_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
