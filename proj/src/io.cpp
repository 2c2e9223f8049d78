// SPDX-License-Identifier: Apache-2.0
#include "flr/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "flr/errors.hpp"

namespace flr {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding spaces
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_num(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw io_error("bad numeric field '" + s + "' in " + path);
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  data.check();
  std::ofstream out(path);
  if (!out) throw io_error("write_dataset_csv: cannot open " + path);
  out << "y/t";
  for (double t : data.grid.points()) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t i = 0; i < data.curves.size(); ++i) {
    out << format_double(data.responses[i]);
    for (double v : data.curves[i].values) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out.flush()) throw io_error("write_dataset_csv: write failed for " + path);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("read_dataset_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("read_dataset_csv: empty file " + path);
  std::vector<std::string> header = split_csv(line);
  if (header.size() < 3 || header[0] != "y/t")
    throw io_error("read_dataset_csv: bad header in " + path);

  std::vector<double> points(header.size() - 1);
  for (std::size_t i = 1; i < header.size(); ++i) points[i - 1] = parse_num(header[i], path);
  Grid grid;
  try {
    grid = grid_from_points(std::move(points));
  } catch (const std::invalid_argument& e) {
    throw io_error("read_dataset_csv: invalid grid in " + path + ": " + e.what());
  }

  Dataset data;
  data.grid = grid;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    if (fields.size() != grid.size() + 1)
      throw io_error("read_dataset_csv: row width mismatch in " + path);
    data.responses.push_back(parse_num(fields[0], path));
    Curve c;
    c.grid = grid;
    c.values.resize(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
      c.values[p] = parse_num(fields[p + 1], path);
      if (!std::isfinite(c.values[p]))
        throw io_error("read_dataset_csv: non-finite curve value in " + path);
    }
    data.curves.push_back(std::move(c));
  }
  if (data.curves.empty()) throw io_error("read_dataset_csv: no data rows in " + path);
  data.check();
  return data;
}

void write_model_csv(const FittedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("write_model_csv: cannot open " + path);
  out << "kind,lambda,kernel,m\n";
  out << (model.kind == SolverKind::full ? "full" : "nystrom") << ','
      << format_double(model.lambda) << ',' << to_string(model.kernel) << ','
      << model.coeff.size() << '\n';
  out << "index,subsample_index,coefficient\n";
  for (Eigen::Index i = 0; i < model.coeff.size(); ++i) {
    const auto sub = model.kind == SolverKind::full
                         ? static_cast<int>(i)
                         : model.subsample_indices[static_cast<std::size_t>(i)];
    out << i << ',' << sub << ',' << format_double(model.coeff[i]) << '\n';
  }
  if (!out.flush()) throw io_error("write_model_csv: write failed for " + path);
}

FittedModel read_model_csv(const std::string& path, const Dataset& train) {
  train.check();
  std::ifstream in(path);
  if (!in) throw io_error("read_model_csv: cannot open " + path);
  std::string line;

  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{
                                                        "kind", "lambda", "kernel", "m"})
    throw io_error("read_model_csv: bad metadata header in " + path);
  if (!std::getline(in, line)) throw io_error("read_model_csv: missing metadata in " + path);
  const std::vector<std::string> meta = split_csv(line);
  if (meta.size() != 4) throw io_error("read_model_csv: bad metadata row in " + path);

  FittedModel model;
  if (meta[0] == "full")
    model.kind = SolverKind::full;
  else if (meta[0] == "nystrom")
    model.kind = SolverKind::nystrom;
  else
    throw io_error("read_model_csv: unknown solver kind '" + meta[0] + "'");
  model.lambda = parse_num(meta[1], path);
  if (!(model.lambda > 0.0)) throw io_error("read_model_csv: lambda must be > 0");
  try {
    model.kernel = parse_kernel(meta[2]);
  } catch (const std::invalid_argument& e) {
    throw io_error(std::string("read_model_csv: ") + e.what());
  }
  const auto m = static_cast<Eigen::Index>(parse_num(meta[3], path));

  if (!std::getline(in, line) ||
      split_csv(line) !=
          std::vector<std::string>{"index", "subsample_index", "coefficient"})
    throw io_error("read_model_csv: bad coefficient header in " + path);

  model.coeff.resize(m);
  model.subsample_indices.clear();
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 3 || row >= m)
      throw io_error("read_model_csv: bad coefficient row in " + path);
    if (static_cast<Eigen::Index>(parse_num(fields[0], path)) != row)
      throw io_error("read_model_csv: out-of-order coefficient rows in " + path);
    const int sub = static_cast<int>(parse_num(fields[1], path));
    if (sub < 0 || sub >= static_cast<int>(train.curves.size()))
      throw io_error("read_model_csv: subsample index out of range in " + path);
    model.subsample_indices.push_back(sub);
    model.coeff[row] = parse_num(fields[2], path);
    ++row;
  }
  if (row != m) throw io_error("read_model_csv: coefficient count mismatch in " + path);

  model.basis_curves.reserve(static_cast<std::size_t>(m));
  for (int idx : model.subsample_indices)
    model.basis_curves.push_back(train.curves[static_cast<std::size_t>(idx)]);
  if (model.kind == SolverKind::full) {
    for (Eigen::Index i = 0; i < m; ++i)
      if (model.subsample_indices[static_cast<std::size_t>(i)] != static_cast<int>(i))
        throw io_error("read_model_csv: full model must index the whole training set");
    model.subsample_indices.clear();
    if (m != static_cast<Eigen::Index>(train.curves.size()))
      throw io_error("read_model_csv: full model size does not match training set");
  }
  model.grid = train.grid;
  return model;
}

}  // namespace flr
