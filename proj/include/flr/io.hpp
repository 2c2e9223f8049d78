// SPDX-License-Identifier: Apache-2.0
//
// File formats: dataset CSV and fitted-model CSV. All floats are written
// with 17 significant digits so values round-trip exactly.
#pragma once

#include <string>

#include "flr/estimator.hpp"
#include "flr/grid.hpp"

namespace flr {

// Shortest-exact decimal form used across all file output ("%.17g").
std::string format_double(double x);

// Dataset CSV: row 1 is `y/t,t_0,...,t_{G-1}` (the grid points); each
// following row is `Y_i,X_i(t_0),...,X_i(t_{G-1})`. On load the quadrature
// weights are reconstructed from the points by the trapezoid rule.
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

// Model CSV: a `kind,lambda,kernel,m` header row and its value row, then an
// `index,subsample_index,coefficient` header followed by one row per
// coefficient (subsample_index == index for the full solver). Basis curves
// are re-derived from the training dataset the model was fit on.
void write_model_csv(const FittedModel& model, const std::string& path);
FittedModel read_model_csv(const std::string& path, const Dataset& train);

}  // namespace flr
