#pragma once

// Flat key = value configuration mirroring ExperimentConfig. Lines starting
// with '#' are comments; lists are comma separated.
//
//   r_squared      = 0.8, 0.2
//   var_prop       = 0.8, 0.2
//   predictor_corr = 0.5
//   mechanisms     = MCAR, MAR
//   prop           = 0.5
//   mar_weights    = 1, 0, 0
//   methods        = predict, draw
//   samples        = 1000        (alias n_sample)
//   reps           = 200         (alias t_rep)
//   seed           = 123         (alias base_seed)
//   pop_size       = 1000000
//   threads        = 0
//   format         = csv | markdown
//   out            = path
//   pmm_donors, soft_rank, soft_lambda, soft_max_iter, soft_tol, soft_center,
//   forest_trees, forest_mtry, forest_min_node, forest_bootstrap,
//   forest_max_iter, method, repeats

#include <string>
#include <string_view>
#include <vector>

#include "impute/harness.hpp"

namespace impute {

struct MethodOptions {
  method::Pmm pmm;
  method::SoftImpute soft;
  method::Forest forest;
};

ImputationMethod make_method(std::string_view label, const MethodOptions& opts);

struct RunSettings {
  ExperimentConfig experiment;
  std::vector<double> r_squared{0.8, 0.2};
  std::array<double, 2> var_prop{0.8, 0.2};
  double predictor_corr = 0.5;
  std::vector<std::string> mechanisms{"MCAR", "MAR"};
  double prop = 0.5;
  std::array<double, 3> mar_weights{1.0, 0.0, 0.0};
  std::vector<std::string> methods{"predict", "draw"};
  MethodOptions method_options;
  TableStyle format = TableStyle::csv;
  std::string out;
  std::string decompose_method = "draw";
  Index repeats = 100;

  /// Rebuilds experiment.populations / mechanisms / methods from the list fields.
  void finalize();
};

/// Applies `key = value` lines; `origin` names the source in error messages.
void apply_config_text(std::string_view text, const std::string& origin, RunSettings& settings);

/// Reads and applies a config file; a missing file is an InvalidArgument naming the path.
void load_config_file(const std::string& path, RunSettings& settings);

Mechanism parse_mechanism(std::string_view label);
TableStyle parse_style(std::string_view label);

/// Entry point of the command-line tool. Exit codes: 0 success, 1 runtime
/// error, 2 usage error.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace impute
