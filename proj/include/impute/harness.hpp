#pragma once

// Monte Carlo driver: population x mechanism x method cells, each averaged
// over replications of sample -> ampute -> impute -> estimate.
//
// Stream allocation. Every stream is keyed by content, never by position in
// the config, so reordering or extending a config leaves existing cells
// bit-identical:
//   population key = hash_label("r2=..;prop=..,..;corr=..;size=..")
//   scenario key   = hash_words({population key, hash_label(mechanism key)})
//   sampling, amputation streams:  stream_id_for(scenario key, rep, purpose)
//   imputation stream:             stream_id_for(hash_words({scenario key,
//                                   hash_label(method_key)}), rep, imputation)
// Methods in the same scenario therefore impute the same amputed samples.

#include <iosfwd>
#include <string>
#include <vector>

#include "impute/ampute.hpp"
#include "impute/datagen.hpp"
#include "impute/downstream.hpp"
#include "impute/imputers.hpp"

namespace impute {

struct ExperimentConfig {
  std::vector<PopulationSpec> populations{PopulationSpec{0.8}, PopulationSpec{0.2}};
  std::vector<MissingnessSpec> mechanisms{MissingnessSpec::mcar(), MissingnessSpec::mar_right()};
  std::vector<ImputationMethod> methods{method::Predict{}, method::Draw{}};
  Index n_sample = 1000;
  Index t_rep = 200;
  std::uint64_t base_seed = 123;
  Index pop_size = 1'000'000;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;

  static ExperimentConfig table1();
  static ExperimentConfig table2();
};

/// "high" for r^2 = 0.8, "low" for 0.2, otherwise "r2=<value>".
std::string signal_label(const PopulationSpec& spec);
std::string population_key(const PopulationSpec& spec);
std::string mechanism_key(const MissingnessSpec& spec);

struct CellResult {
  ParamSet mean;
  ParamSet se;  // Monte Carlo standard error: replication sd / sqrt(t_rep)
};

struct SummaryRow {
  std::string signal;
  std::string method;     // empty on ground-truth rows
  std::string mechanism;  // "ground_truth" on ground-truth rows
  ParamSet mean;
  ParamSet se;
  bool ground_truth = false;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
};

/// Population for a spec with the config's seed; size is taken from cfg.pop_size.
Dataset make_population(const PopulationSpec& spec, const ExperimentConfig& cfg);

/// One replication t of a cell: draw_sample -> ampute -> impute -> estimate_params.
ParamSet run_replication(const Dataset& pop, const PopulationSpec& spec, const MissingnessSpec& mech,
                         const ImputationMethod& method, const ExperimentConfig& cfg, Index rep);

CellResult run_cell(const Dataset& pop, const PopulationSpec& spec, const MissingnessSpec& mech,
                    const ImputationMethod& method, const ExperimentConfig& cfg);

/// Ground-truth row, then one row per (method, mechanism), per population in
/// config order.
SummaryTable run_grid(const ExperimentConfig& cfg);

/// Requires cfg.methods to be exactly {predict, draw}.
SummaryTable run_table1(const ExperimentConfig& cfg);

/// Requires cfg.methods to be exactly {forest, softimpute, pmm}.
SummaryTable run_table2(const ExperimentConfig& cfg);

/// Figure data for one amputed low-signal sample imputed by predict and draw:
/// CSV `x1,y,status,method`. Uses the first population with the smallest r^2.
Index export_figure_data(const ExperimentConfig& cfg, std::ostream& out);

enum class TableStyle { csv, markdown };

/// Fixed column order, 3 decimals. Markdown marks cells more than 2 Monte
/// Carlo SEs from the signal's ground-truth row with '*' (mu .. r2_x only).
std::string format_table(const SummaryTable& table, TableStyle style);

/// Parses CSV produced by format_table (SEs are not stored and come back 0).
SummaryTable parse_table_csv(std::string_view text);

/// Whether a field of a row lies more than 2 SEs from the ground truth.
bool is_flagged(const SummaryRow& row, const SummaryRow& truth, std::size_t field);

inline constexpr std::string_view kTableCsvHeader =
    "signal,method,mechanism,mu,sigma,p90,rho,gamma,r2_y,delta,r2_x,mse_full,mse_missing";

}  // namespace impute
