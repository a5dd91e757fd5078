#include "impute/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "impute/errors.hpp"
#include "impute/parallel.hpp"

namespace impute {
namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t population_hash(const PopulationSpec& spec) { return hash_label(population_key(spec)); }

std::uint64_t scenario_hash(const PopulationSpec& spec, const MissingnessSpec& mech) {
  return hash_words({population_hash(spec), hash_label(mechanism_key(mech))});
}

std::uint64_t cell_hash(std::uint64_t scenario, const ImputationMethod& m) {
  return hash_words({scenario, hash_label(method_key(m))});
}

PopulationSpec sized(PopulationSpec spec, const ExperimentConfig& cfg) {
  spec.size = cfg.pop_size;
  return spec;
}

ParamSet run_replication(const Dataset& pop, std::uint64_t scenario, std::uint64_t cell, const MissingnessSpec& mech,
                         const ImputationMethod& m, const ExperimentConfig& cfg, Index rep) {
  const auto t = static_cast<std::uint64_t>(rep);
  RngStream sampling({cfg.base_seed, stream_id_for(scenario, t, Purpose::sampling)});
  const Dataset sample = draw_sample(pop, cfg.n_sample, sampling);
  RngStream amputation({cfg.base_seed, stream_id_for(scenario, t, Purpose::amputation)});
  const IncompleteDataset inc = ampute(sample, mech, amputation);
  RngStream imputation({cfg.base_seed, stream_id_for(cell, t, Purpose::imputation)});
  const CompletedDataset completed = impute_dispatch(inc, m, imputation);
  return estimate_params(completed, sample);
}

CellResult summarize(const std::vector<ParamSet>& reps) {
  CellResult out;
  const auto t = static_cast<double>(reps.size());
  for (std::size_t f = 0; f < ParamSet::kFieldCount; ++f) {
    double sum = 0.0;
    for (const auto& r : reps) sum += r[f];
    const double mean = sum / t;
    double ss = 0.0;
    for (const auto& r : reps) ss += (r[f] - mean) * (r[f] - mean);
    out.mean[f] = mean;
    out.se[f] = reps.size() > 1 ? std::sqrt(ss / (t - 1.0) / t) : 0.0;
  }
  return out;
}

std::string cell_context(const PopulationSpec& spec, const MissingnessSpec& mech, const ImputationMethod& m, Index rep) {
  return "cell " + signal_label(spec) + "/" + method_label(m) + "/" + mechanism_label(mech.mechanism) +
         ", replication " + std::to_string(rep + 1);
}

template <typename Pred>
void require_methods(const ExperimentConfig& cfg, std::size_t count, Pred&& ok, const char* what) {
  bool good = cfg.methods.size() == count;
  for (const auto& m : cfg.methods) good = good && ok(m);
  if (good) {
    for (std::size_t i = 0; i < cfg.methods.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) good = good && cfg.methods[i].index() != cfg.methods[j].index();
  }
  if (!good) throw InvalidArgument(what);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (t_rep < 1) throw InvalidArgument("ExperimentConfig: t_rep must be at least 1");
  if (n_sample < 1) throw InvalidArgument("ExperimentConfig: n_sample must be positive");
  if (n_sample > pop_size) throw InvalidArgument("ExperimentConfig: n_sample exceeds pop_size");
  if (populations.empty()) throw InvalidArgument("ExperimentConfig: no populations");
  for (const auto& p : populations) sized(p, *this).validate();
  for (const auto& m : mechanisms) m.validate();
  for (const auto& m : methods) impute::validate(m);
}

ExperimentConfig ExperimentConfig::table1() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::table2() {
  ExperimentConfig cfg;
  cfg.methods = {method::Forest{}, method::SoftImpute{}, method::Pmm{}};
  return cfg;
}

std::string signal_label(const PopulationSpec& spec) {
  if (spec.r_squared == 0.8) return "high";
  if (spec.r_squared == 0.2) return "low";
  return "r2=" + shortest(spec.r_squared);
}

std::string population_key(const PopulationSpec& spec) {
  return "r2=" + shortest(spec.r_squared) + ";prop=" + shortest(spec.var_prop[0]) + "," + shortest(spec.var_prop[1]) +
         ";corr=" + shortest(spec.predictor_corr) + ";size=" + std::to_string(spec.size);
}

std::string mechanism_key(const MissingnessSpec& spec) {
  std::string key = mechanism_label(spec.mechanism) + ";prop=" + shortest(spec.prop);
  if (spec.mechanism == Mechanism::mar_right) {
    key += ";w=" + shortest(spec.weights[0]) + "," + shortest(spec.weights[1]) + "," + shortest(spec.weights[2]);
  }
  return key;
}

Dataset make_population(const PopulationSpec& spec, const ExperimentConfig& cfg) {
  const PopulationSpec s = sized(spec, cfg);
  RngStream stream({cfg.base_seed, stream_id_for(population_hash(s), 0, Purpose::population)});
  return generate_population(s, stream);
}

ParamSet run_replication(const Dataset& pop, const PopulationSpec& spec, const MissingnessSpec& mech,
                         const ImputationMethod& method, const ExperimentConfig& cfg, Index rep) {
  const PopulationSpec s = sized(spec, cfg);
  const std::uint64_t scenario = scenario_hash(s, mech);
  return run_replication(pop, scenario, cell_hash(scenario, method), mech, method, cfg, rep);
}

CellResult run_cell(const Dataset& pop, const PopulationSpec& spec, const MissingnessSpec& mech,
                    const ImputationMethod& method, const ExperimentConfig& cfg) {
  cfg.validate();
  const PopulationSpec s = sized(spec, cfg);
  const std::uint64_t scenario = scenario_hash(s, mech);
  const std::uint64_t cell = cell_hash(scenario, method);
  std::vector<ParamSet> reps(static_cast<std::size_t>(cfg.t_rep));
  parallel_for(reps.size(), cfg.threads, [&](std::size_t t) {
    try {
      reps[t] = run_replication(pop, scenario, cell, mech, method, cfg, static_cast<Index>(t));
    } catch (const std::exception& e) {
      throw std::runtime_error(cell_context(s, mech, method, static_cast<Index>(t)) + ": " + e.what());
    }
  });
  return summarize(reps);
}

SummaryTable run_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Dataset> pops;
  pops.reserve(cfg.populations.size());
  for (const auto& spec : cfg.populations) pops.push_back(make_population(spec, cfg));

  struct Cell {
    std::size_t pop, method, mech;
    std::uint64_t scenario, key;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < cfg.populations.size(); ++p) {
    const PopulationSpec s = sized(cfg.populations[p], cfg);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      for (std::size_t k = 0; k < cfg.mechanisms.size(); ++k) {
        const std::uint64_t scenario = scenario_hash(s, cfg.mechanisms[k]);
        cells.push_back({p, m, k, scenario, cell_hash(scenario, cfg.methods[m])});
      }
    }
  }

  // Replications of all cells share one work queue; results land in fixed slots.
  const auto t_rep = static_cast<std::size_t>(cfg.t_rep);
  std::vector<ParamSet> results(cells.size() * t_rep);
  parallel_for(results.size(), cfg.threads, [&](std::size_t task) {
    const Cell& c = cells[task / t_rep];
    const auto rep = static_cast<Index>(task % t_rep);
    try {
      results[task] = run_replication(pops[c.pop], c.scenario, c.key, cfg.mechanisms[c.mech], cfg.methods[c.method],
                                      cfg, rep);
    } catch (const std::exception& e) {
      throw std::runtime_error(
          cell_context(cfg.populations[c.pop], cfg.mechanisms[c.mech], cfg.methods[c.method], rep) + ": " + e.what());
    }
  });

  SummaryTable table;
  std::size_t next_cell = 0;
  for (std::size_t p = 0; p < cfg.populations.size(); ++p) {
    const std::string signal = signal_label(cfg.populations[p]);
    SummaryRow truth{signal, "", "ground_truth", estimate_params(pops[p]), ParamSet{}, true};
    table.rows.push_back(truth);
    for (; next_cell < cells.size() && cells[next_cell].pop == p; ++next_cell) {
      const Cell& c = cells[next_cell];
      const std::vector<ParamSet> reps(results.begin() + static_cast<std::ptrdiff_t>(next_cell * t_rep),
                                       results.begin() + static_cast<std::ptrdiff_t>((next_cell + 1) * t_rep));
      const CellResult r = summarize(reps);
      table.rows.push_back(
          {signal, method_label(cfg.methods[c.method]), mechanism_label(cfg.mechanisms[c.mech].mechanism), r.mean, r.se});
    }
  }
  return table;
}

SummaryTable run_table1(const ExperimentConfig& cfg) {
  require_methods(
      cfg, 2,
      [](const ImputationMethod& m) {
        return std::holds_alternative<method::Predict>(m) || std::holds_alternative<method::Draw>(m);
      },
      "run_table1: methods must be exactly {predict, draw}");
  return run_grid(cfg);
}

SummaryTable run_table2(const ExperimentConfig& cfg) {
  require_methods(
      cfg, 3,
      [](const ImputationMethod& m) {
        return std::holds_alternative<method::Forest>(m) || std::holds_alternative<method::SoftImpute>(m) ||
               std::holds_alternative<method::Pmm>(m);
      },
      "run_table2: methods must be exactly {forest, softimpute, pmm}");
  return run_grid(cfg);
}

Index export_figure_data(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const PopulationSpec* low = &cfg.populations.front();
  for (const auto& p : cfg.populations)
    if (p.r_squared < low->r_squared) low = &p;
  const PopulationSpec spec = sized(*low, cfg);
  const Dataset pop = make_population(spec, cfg);
  const MissingnessSpec mech = MissingnessSpec::mar_right();
  const std::uint64_t scenario = scenario_hash(spec, mech);

  RngStream sampling({cfg.base_seed, stream_id_for(scenario, 0, Purpose::figure)});
  const Dataset sample = draw_sample(pop, cfg.n_sample, sampling);
  RngStream amputation({cfg.base_seed, stream_id_for(scenario, 1, Purpose::figure)});
  const IncompleteDataset inc = ampute(sample, mech, amputation);
  RngStream imputation({cfg.base_seed, stream_id_for(scenario, 2, Purpose::figure)});

  const CompletedDataset predicted = impute_predict(inc);
  const CompletedDataset drawn = impute_draw(inc, imputation, false);

  out << "x1,y,status,method\n";
  Index rows = 0;
  for (const auto* c : {&predicted, &drawn}) {
    const std::string label = c == &predicted ? "predict" : "draw";
    for (Index i = 0; i < c->data.size(); ++i) {
      out << shortest(c->data.x1[i]) << ',' << shortest(c->data.y[i]) << ','
          << (c->imputed_mask[i] ? "imputed" : "observed") << ',' << label << '\n';
      ++rows;
    }
  }
  return rows;
}

bool is_flagged(const SummaryRow& row, const SummaryRow& truth, std::size_t field) {
  if (row.ground_truth || field >= 8) return false;
  return std::fabs(row.mean[field] - truth.mean[field]) > 2.0 * row.se[field];
}

std::string format_table(const SummaryTable& table, TableStyle style) {
  std::ostringstream out;
  if (style == TableStyle::csv) {
    out << kTableCsvHeader << '\n';
    for (const auto& row : table.rows) {
      out << row.signal << ',' << row.method << ',' << row.mechanism;
      for (std::size_t f = 0; f < ParamSet::kFieldCount; ++f) out << ',' << fixed(row.mean[f], 3);
      out << '\n';
    }
    return out.str();
  }

  out << "| signal | method | mechanism | mu | sigma | p90 | rho | gamma | r2_y | delta | r2_x | mse_full | mse_missing |\n";
  out << "|---|---|---|";
  for (std::size_t f = 0; f < ParamSet::kFieldCount; ++f) out << "---:|";
  out << '\n';
  const SummaryRow* truth = nullptr;
  for (const auto& row : table.rows) {
    if (row.ground_truth) truth = &row;
    out << "| " << row.signal << " | " << row.method << " | " << row.mechanism << " |";
    for (std::size_t f = 0; f < ParamSet::kFieldCount; ++f) {
      const bool flag = truth != nullptr && truth->signal == row.signal && is_flagged(row, *truth, f);
      out << ' ' << fixed(row.mean[f], 3) << (flag ? "*" : "") << " |";
    }
    out << '\n';
  }
  return out.str();
}

SummaryTable parse_table_csv(std::string_view text) {
  SummaryTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kTableCsvHeader) throw InvalidArgument("parse_table_csv: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 3 + ParamSet::kFieldCount) throw InvalidArgument("parse_table_csv: wrong field count");
    SummaryRow row;
    row.signal = fields[0];
    row.method = fields[1];
    row.mechanism = fields[2];
    row.ground_truth = row.mechanism == "ground_truth";
    for (std::size_t f = 0; f < ParamSet::kFieldCount; ++f) {
      const std::string& s = fields[3 + f];
      auto res = std::from_chars(s.data(), s.data() + s.size(), row.mean[f]);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw InvalidArgument("parse_table_csv: bad number '" + s + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace impute
