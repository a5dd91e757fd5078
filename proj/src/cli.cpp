#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "impute/config.hpp"
#include "impute/errors.hpp"

namespace impute {
namespace {

/// Command-line overrides; only options that were actually given win over the config file.
struct Flags {
  Index pop_size = 1'000'000;
  Index samples = 1000;
  Index reps = 200;
  std::uint64_t seed = 123;
  std::string out;
  std::string format = "csv";
  std::string config;
  unsigned threads = 0;
  std::string method = "draw";
  Index repeats = 100;
  double signal = 0.2;
  std::string mechanism = "MCAR";
  std::vector<std::string> methods;

  std::vector<std::pair<CLI::Option*, std::function<void(RunSettings&)>>> given;
};

template <typename T>
CLI::Option* bind_flag(CLI::App* sub, Flags& f, const std::string& name, T& target, const std::string& help,
          std::function<void(RunSettings&)> apply) {
  CLI::Option* opt = sub->add_option(name, target, help)->capture_default_str();
  f.given.emplace_back(opt, std::move(apply));
  return opt;
}

void add_common(CLI::App* sub, Flags& f) {
  bind_flag(sub, f, "--pop-size", f.pop_size, "population size", [&f](RunSettings& s) { s.experiment.pop_size = f.pop_size; });
  bind_flag(sub, f, "--samples", f.samples, "sample size per replication",
       [&f](RunSettings& s) { s.experiment.n_sample = f.samples; });
  bind_flag(sub, f, "--reps", f.reps, "replications per cell", [&f](RunSettings& s) { s.experiment.t_rep = f.reps; });
  bind_flag(sub, f, "--seed", f.seed, "base seed", [&f](RunSettings& s) { s.experiment.base_seed = f.seed; });
  bind_flag(sub, f, "--out", f.out, "output path (default: standard output)", [&f](RunSettings& s) { s.out = f.out; });
  bind_flag(sub, f, "--format", f.format, "csv or markdown", [&f](RunSettings& s) { s.format = parse_style(f.format); });
  bind_flag(sub, f, "--threads", f.threads, "worker threads (0 = all cores)",
       [&f](RunSettings& s) { s.experiment.threads = f.threads; });
  sub->add_option("--config", f.config, "key = value config file; flags override its values");
}

RunSettings resolve(const Flags& f) {
  RunSettings s;
  if (!f.config.empty()) load_config_file(f.config, s);
  for (const auto& [opt, apply] : f.given)
    if (opt->count() > 0) apply(s);
  return s;
}

template <typename Fn>
void with_output(const RunSettings& s, std::ostream& out, Fn&& write) {
  if (s.out.empty() || s.out == "-") {
    write(out);
    return;
  }
  std::ofstream file(s.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + s.out + "'");
  write(file);
  if (!file) throw std::runtime_error("failed writing output file '" + s.out + "'");
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predictive vs stochastic imputation: Monte Carlo tables, figure data and MSE decomposition"};
  app.require_subcommand(1);
  Flags f;

  auto* table1 = app.add_subcommand("table1", "predict vs draw across signal levels and mechanisms");
  auto* table2 = app.add_subcommand("table2", "forest, softimpute and pmm across signal levels and mechanisms");
  auto* figure = app.add_subcommand("figure", "x1,y,status,method rows for one amputed low-signal sample");
  auto* decompose = app.add_subcommand("decompose", "bias^2 / variance / noise decomposition of the imputation MSE");
  auto* run = app.add_subcommand("run", "run the grid described by a config file");
  for (auto* sub : {table1, table2, figure, decompose, run}) add_common(sub, f);
  bind_flag(decompose, f, "--method", f.method, "imputation method", [&f](RunSettings& s) { s.decompose_method = f.method; });
  bind_flag(decompose, f, "--repeats", f.repeats, "imputations of the same dataset",
       [&f](RunSettings& s) { s.repeats = f.repeats; });
  decompose->add_option("--signal", f.signal, "population r^2")->capture_default_str();
  decompose->add_option("--mechanism", f.mechanism, "MCAR or MAR")->capture_default_str();
  bind_flag(run, f, "--methods", f.methods, "comma separated methods", [&f](RunSettings& s) { s.methods = f.methods; })
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunSettings s = resolve(f);
    if (table1->parsed()) s.methods = {"predict", "draw"};
    if (table2->parsed()) s.methods = {"forest", "softimpute", "pmm"};
    s.finalize();
    const ExperimentConfig& cfg = s.experiment;

    if (table1->parsed() || table2->parsed() || run->parsed()) {
      const SummaryTable table =
          table1->parsed() ? run_table1(cfg) : table2->parsed() ? run_table2(cfg) : run_grid(cfg);
      with_output(s, out, [&](std::ostream& o) { o << format_table(table, s.format); });
    } else if (figure->parsed()) {
      with_output(s, out, [&](std::ostream& o) { export_figure_data(cfg, o); });
    } else if (decompose->parsed()) {
      PopulationSpec spec{f.signal, s.var_prop, s.predictor_corr, cfg.pop_size};
      ExperimentConfig one = cfg;
      one.populations = {spec};
      one.validate();
      const Dataset pop = make_population(spec, one);
      const MissingnessSpec mech{parse_mechanism(f.mechanism), s.prop, s.mar_weights};
      const std::uint64_t key = hash_words({hash_label(population_key(spec)), hash_label(mechanism_key(mech))});
      RngStream sampling({cfg.base_seed, stream_id_for(key, 0, Purpose::decomposition)});
      const Dataset sample = draw_sample(pop, cfg.n_sample, sampling);
      RngStream amputation({cfg.base_seed, stream_id_for(key, 1, Purpose::decomposition)});
      const IncompleteDataset inc = ampute(sample, mech, amputation);
      RngStream imputation({cfg.base_seed, stream_id_for(key, 2, Purpose::decomposition)});
      const Coefficients c = coefficients(spec);
      const ImputationMethod m = make_method(s.decompose_method, s.method_options);
      const DecompositionResult d =
          decompose_mse(inc, sample, m, s.repeats, imputation, {c.beta1, c.beta2, c.noise_variance()});
      with_output(s, out, [&](std::ostream& o) {
        o << "signal,mechanism,method,bias_sq,variance,noise,total\n";
        o << signal_label(spec) << ',' << mechanism_label(mech.mechanism) << ',' << method_label(m);
        char buf[160];
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f\n", d.bias_sq, d.variance, d.noise, d.total);
        o << buf;
      });
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace impute
