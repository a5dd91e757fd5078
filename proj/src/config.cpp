#include "impute/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "impute/errors.hpp"

namespace impute {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    const auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, const std::string& where) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument(where + ": cannot parse '" + std::string(s) + "' as a number");
  }
  return v;
}

bool parse_bool(std::string_view s, const std::string& where) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw InvalidArgument(where + ": expected a boolean, got '" + std::string(s) + "'");
}

template <typename T>
std::vector<T> parse_numbers(std::string_view s, const std::string& where) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) out.push_back(parse_number<T>(item, where));
  return out;
}

}  // namespace

ImputationMethod make_method(std::string_view label, const MethodOptions& opts) {
  ImputationMethod m = parse_method(label);
  if (std::holds_alternative<method::Pmm>(m)) return opts.pmm;
  if (std::holds_alternative<method::SoftImpute>(m)) return opts.soft;
  if (std::holds_alternative<method::Forest>(m)) return opts.forest;
  return m;
}

Mechanism parse_mechanism(std::string_view label) {
  if (label == "MCAR" || label == "mcar") return Mechanism::mcar;
  if (label == "MAR" || label == "mar" || label == "MAR_RIGHT" || label == "mar_right") return Mechanism::mar_right;
  throw InvalidArgument("unknown mechanism '" + std::string(label) + "' (expected MCAR or MAR)");
}

TableStyle parse_style(std::string_view label) {
  if (label == "csv") return TableStyle::csv;
  if (label == "markdown" || label == "md") return TableStyle::markdown;
  throw InvalidArgument("unknown format '" + std::string(label) + "' (expected csv or markdown)");
}

void RunSettings::finalize() {
  experiment.populations.clear();
  for (double r2 : r_squared) experiment.populations.push_back({r2, var_prop, predictor_corr, experiment.pop_size});
  experiment.mechanisms.clear();
  for (const auto& m : mechanisms) experiment.mechanisms.push_back({parse_mechanism(m), prop, mar_weights});
  experiment.methods.clear();
  for (const auto& m : methods) experiment.methods.push_back(make_method(m, method_options));
}

void apply_config_text(std::string_view text, const std::string& origin, RunSettings& s) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const std::string_view raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    auto& e = s.experiment;
    auto& o = s.method_options;
    if (key == "r_squared") {
      s.r_squared = parse_numbers<double>(value, where);
    } else if (key == "var_prop") {
      const auto v = parse_numbers<double>(value, where);
      if (v.size() != 2) throw InvalidArgument(where + ": var_prop needs two values");
      s.var_prop = {v[0], v[1]};
    } else if (key == "predictor_corr") {
      s.predictor_corr = parse_number<double>(value, where);
    } else if (key == "mechanisms") {
      s.mechanisms = split_list(value);
    } else if (key == "prop") {
      s.prop = parse_number<double>(value, where);
    } else if (key == "mar_weights") {
      const auto v = parse_numbers<double>(value, where);
      if (v.size() != 3) throw InvalidArgument(where + ": mar_weights needs three values");
      s.mar_weights = {v[0], v[1], v[2]};
    } else if (key == "methods") {
      s.methods = split_list(value);
    } else if (key == "samples" || key == "n_sample") {
      e.n_sample = parse_number<Index>(value, where);
    } else if (key == "reps" || key == "t_rep") {
      e.t_rep = parse_number<Index>(value, where);
    } else if (key == "seed" || key == "base_seed") {
      e.base_seed = parse_number<std::uint64_t>(value, where);
    } else if (key == "pop_size") {
      e.pop_size = parse_number<Index>(value, where);
    } else if (key == "threads") {
      e.threads = parse_number<unsigned>(value, where);
    } else if (key == "format") {
      s.format = parse_style(value);
    } else if (key == "out") {
      s.out = std::string(value);
    } else if (key == "pmm_donors") {
      o.pmm.donors = parse_number<Index>(value, where);
    } else if (key == "soft_rank") {
      o.soft.rank_max = parse_number<Index>(value, where);
    } else if (key == "soft_lambda") {
      o.soft.lambda = parse_number<double>(value, where);
    } else if (key == "soft_max_iter") {
      o.soft.max_iter = parse_number<Index>(value, where);
    } else if (key == "soft_tol") {
      o.soft.tol = parse_number<double>(value, where);
    } else if (key == "soft_center") {
      o.soft.center = parse_bool(value, where);
    } else if (key == "forest_trees") {
      o.forest.params.n_trees = parse_number<Index>(value, where);
    } else if (key == "forest_mtry") {
      o.forest.params.mtry = parse_number<Index>(value, where);
    } else if (key == "forest_min_node") {
      o.forest.params.min_node_size = parse_number<Index>(value, where);
    } else if (key == "forest_bootstrap") {
      o.forest.params.bootstrap = parse_bool(value, where);
    } else if (key == "forest_max_iter") {
      o.forest.max_outer_iter = parse_number<Index>(value, where);
    } else if (key == "method") {
      s.decompose_method = std::string(value);
    } else if (key == "repeats") {
      s.repeats = parse_number<Index>(value, where);
    } else {
      throw InvalidArgument(where + ": unknown key '" + key + "'");
    }
  }
}

void load_config_file(const std::string& path, RunSettings& settings) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(text.str(), path, settings);
}

}  // namespace impute
