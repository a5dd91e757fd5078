#include "impute/downstream.hpp"

#include <cmath>

#include "impute/linmodel.hpp"

namespace impute {

double standard_deviation(const Vector& v) {
  if (v.size() < 2) throw UndefinedStatistic("standard_deviation: fewer than two values");
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

double correlation(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidArgument("correlation: length mismatch");
  const auto da = (a.array() - a.mean()).eval();
  const auto db = (b.array() - b.mean()).eval();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (!(saa > 0.0) || !(sbb > 0.0)) throw UndefinedStatistic("correlation: zero-variance column");
  return (da * db).sum() / std::sqrt(saa * sbb);
}

namespace {

ParamSet estimate_common(const Dataset& completed, const Vector& truth_y) {
  const Vector& y = completed.y;
  if (!y.allFinite()) throw InvalidArgument("estimate_params: completed y has missing or non-finite values");
  const Index n = y.size();

  ParamSet out;
  out.mu = y.mean();
  out.sigma = standard_deviation(y);
  const double cut = quantile(truth_y, 0.9);
  out.p90 = 100.0 * static_cast<double>((y.array() > cut).count()) / static_cast<double>(n);
  out.rho = correlation(y, completed.x1);

  const DesignSpec outcome_model{Column::y, {Column::x1, Column::x2}, true};
  const OlsFitd fy = fit_ols(completed, outcome_model);
  out.gamma = fy.coefficients[1];
  out.r2_y = r_squared(fy, design_matrix(completed, outcome_model), y);

  const DesignSpec predictor_model{Column::x1, {Column::y, Column::x2}, true};
  const OlsFitd fx = fit_ols(completed, predictor_model);
  out.delta = fx.coefficients[1];
  out.r2_x = r_squared(fx, design_matrix(completed, predictor_model), completed.x1);
  return out;
}

}  // namespace

ParamSet estimate_params(const CompletedDataset& completed, const Dataset& truth) {
  if (truth.size() != completed.data.size()) throw InvalidArgument("estimate_params: completed and truth differ in length");
  ParamSet out = estimate_common(completed.data, truth.y);
  const Vector sq = (truth.y - completed.data.y).array().square().matrix();
  out.mse_full = sq.mean();
  double missing_sum = 0.0;
  Index missing = 0;
  for (Index i = 0; i < sq.size(); ++i) {
    if (completed.imputed_mask.size() == sq.size() && completed.imputed_mask[i]) {
      missing_sum += sq[i];
      ++missing;
    }
  }
  out.mse_missing = missing > 0 ? missing_sum / static_cast<double>(missing) : 0.0;
  return out;
}

ParamSet estimate_params(const Dataset& complete) { return estimate_common(complete, complete.y); }

DecompositionResult decompose_mse(const IncompleteDataset& inc, const Dataset& truth, const ImputationMethod& m,
                                  Index repeats, RngStream& stream, const GeneratorSurface& surface) {
  if (repeats < 2) throw InvalidArgument("decompose_mse: repeats must be at least 2");
  if (truth.size() != inc.size()) throw InvalidArgument("decompose_mse: truth and data differ in length");
  const auto missing = inc.missing_rows();
  const auto n0 = static_cast<Index>(missing.size());
  if (n0 == 0) throw InvalidArgument("decompose_mse: no missing values");

  Eigen::MatrixXd draws(n0, repeats);
  for (Index r = 0; r < repeats; ++r) {
    RngStream child = stream.spawn();
    const CompletedDataset c = impute_dispatch(inc, m, child);
    for (Index i = 0; i < n0; ++i) draws(i, r) = c.data.y[missing[static_cast<std::size_t>(i)]];
  }

  Vector truth_mis(n0), surface_mis(n0);
  for (Index i = 0; i < n0; ++i) {
    const Index row = missing[static_cast<std::size_t>(i)];
    truth_mis[i] = truth.y[row];
    surface_mis[i] = surface.beta1 * truth.x1[row] + surface.beta2 * truth.x2[row];
  }

  const Vector cell_mean = draws.rowwise().mean();
  DecompositionResult res;
  res.bias_sq = (cell_mean - surface_mis).squaredNorm() / static_cast<double>(n0);
  res.variance = (draws.colwise() - cell_mean).squaredNorm() / static_cast<double>(n0 * repeats);
  res.noise = surface.noise_variance;
  res.total = (draws.colwise() - truth_mis).squaredNorm() / static_cast<double>(n0 * repeats);
  return res;
}

}  // namespace impute
