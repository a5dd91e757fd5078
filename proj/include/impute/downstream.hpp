#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "impute/dataset.hpp"
#include "impute/errors.hpp"
#include "impute/imputers.hpp"
#include "impute/random.hpp"

namespace impute {

/// Downstream quantities of one completed dataset. p90 is a percentage.
struct ParamSet {
  double mu = 0;
  double sigma = 0;
  double p90 = 0;
  double rho = 0;
  double gamma = 0;
  double r2_y = 0;
  double delta = 0;
  double r2_x = 0;
  double mse_full = 0;
  double mse_missing = 0;

  static constexpr std::size_t kFieldCount = 10;
  static constexpr std::array<double ParamSet::*, kFieldCount> kFields{
      &ParamSet::mu,   &ParamSet::sigma, &ParamSet::p90,  &ParamSet::rho,      &ParamSet::gamma,
      &ParamSet::r2_y, &ParamSet::delta, &ParamSet::r2_x, &ParamSet::mse_full, &ParamSet::mse_missing};
  static constexpr std::array<std::string_view, kFieldCount> kNames{
      "mu", "sigma", "p90", "rho", "gamma", "r2_y", "delta", "r2_x", "mse_full", "mse_missing"};

  double& operator[](std::size_t i) { return this->*kFields[i]; }
  double operator[](std::size_t i) const { return this->*kFields[i]; }
};

/// Sample quantile by linear interpolation between order statistics
/// floor(h) and floor(h) + 1, h = (n - 1) q.
template <typename Derived>
typename Derived::Scalar quantile(const Eigen::DenseBase<Derived>& values, double q) {
  using Scalar = typename Derived::Scalar;
  if (values.size() == 0) throw InvalidArgument("quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile: q must lie in [0, 1]");
  std::vector<Scalar> sorted(static_cast<std::size_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i) sorted[static_cast<std::size_t>(i)] = values.derived().coeff(i);
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const Scalar frac = static_cast<Scalar>(h - static_cast<double>(lo));
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

/// Sample correlation; throws UndefinedStatistic on a constant column.
double correlation(const Vector& a, const Vector& b);

/// Sample standard deviation (denominator n - 1).
double standard_deviation(const Vector& v);

/// Downstream parameters of `completed` against the true sample `truth`:
/// moments of y, P90 against the 0.9 quantile of truth.y, corr(y, x1), and the
/// two regressions y ~ x1 + x2 and x1 ~ y + x2.
ParamSet estimate_params(const CompletedDataset& completed, const Dataset& truth);

/// Parameters of a fully observed dataset against itself (population rows).
ParamSet estimate_params(const Dataset& complete);

/// Noiseless generator surface f(x) = beta1 x1 + beta2 x2 and its noise variance.
struct GeneratorSurface {
  double beta1 = 0;
  double beta2 = 0;
  double noise_variance = 0;
};

struct DecompositionResult {
  double bias_sq = 0;
  double variance = 0;
  double noise = 0;
  double total = 0;
};

/// Imputes the same incomplete dataset `repeats` times with fresh child
/// streams. Per masked cell: bias against the generator surface, spread
/// across repeats (denominator `repeats`), and the generator noise. `total`
/// is the mean over repeats of the per-missing MSE.
DecompositionResult decompose_mse(const IncompleteDataset& inc, const Dataset& truth, const ImputationMethod& m,
                                  Index repeats, RngStream& stream, const GeneratorSurface& surface);

}  // namespace impute
