#pragma once

#include <array>

#include "impute/dataset.hpp"
#include "impute/random.hpp"

namespace impute {

struct ParamSet;

/// Synthetic population: (x1, x2) standard bivariate normal with correlation
/// `predictor_corr`, y = beta1 x1 + beta2 x2 + e with Var(e) = 1 - r_squared.
struct PopulationSpec {
  double r_squared = 0.8;
  std::array<double, 2> var_prop{0.8, 0.2};
  double predictor_corr = 0.5;
  Index size = 1'000'000;

  void validate() const;
};

struct Coefficients {
  double beta1 = 0;
  double beta2 = 0;
  double noise_sd = 0;

  double noise_variance() const { return noise_sd * noise_sd; }
};

Coefficients coefficients(const PopulationSpec& spec);

Dataset generate_population(const PopulationSpec& spec, RngStream& stream);

/// Closed-form downstream parameters of the population (mse fields are 0,
/// p90 is 10 by construction).
ParamSet ground_truth(const PopulationSpec& spec);

/// n rows drawn without replacement.
Dataset draw_sample(const Dataset& population, Index n, RngStream& stream);

}  // namespace impute
