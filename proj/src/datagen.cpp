#include "impute/datagen.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "impute/downstream.hpp"
#include "impute/errors.hpp"

namespace impute {

void PopulationSpec::validate() const {
  if (!(r_squared > 0.0 && r_squared < 1.0)) throw InvalidArgument("PopulationSpec: r_squared must lie in (0, 1)");
  if (var_prop[0] < 0.0 || var_prop[1] < 0.0) throw InvalidArgument("PopulationSpec: negative var_prop");
  if (std::fabs(var_prop[0] + var_prop[1] - 1.0) > 1e-6) throw InvalidArgument("PopulationSpec: var_prop must sum to 1");
  if (!(predictor_corr > -1.0 && predictor_corr < 1.0)) {
    throw InvalidArgument("PopulationSpec: predictor_corr must lie in (-1, 1)");
  }
  if (size < 1) throw InvalidArgument("PopulationSpec: size must be positive");
}

Coefficients coefficients(const PopulationSpec& spec) {
  spec.validate();
  return {std::sqrt(spec.r_squared * spec.var_prop[0]), std::sqrt(spec.r_squared * spec.var_prop[1]),
          std::sqrt(1.0 - spec.r_squared)};
}

Dataset generate_population(const PopulationSpec& spec, RngStream& stream) {
  const Coefficients c = coefficients(spec);
  Eigen::Matrix2d cov;
  cov << 1.0, spec.predictor_corr, spec.predictor_corr, 1.0;
  const Eigen::Matrix2d L = cov.llt().matrixL();

  Dataset pop{Vector(spec.size), Vector(spec.size), Vector(spec.size)};
  for (Index i = 0; i < spec.size; ++i) {
    const double z1 = stream.standard_normal();
    const double z2 = stream.standard_normal();
    const double e = stream.standard_normal();
    pop.x1[i] = L(0, 0) * z1;
    pop.x2[i] = L(1, 0) * z1 + L(1, 1) * z2;
    pop.y[i] = c.beta1 * pop.x1[i] + c.beta2 * pop.x2[i] + c.noise_sd * e;
  }
  return pop;
}

ParamSet ground_truth(const PopulationSpec& spec) {
  const Coefficients c = coefficients(spec);
  const double rx = spec.predictor_corr;
  const double noise = c.noise_variance();
  const double var_y = c.beta1 * c.beta1 + c.beta2 * c.beta2 + 2.0 * rx * c.beta1 * c.beta2 + noise;
  const double cov_y_x1 = c.beta1 + rx * c.beta2;
  const double cov_y_x2 = rx * c.beta1 + c.beta2;

  ParamSet truth;
  truth.mu = 0.0;
  truth.sigma = std::sqrt(var_y);
  truth.p90 = 10.0;
  truth.rho = cov_y_x1 / truth.sigma;
  truth.gamma = c.beta1;
  truth.r2_y = (var_y - noise) / var_y;

  // x1 ~ y + x2: solve the 2x2 normal equations on the population moments.
  Eigen::Matrix2d moments;
  moments << var_y, cov_y_x2, cov_y_x2, 1.0;
  const Eigen::Vector2d rhs(cov_y_x1, rx);
  const Eigen::Vector2d coef = moments.llt().solve(rhs);
  truth.delta = coef[0];
  truth.r2_x = coef.dot(rhs);  // Var(x1) = 1
  truth.mse_full = 0.0;
  truth.mse_missing = 0.0;
  return truth;
}

Dataset draw_sample(const Dataset& population, Index n, RngStream& stream) {
  if (n > population.size()) {
    throw InvalidArgument("draw_sample: n = " + std::to_string(n) + " exceeds population size " +
                          std::to_string(population.size()));
  }
  return population.rows(sample_without_replacement(stream, population.size(), n));
}

}  // namespace impute
