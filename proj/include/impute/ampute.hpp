#pragma once

#include <array>
#include <cmath>
#include <string>

#include "impute/dataset.hpp"
#include "impute/random.hpp"

namespace impute {

enum class Mechanism { mcar, mar_right };

std::string mechanism_label(Mechanism m);  // "MCAR" / "MAR"

/// Missingness on y. Under MAR_RIGHT the probability of a missing y rises
/// with the standardized weighted sum of the observed columns.
struct MissingnessSpec {
  Mechanism mechanism = Mechanism::mcar;
  double prop = 0.5;
  std::array<double, 3> weights{1.0, 0.0, 0.0};  // over (x1, x2, y); y's weight is ignored

  void validate() const;

  static MissingnessSpec mcar(double prop = 0.5) { return {Mechanism::mcar, prop, {1.0, 0.0, 0.0}}; }
  static MissingnessSpec mar_right(double prop = 0.5) { return {Mechanism::mar_right, prop, {1.0, 0.0, 0.0}}; }
};

IncompleteDataset ampute(const Dataset& data, const MissingnessSpec& spec, RngStream& stream);

/// Shift b with mean(logistic(s_i + b)) == prop, by bisection.
double solve_shift(const Vector& scores, double prop);

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace impute
