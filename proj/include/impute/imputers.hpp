#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "impute/dataset.hpp"
#include "impute/forest.hpp"
#include "impute/linmodel.hpp"
#include "impute/random.hpp"

namespace impute {

namespace method {

/// Conditional mean: X_mis beta_hat.
struct Predict {};

/// X_mis beta + N(0, sigma^2) noise; with `bayes` the (beta, sigma) pair is
/// itself drawn from its posterior first.
struct Draw {
  bool bayes = false;
};

/// Predictive mean matching, type-1: observed rows are scored with beta_hat,
/// missing rows with a posterior draw of beta.
struct Pmm {
  Index donors = 5;
};

struct SoftImpute {
  Index rank_max = 2;
  double lambda = 0.0;
  Index max_iter = 200;
  double tol = 1e-5;
  bool center = false;  // subtract observed column means before factorizing
};

struct Forest {
  ForestParams params;
  Index max_outer_iter = 10;
};

}  // namespace method

using ImputationMethod = std::variant<method::Predict, method::Draw, method::Pmm, method::SoftImpute, method::Forest>;

/// Short label used in tables: predict, draw, draw_bayes, pmm, softimpute, forest.
std::string method_label(const ImputationMethod& m);

/// Label plus every parameter; distinct methods give distinct keys.
std::string method_key(const ImputationMethod& m);

/// Parses a table label back into a method with default parameters.
ImputationMethod parse_method(std::string_view label);

void validate(const ImputationMethod& m);

struct CompletedDataset {
  Dataset data;
  Mask imputed_mask;
  ImputationMethod method;
  bool converged = true;
  Index iterations = 0;
};

CompletedDataset impute_predict(const IncompleteDataset& inc);
CompletedDataset impute_draw(const IncompleteDataset& inc, RngStream& stream, bool bayes = false);
CompletedDataset impute_pmm(const IncompleteDataset& inc, RngStream& stream, Index donors = 5);
CompletedDataset impute_softimpute(const IncompleteDataset& inc, const method::SoftImpute& params, RngStream& stream);
CompletedDataset impute_dispatch(const IncompleteDataset& inc, const ImputationMethod& m, RngStream& stream);

/// Low-rank completion of a partially observed matrix: minimizes
/// 0.5 ||P_obs(X - A B')||^2 + 0.5 lambda (||A||^2 + ||B||^2) by alternating
/// ridge solves on the matrix completed with the current A B' (softImpute-ALS).
/// A starts as a random orthonormal n x r matrix and B at zero.
struct SoftImputeResult {
  Eigen::MatrixXd reconstruction;  // A B' (plus column means when centered)
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  std::vector<double> objective;  // after the initial B update, then after each sweep
  bool converged = false;
  Index iterations = 0;
};

SoftImputeResult soft_impute_als(const Eigen::MatrixXd& values, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& observed,
                                 const method::SoftImpute& params, RngStream& stream);

/// Indices of the `donors` observed predictions nearest to `target`
/// (sorted_obs holds observed predictions in ascending order).
std::vector<Index> nearest_donors(const std::vector<double>& sorted_obs, double target, Index donors);

}  // namespace impute
