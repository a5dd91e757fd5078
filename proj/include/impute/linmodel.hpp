#pragma once

// Ordinary least squares through the Cholesky factor of the normal equations.
// The designs here have at most a handful of columns, so forming X'X is
// harmless; rank-deficient designs are rejected rather than regularized.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "impute/dataset.hpp"
#include "impute/errors.hpp"
#include "impute/random.hpp"

namespace impute {

/// Pivot of the Cholesky factor relative to the column's own cross product;
/// it equals 1 - R^2 of that column regressed on the earlier columns.
inline constexpr double kCollinearityTolerance = 1e-10;

template <typename Scalar>
struct OlsFit {
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  VectorType coefficients;  // intercept first when present
  Scalar residual_variance = 0;
  Index n_obs = 0;
  Index p = 0;  // predictors, intercept excluded
  bool intercept = true;
  MatrixType crossprod_factor;  // lower L with L L' = D'D, D the design incl. intercept column

  /// Residual degrees of freedom, n - p - 1 with an intercept.
  Index dof() const { return n_obs - p - (intercept ? 1 : 0); }

  Scalar intercept_value() const { return intercept ? coefficients[0] : Scalar(0); }

  /// Slopes without the intercept.
  auto slopes() const { return coefficients.tail(p); }
};

using OlsFitd = OlsFit<double>;

namespace detail {

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> design_with_intercept(
    const Eigen::MatrixBase<Derived>& X, bool intercept) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> D(X.rows(), X.cols() + (intercept ? 1 : 0));
  if (intercept) {
    D.col(0).setOnes();
    D.rightCols(X.cols()) = X;
  } else {
    D = X;
  }
  return D;
}

}  // namespace detail

/// Fits y on the columns of X (n x p), plus an intercept unless disabled.
template <typename DerivedX, typename DerivedY>
OlsFit<typename DerivedX::Scalar> fit_ols(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                                          bool intercept = true) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (X.rows() != y.size()) throw InvalidArgument("fit_ols: X and y differ in row count");
  const Index n = X.rows();
  const Index p = X.cols();
  const Index k = p + (intercept ? 1 : 0);
  if (k == 0) throw InvalidArgument("fit_ols: empty design");
  if (n <= k) {
    throw InsufficientData("fit_ols: " + std::to_string(n) + " observations for " + std::to_string(k) +
                           " coefficients");
  }

  const Matrix D = detail::design_with_intercept(X, intercept);
  const Matrix xtx = D.transpose() * D;
  Eigen::LLT<Matrix> llt(xtx);
  if (llt.info() != Eigen::Success) throw SingularDesign("fit_ols: X'X is not positive definite");
  const Matrix L = llt.matrixL();
  for (Index j = 0; j < k; ++j) {
    const Scalar pivot = L(j, j) * L(j, j);
    if (!(pivot > Scalar(kCollinearityTolerance) * xtx(j, j))) {
      throw SingularDesign("fit_ols: design column " + std::to_string(j) + " is collinear with earlier columns");
    }
  }

  OlsFit<Scalar> fit;
  fit.coefficients = llt.solve(D.transpose() * y);
  const auto residuals = (y - D * fit.coefficients).eval();
  fit.n_obs = n;
  fit.p = p;
  fit.intercept = intercept;
  fit.residual_variance = residuals.squaredNorm() / static_cast<Scalar>(n - k);
  fit.crossprod_factor = L;
  return fit;
}

/// Fitted values f(X; beta) for rows of X (n x p, no intercept column).
template <typename Scalar, typename DerivedX>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> predict(const OlsFit<Scalar>& fit, const Eigen::MatrixBase<DerivedX>& X) {
  if (X.cols() != fit.p) {
    throw InvalidArgument("predict: expected " + std::to_string(fit.p) + " predictor columns, got " +
                          std::to_string(X.cols()));
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = X * fit.slopes();
  out.array() += fit.intercept_value();
  return out;
}

/// 1 - SSE/SST over the supplied rows.
template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar r_squared(const OlsFit<Scalar>& fit, const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y) {
  const auto fitted = predict(fit, X);
  const Scalar sse = (y - fitted).squaredNorm();
  const Scalar sst = (y.array() - y.mean()).matrix().squaredNorm();
  if (!(sst > Scalar(0))) throw UndefinedStatistic("r_squared: response has zero variance");
  return Scalar(1) - sse / sst;
}

/// One draw of (beta, sigma) from the normal / scaled-inverse-chi-square
/// posterior: sigma^2 = s^2 * dof / chi2(dof), beta = beta_hat + sigma * C z
/// with C C' = (D'D)^{-1}.
template <typename Scalar>
std::pair<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>, Scalar> bayes_param_draw(const OlsFit<Scalar>& fit,
                                                                             RngStream& stream) {
  const Index dof = fit.dof();
  const Scalar chi2 = static_cast<Scalar>(draw_chi_square(stream, dof));
  const Scalar sigma = std::sqrt(fit.residual_variance * static_cast<Scalar>(dof) / chi2);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z =
      draw_standard_normal(stream, fit.coefficients.size()).template cast<Scalar>();
  // (D'D)^{-1} = L^{-T} L^{-1}, so C = L^{-T}.
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> offset =
      fit.crossprod_factor.template triangularView<Eigen::Lower>().transpose().solve(z);
  return {fit.coefficients + sigma * offset, sigma};
}

/// Named regression on a Dataset.
struct DesignSpec {
  Column response = Column::y;
  std::vector<Column> predictors;
  bool intercept = true;

  void validate() const {
    if (predictors.empty()) throw InvalidArgument("DesignSpec: no predictors");
    for (std::size_t i = 0; i < predictors.size(); ++i) {
      if (predictors[i] == response) throw InvalidArgument("DesignSpec: response listed as predictor");
      for (std::size_t j = 0; j < i; ++j)
        if (predictors[i] == predictors[j]) throw InvalidArgument("DesignSpec: duplicate predictor");
    }
  }
};

inline Eigen::MatrixXd design_matrix(const Dataset& data, const DesignSpec& spec) {
  Eigen::MatrixXd X(data.size(), static_cast<Index>(spec.predictors.size()));
  for (std::size_t j = 0; j < spec.predictors.size(); ++j) X.col(static_cast<Index>(j)) = data.column(spec.predictors[j]);
  return X;
}

inline Eigen::MatrixXd design_matrix(const Dataset& data, const DesignSpec& spec, const std::vector<Index>& rows) {
  Eigen::MatrixXd X(static_cast<Index>(rows.size()), static_cast<Index>(spec.predictors.size()));
  for (std::size_t j = 0; j < spec.predictors.size(); ++j) {
    const Vector& col = data.column(spec.predictors[j]);
    for (std::size_t i = 0; i < rows.size(); ++i) X(static_cast<Index>(i), static_cast<Index>(j)) = col[rows[i]];
  }
  return X;
}

inline OlsFitd fit_ols(const Dataset& data, const DesignSpec& spec) {
  spec.validate();
  return fit_ols(design_matrix(data, spec), data.column(spec.response), spec.intercept);
}

inline OlsFitd fit_ols(const Dataset& data, const DesignSpec& spec, const std::vector<Index>& rows) {
  spec.validate();
  const Vector& response = data.column(spec.response);
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<Index>(i)] = response[rows[i]];
  return fit_ols(design_matrix(data, spec, rows), y, spec.intercept);
}

}  // namespace impute
