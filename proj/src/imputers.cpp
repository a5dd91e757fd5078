#include "impute/imputers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "impute/errors.hpp"

namespace impute {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

/// Observed/missing split of an incomplete dataset with the y ~ x1 + x2 fit.
struct ObservedSplit {
  std::vector<Index> observed;
  std::vector<Index> missing;
  Eigen::MatrixX2d x_obs;
  Eigen::MatrixX2d x_mis;
  Vector y_obs;

  explicit ObservedSplit(const IncompleteDataset& inc)
      : observed(inc.observed_rows()),
        missing(inc.missing_rows()),
        x_obs(predictor_matrix(inc.data, observed)),
        x_mis(predictor_matrix(inc.data, missing)),
        y_obs(static_cast<Index>(observed.size())) {
    for (std::size_t i = 0; i < observed.size(); ++i) y_obs[static_cast<Index>(i)] = inc.data.y[observed[i]];
  }
};

CompletedDataset fill(const IncompleteDataset& inc, const std::vector<Index>& missing, const Vector& values,
                      ImputationMethod m) {
  CompletedDataset out{inc.data, inc.mask, std::move(m), true, 1};
  for (std::size_t i = 0; i < missing.size(); ++i) out.data.y[missing[i]] = values[static_cast<Index>(i)];
  return out;
}

/// Solution operator of min ||M a - v||^2 + lambda ||a||^2 as a matrix S with
/// a = S v. The pseudo-inverse keeps rank-deficient M at a minimizer.
Eigen::MatrixXd ridge_solver(const Eigen::MatrixXd& M, double lambda) {
  Eigen::MatrixXd gram = M.transpose() * M;
  gram.diagonal().array() += lambda;
  return gram.completeOrthogonalDecomposition().pseudoInverse() * M.transpose();
}

}  // namespace

std::string method_label(const ImputationMethod& m) {
  return std::visit(overloaded{[](const method::Predict&) { return std::string("predict"); },
                               [](const method::Draw& d) { return std::string(d.bayes ? "draw_bayes" : "draw"); },
                               [](const method::Pmm&) { return std::string("pmm"); },
                               [](const method::SoftImpute&) { return std::string("softimpute"); },
                               [](const method::Forest&) { return std::string("forest"); }},
                    m);
}

std::string method_key(const ImputationMethod& m) {
  std::ostringstream out;
  out.precision(17);
  out << method_label(m);
  std::visit(overloaded{[](const method::Predict&) {}, [](const method::Draw&) {},
                        [&](const method::Pmm& p) { out << ";donors=" << p.donors; },
                        [&](const method::SoftImpute& s) {
                          out << ";rank=" << s.rank_max << ";lambda=" << s.lambda << ";maxit=" << s.max_iter
                              << ";tol=" << s.tol << ";center=" << s.center;
                        },
                        [&](const method::Forest& f) {
                          out << ";trees=" << f.params.n_trees << ";mtry=" << f.params.mtry
                              << ";min_node=" << f.params.min_node_size << ";bootstrap=" << f.params.bootstrap
                              << ";outer=" << f.max_outer_iter;
                        }},
             m);
  return out.str();
}

ImputationMethod parse_method(std::string_view label) {
  if (label == "predict") return method::Predict{};
  if (label == "draw") return method::Draw{false};
  if (label == "draw_bayes") return method::Draw{true};
  if (label == "pmm") return method::Pmm{};
  if (label == "softimpute") return method::SoftImpute{};
  if (label == "forest") return method::Forest{};
  throw InvalidArgument("unknown imputation method '" + std::string(label) +
                        "' (expected predict, draw, draw_bayes, pmm, softimpute or forest)");
}

void validate(const ImputationMethod& m) {
  std::visit(overloaded{[](const method::Predict&) {}, [](const method::Draw&) {},
                        [](const method::Pmm& p) {
                          if (p.donors < 1) throw InvalidArgument("pmm: donors must be at least 1");
                        },
                        [](const method::SoftImpute& s) {
                          if (s.rank_max < 1) throw InvalidArgument("softimpute: rank_max must be at least 1");
                          if (s.lambda < 0.0) throw InvalidArgument("softimpute: lambda must be non-negative");
                          if (s.max_iter < 1) throw InvalidArgument("softimpute: max_iter must be at least 1");
                          if (!(s.tol > 0.0)) throw InvalidArgument("softimpute: tol must be positive");
                        },
                        [](const method::Forest& f) {
                          f.params.validate(2);
                          if (f.max_outer_iter < 1) throw InvalidArgument("forest: max_outer_iter must be at least 1");
                        }},
             m);
}

CompletedDataset impute_predict(const IncompleteDataset& inc) {
  const ObservedSplit split(inc);
  const OlsFitd fit = fit_ols(split.x_obs, split.y_obs);
  return fill(inc, split.missing, predict(fit, split.x_mis), method::Predict{});
}

CompletedDataset impute_draw(const IncompleteDataset& inc, RngStream& stream, bool bayes) {
  const ObservedSplit split(inc);
  const OlsFitd fit = fit_ols(split.x_obs, split.y_obs);
  Vector beta = fit.coefficients;
  double sigma = std::sqrt(fit.residual_variance);
  if (bayes) std::tie(beta, sigma) = bayes_param_draw(fit, stream);
  Vector values = split.x_mis * beta.tail(2);
  values.array() += beta[0];
  values += sigma * draw_standard_normal(stream, values.size());
  return fill(inc, split.missing, values, method::Draw{bayes});
}

std::vector<Index> nearest_donors(const std::vector<double>& sorted_obs, double target, Index donors) {
  const auto n = static_cast<Index>(sorted_obs.size());
  if (donors < 1 || donors > n) throw InvalidArgument("nearest_donors: donors must lie in [1, observed count]");
  Index right = std::lower_bound(sorted_obs.begin(), sorted_obs.end(), target) - sorted_obs.begin();
  Index left = right - 1;
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(donors));
  while (static_cast<Index>(out.size()) < donors) {
    const bool take_left =
        right >= n || (left >= 0 && target - sorted_obs[static_cast<std::size_t>(left)] <=
                                        sorted_obs[static_cast<std::size_t>(right)] - target);
    out.push_back(take_left ? left-- : right++);
  }
  return out;
}

CompletedDataset impute_pmm(const IncompleteDataset& inc, RngStream& stream, Index donors) {
  if (donors < 1) throw InvalidArgument("pmm: donors must be at least 1");
  const ObservedSplit split(inc);
  if (donors > split.y_obs.size()) {
    throw InvalidArgument("pmm: " + std::to_string(donors) + " donors requested but only " +
                          std::to_string(split.y_obs.size()) + " observed rows");
  }
  const OlsFitd fit = fit_ols(split.x_obs, split.y_obs);
  const Vector yhat_obs = predict(fit, split.x_obs);
  const auto [beta, sigma] = bayes_param_draw(fit, stream);
  (void)sigma;
  Vector yhat_mis = split.x_mis * beta.tail(2);
  yhat_mis.array() += beta[0];

  std::vector<Index> order(static_cast<std::size_t>(yhat_obs.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return yhat_obs[a] < yhat_obs[b]; });
  std::vector<double> sorted(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = yhat_obs[order[i]];

  Vector values(yhat_mis.size());
  for (Index i = 0; i < yhat_mis.size(); ++i) {
    const auto pool = nearest_donors(sorted, yhat_mis[i], donors);
    const Index pick = pool[static_cast<std::size_t>(stream.below(static_cast<std::uint64_t>(donors)))];
    values[i] = split.y_obs[order[static_cast<std::size_t>(pick)]];
  }
  return fill(inc, split.missing, values, method::Pmm{donors});
}

SoftImputeResult soft_impute_als(const Eigen::MatrixXd& values,
                                 const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& observed,
                                 const method::SoftImpute& params, RngStream& stream) {
  validate(ImputationMethod{params});
  const Index n = values.rows();
  const Index m = values.cols();
  if (observed.rows() != n || observed.cols() != m) throw InvalidArgument("soft_impute_als: mask shape mismatch");
  if (n == 0 || m == 0) throw InvalidArgument("soft_impute_als: empty matrix");
  const Index rank = std::min({params.rank_max, n, m});
  const double lambda = params.lambda;

  // Unobserved entries are zeroed so they can never leak into a product.
  Eigen::MatrixXd v = observed.select(values, 0.0);
  Eigen::RowVectorXd means = Eigen::RowVectorXd::Zero(m);
  if (params.center) {
    for (Index j = 0; j < m; ++j) {
      const Index count = observed.col(j).count();
      if (count > 0) means[j] = v.col(j).sum() / static_cast<double>(count);
    }
    v = observed.select(v.rowwise() - means, 0.0);
  }

  SoftImputeResult res;
  {
    Eigen::MatrixXd init(n, rank);
    for (Index c = 0; c < rank; ++c) init.col(c) = draw_standard_normal(stream, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(init);
    res.a = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
  }
  res.b = Eigen::MatrixXd::Zero(m, rank);

  // Each half-step fills the unobserved cells from the current A B' and solves
  // the ridge problem on the filled matrix; this majorizes the observed-entry
  // objective, so the objective never increases.
  const auto filled = [&] { return Eigen::MatrixXd(observed.select(v, res.a * res.b.transpose())); };
  const auto update_b = [&] { res.b = (ridge_solver(res.a, lambda) * filled()).transpose(); };
  const auto update_a = [&] { res.a = (ridge_solver(res.b, lambda) * filled().transpose()).transpose(); };
  const auto objective = [&] {
    const Eigen::MatrixXd fitted = res.a * res.b.transpose();
    const double loss = observed.select(v - fitted, 0.0).matrix().squaredNorm();
    return 0.5 * loss + 0.5 * lambda * (res.a.squaredNorm() + res.b.squaredNorm());
  };

  update_b();
  res.objective.push_back(objective());
  for (Index iter = 1; iter <= params.max_iter; ++iter) {
    update_a();
    update_b();
    const double before = res.objective.back();
    const double after = objective();
    res.objective.push_back(after);
    res.iterations = iter;
    const double scale = std::max(before, std::numeric_limits<double>::min());
    if (after == 0.0 || (before - after) / scale < params.tol) {
      res.converged = true;
      break;
    }
  }
  res.reconstruction = res.a * res.b.transpose();
  res.reconstruction.rowwise() += means;
  return res;
}

CompletedDataset impute_softimpute(const IncompleteDataset& inc, const method::SoftImpute& params, RngStream& stream) {
  const Index n = inc.size();
  Eigen::MatrixXd values(n, 3);
  values.col(0) = inc.data.x1;
  values.col(1) = inc.data.x2;
  values.col(2) = inc.data.y;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed(n, 3);
  observed.col(0).setConstant(true);
  observed.col(1).setConstant(true);
  observed.col(2) = !inc.mask;

  const SoftImputeResult res = soft_impute_als(values, observed, params, stream);
  CompletedDataset out{inc.data, inc.mask, params, res.converged, res.iterations};
  for (Index i = 0; i < n; ++i)
    if (inc.mask[i]) out.data.y[i] = res.reconstruction(i, 2);
  return out;
}

CompletedDataset impute_dispatch(const IncompleteDataset& inc, const ImputationMethod& m, RngStream& stream) {
  validate(m);
  return std::visit(
      overloaded{[&](const method::Predict&) { return impute_predict(inc); },
                 [&](const method::Draw& d) { return impute_draw(inc, stream, d.bayes); },
                 [&](const method::Pmm& p) { return impute_pmm(inc, stream, p.donors); },
                 [&](const method::SoftImpute& s) { return impute_softimpute(inc, s, stream); },
                 [&](const method::Forest& f) { return impute_forest(inc, f.params, f.max_outer_iter, stream); }},
      m);
}

}  // namespace impute
