#include "doctest.h"
#include "impute/errors.hpp"
#include "impute/forest.hpp"
#include "impute/imputers.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace impute;

namespace {

Eigen::MatrixXd uniform_design(Index n, Index p, std::uint64_t seed) {
  RngStream s({seed, 31});
  Eigen::MatrixXd X(n, p);
  for (Index j = 0; j < p; ++j) X.col(j) = draw_uniform(s, n);
  return X;
}

double mse(const Vector& a, const Vector& b) { return (a - b).squaredNorm() / static_cast<double>(a.size()); }

}  // namespace

TEST_CASE("constant response gives a single leaf") {
  const Eigen::MatrixXd X = uniform_design(50, 2, 1);
  const Vector y = Vector::Constant(50, 4.2);
  RngStream s({1, 1});
  const auto tree = fit_tree(X, y, ForestParams{}, s);
  CHECK(tree.leaf_count() == 1);
  CHECK(tree.predict(uniform_design(5, 2, 2)).isApproxToConstant(4.2));
}

TEST_CASE("a tree learns a step function") {
  const Eigen::MatrixXd X = uniform_design(100, 1, 3);
  Vector y(100);
  for (Index i = 0; i < 100; ++i) y[i] = X(i, 0) < 0.5 ? 0.0 : 1.0;
  RngStream s({3, 3});
  ForestParams p;
  p.mtry = 1;
  const auto tree = fit_tree(X, y, p, s);
  CHECK(mse(tree.predict(X), y) < 0.01);
}

TEST_CASE("leaves respect the minimum node size") {
  const Eigen::MatrixXd X = uniform_design(300, 2, 4);
  const Vector y = X.col(0) + X.col(1).array().sin().matrix();
  for (Index m : {1, 5, 17}) {
    ForestParams p;
    p.min_node_size = m;
    p.mtry = 2;
    RngStream s({4, 4});
    const auto tree = fit_tree(X, y, p, s);
    for (const auto& node : tree.nodes()) {
      if (node.feature < 0) CHECK(node.count >= m);
    }
  }
}

TEST_CASE("ties go to the lowest feature index") {
  const Eigen::MatrixXd base = uniform_design(60, 1, 5);
  Eigen::MatrixXd X(60, 2);
  X << base, base;
  const Vector y = (base.array() > 0.3).cast<double>().matrix();
  ForestParams p;
  p.mtry = 2;
  RngStream s({5, 5});
  const auto tree = fit_tree(X, y, p, s);
  for (const auto& node : tree.nodes())
    if (node.feature >= 0) CHECK(node.feature == 0);
}

TEST_CASE("predictions stay inside the observed response range") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Eigen::MatrixXd X = uniform_design(60, 2, seed);
    RngStream n({seed, 9});
    const Vector y = draw_standard_normal(n, 60) + 3.0 * X.col(0);
    ForestParams p;
    p.n_trees = 10;
    RngStream s({seed, 10});
    const Forest f = fit_forest(X, y, p, s);
    const Vector pred = predict_forest(f, uniform_design(40, 2, seed + 1000) * 3.0 - Eigen::MatrixXd::Ones(40, 2));
    CHECK(pred.minCoeff() >= y.minCoeff());
    CHECK(pred.maxCoeff() <= y.maxCoeff());
  }
}

TEST_CASE("a one-tree forest predicts like its tree") {
  const Eigen::MatrixXd X = uniform_design(80, 2, 6);
  const Vector y = X.col(0) - X.col(1);
  ForestParams p;
  p.n_trees = 1;
  RngStream s({6, 6});
  const Forest f = fit_forest(X, y, p, s);
  REQUIRE(f.size() == 1);
  const Eigen::MatrixXd T = uniform_design(30, 2, 7);
  CHECK(predict_forest(f, T) == f[0].predict(T));
}

TEST_CASE("forest generalizes on a linear signal") {
  const Dataset train = testing::sample_dataset(0.8, 2000, 8);
  const Dataset test = testing::sample_dataset(0.8, 2000, 9);
  RngStream s({8, 8});
  const Forest f = fit_forest(predictor_matrix(train), train.y, ForestParams{}, s);
  const Vector pred = predict_forest(f, predictor_matrix(test));
  const double r2 = 1.0 - mse(pred, test.y) / oracle::variance(test.y);
  CHECK(r2 > 0.6);
}

TEST_CASE("more trees do not hurt held-out error") {
  double few = 0, many = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset train = testing::sample_dataset(0.5, 300, 100 + seed);
    const Dataset test = testing::sample_dataset(0.5, 300, 200 + seed);
    ForestParams p;
    p.n_trees = 10;
    RngStream a({seed, 1});
    few += mse(predict_forest(fit_forest(predictor_matrix(train), train.y, p, a), predictor_matrix(test)), test.y);
    p.n_trees = 100;
    RngStream b({seed, 2});
    many += mse(predict_forest(fit_forest(predictor_matrix(train), train.y, p, b), predictor_matrix(test)), test.y);
  }
  CHECK(many <= 1.05 * few);
}

TEST_CASE("tree fitting is thread-count invariant") {
  const Dataset d = testing::sample_dataset(0.8, 500, 10);
  ForestParams p;
  p.n_trees = 16;
  RngStream a({10, 1}), b({10, 1});
  const Forest one = fit_forest(predictor_matrix(d), d.y, p, a);
  p.threads = 4;
  const Forest four = fit_forest(predictor_matrix(d), d.y, p, b);
  const Eigen::MatrixXd X = predictor_matrix(d);
  CHECK(predict_forest(one, X) == predict_forest(four, X));
}

TEST_CASE("forest imputation") {
  const Dataset d = testing::sample_dataset(0.8, 200, 11);
  RngStream s({11, 11});
  const auto same = impute_forest(IncompleteDataset{d, Mask::Constant(d.size(), false), d.y}, ForestParams{}, 10, s);
  CHECK(same.data.y == d.y);

  Dataset smooth = testing::sample_dataset(0.8, 1000, 12);
  smooth.y = 0.8 * smooth.x1 + 0.4 * smooth.x2;
  const auto inc = testing::amputed(smooth, MissingnessSpec::mcar(), 12);
  const auto c = impute_forest(inc, ForestParams{}, 10, s);
  const auto miss = inc.missing_rows();
  CHECK(mse(testing::pick(c.data.y, miss), testing::pick(smooth.y, miss)) < 0.05);
  for (Index i : inc.observed_rows()) CHECK(c.data.y[i] == inc.data.y[i]);
  CHECK(c.iterations >= 1);
  CHECK(c.iterations <= 10);
}

TEST_CASE("forest parameter checks") {
  const Eigen::MatrixXd X = uniform_design(20, 2, 13);
  const Vector y = X.col(0);
  RngStream s({13, 13});
  ForestParams p;
  p.n_trees = 0;
  CHECK_THROWS_AS(fit_forest(X, y, p, s), InvalidArgument);
  p = ForestParams{};
  p.mtry = 3;
  CHECK_THROWS_AS(fit_forest(X, y, p, s), InvalidArgument);
  CHECK_THROWS_AS(fit_tree(Eigen::MatrixXd(0, 2), Vector(0), ForestParams{}, s), InvalidArgument);
  CHECK_THROWS_AS(predict_forest(Forest{}, X), InvalidArgument);
  CHECK(ForestParams{}.resolved_mtry(2) == 1);
  CHECK(ForestParams{}.resolved_mtry(9) == 3);

  Dataset tiny = testing::sample_dataset(0.8, 8, 14);
  Mask m = Mask::Constant(8, true);
  m[0] = m[1] = false;
  IncompleteDataset inc{tiny, m, tiny.y};
  for (Index i = 2; i < 8; ++i) inc.data.y[i] = std::nan("");
  CHECK_THROWS_AS(impute_forest(inc, ForestParams{}, 10, s), InsufficientData);
}
