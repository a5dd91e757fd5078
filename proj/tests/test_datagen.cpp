#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "impute/datagen.hpp"
#include "impute/downstream.hpp"
#include "impute/errors.hpp"
#include "impute/linmodel.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace impute;

namespace {

PopulationSpec spec_for(double r2) {
  PopulationSpec s;
  s.r_squared = r2;
  return s;
}

const Dataset& population(double r2) {
  static const Dataset high = testing::sample_dataset(0.8, 1'000'000, 123);
  static const Dataset low = testing::sample_dataset(0.2, 1'000'000, 123);
  return r2 > 0.5 ? high : low;
}

}  // namespace

TEST_CASE("coefficients") {
  auto c = coefficients(spec_for(0.8));
  CHECK(c.beta1 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(c.beta2 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(c.noise_sd == doctest::Approx(0.4472135955).epsilon(1e-10));

  c = coefficients(spec_for(0.2));
  CHECK(c.beta1 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(c.beta2 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(c.noise_sd == doctest::Approx(0.894427191).epsilon(1e-9));

  PopulationSpec one = spec_for(0.8);
  one.var_prop = {1.0, 0.0};
  c = coefficients(one);
  CHECK(c.beta1 == doctest::Approx(0.894427191).epsilon(1e-9));
  CHECK(c.beta2 == 0.0);
}

TEST_CASE("population spec validation") {
  PopulationSpec s;
  s.var_prop = {0.5, 0.4};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = PopulationSpec{};
  s.r_squared = 1.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.r_squared = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = PopulationSpec{};
  s.predictor_corr = 1.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = PopulationSpec{};
  s.size = 0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  RngStream r({1, 1});
  CHECK_THROWS_AS(generate_population(s, r), InvalidArgument);
}

TEST_CASE("analytic ground truth") {
  const ParamSet high = ground_truth(spec_for(0.8));
  CHECK(high.mu == 0.0);
  CHECK(high.sigma == doctest::Approx(1.1489125293).epsilon(1e-9));
  CHECK(high.p90 == doctest::Approx(10.0));
  CHECK(high.rho == doctest::Approx(0.8703882798).epsilon(1e-9));
  CHECK(high.gamma == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(high.r2_y == doctest::Approx(0.8484848485).epsilon(1e-9));
  CHECK(high.delta == doctest::Approx(0.8823529412).epsilon(1e-9));
  CHECK(high.r2_x == doctest::Approx(0.7794117647).epsilon(1e-9));

  const ParamSet low = ground_truth(spec_for(0.2));
  CHECK(low.sigma == doctest::Approx(1.0392304845).epsilon(1e-9));
  CHECK(low.rho == doctest::Approx(0.4811252243).epsilon(1e-9));
  CHECK(low.gamma == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(low.r2_y == doctest::Approx(0.2592592593).epsilon(1e-9));
  CHECK(low.delta == doctest::Approx(0.3260869565).epsilon(1e-9));
  CHECK(low.r2_x == doctest::Approx(0.3478260870).epsilon(1e-9));
}

TEST_CASE("population moments") {
  const Dataset& high = population(0.8);
  CHECK(high.size() == 1'000'000);
  CHECK(oracle::sd(high.y) > 1.14);
  CHECK(oracle::sd(high.y) < 1.16);
  CHECK(std::abs(oracle::mean(high.x1)) < 0.005);
  CHECK(std::abs(oracle::mean(high.y)) < 0.005);

  const Dataset& low = population(0.2);
  CHECK(oracle::corr(low.y, low.x1) > 0.47);
  CHECK(oracle::corr(low.y, low.x1) < 0.49);
  CHECK(oracle::corr(low.x1, low.x2) > 0.495);
  CHECK(oracle::corr(low.x1, low.x2) < 0.505);
}

TEST_CASE("population estimates match the analytic ground truth") {
  for (double r2 : {0.8, 0.2}) {
    const ParamSet est = estimate_params(population(r2));
    const ParamSet gt = ground_truth(spec_for(r2));
    for (std::size_t f = 0; f < 8; ++f) {
      CAPTURE(ParamSet::kNames[f]);
      CHECK(std::abs(est[f] - gt[f]) < (f == 2 ? 0.3 : 0.01));
    }
  }
}

TEST_CASE("population regression recovers the coefficients") {
  const Dataset& high = population(0.8);
  Eigen::MatrixXd X(high.size(), 2);
  X << high.x1, high.x2;
  const auto fit = oracle::regress(X, high.y);
  CHECK(std::abs(fit.coef[1] - 0.8) < 0.005);
  CHECK(std::abs(fit.coef[2] - 0.4) < 0.005);
  CHECK(std::abs(fit.coef[0]) < 0.005);
}

TEST_CASE("population is deterministic per stream") {
  PopulationSpec s = spec_for(0.8);
  s.size = 1000;
  RngStream a({123, 1}), b({123, 1}), c({123, 2});
  const Dataset d1 = generate_population(s, a);
  const Dataset d2 = generate_population(s, b);
  const Dataset d3 = generate_population(s, c);
  CHECK(d1.y == d2.y);
  CHECK(d1.x1 == d2.x1);
  CHECK(d1.y != d3.y);
}

TEST_CASE("draw_sample") {
  const Dataset pop = testing::sample_dataset(0.8, 5000, 11);
  RngStream s({123, 3});
  const Dataset all = draw_sample(pop, pop.size(), s);
  std::vector<double> a(all.y.begin(), all.y.end()), b(pop.y.begin(), pop.y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);

  const Dataset& big = population(0.8);
  const Dataset part = draw_sample(big, 1000, s);
  CHECK(part.size() == 1000);
  CHECK(std::abs(oracle::mean(part.x1)) < 4.0 / std::sqrt(1000.0));
  // Every sampled row exists in the population with its columns intact.
  for (Index i = 0; i < 20; ++i) {
    const auto it = std::find(big.y.begin(), big.y.end(), part.y[i]);
    REQUIRE(it != big.y.end());
    const auto row = it - big.y.begin();
    CHECK(big.x1[row] == part.x1[i]);
    CHECK(big.x2[row] == part.x2[i]);
  }

  CHECK_THROWS_AS(draw_sample(pop, pop.size() + 1, s), InvalidArgument);
}

TEST_CASE("dataset csv round trip") {
  const Dataset d = testing::sample_dataset(0.5, 25, 4);
  std::stringstream io;
  write_csv(io, d);
  const Dataset back = read_csv(io);
  CHECK(back.x1 == d.x1);
  CHECK(back.x2 == d.x2);
  CHECK(back.y == d.y);

  std::stringstream bad("a,b,c\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad), InvalidArgument);
}

TEST_CASE("dataset validation and columns") {
  Dataset d = testing::sample_dataset(0.5, 10, 4);
  CHECK_NOTHROW(d.validate());
  CHECK(parse_column("x2") == Column::x2);
  CHECK(column_name(Column::y) == "y");
  CHECK_THROWS_AS(parse_column("z"), InvalidArgument);
  d.y[3] = std::nan("");
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
  d = testing::sample_dataset(0.5, 10, 4);
  d.x1.conservativeResize(9);
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
}
