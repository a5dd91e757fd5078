#include <algorithm>
#include <set>
#include <thread>

#include "doctest.h"
#include "impute/errors.hpp"
#include "impute/random.hpp"
#include "oracles.hpp"

using namespace impute;

TEST_CASE("streams are deterministic per seed spec") {
  RngStream a({123, 0}), b({123, 0});
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c({123, 0}), d({123, 1});
  int same = 0;
  for (int i = 0; i < 10; ++i) same += c.uniform() == d.uniform();
  CHECK(same < 10);

  RngStream e({124, 0});
  RngStream f({123, 0});
  CHECK(e.next_u64() != f.next_u64());
}

TEST_CASE("splitting a request does not change the sequence") {
  RngStream a({7, 3}), b({7, 3});
  Eigen::VectorXd whole = draw_standard_normal(a, 10);
  Eigen::VectorXd first = draw_standard_normal(b, 5);
  Eigen::VectorXd second = draw_standard_normal(b, 5);
  CHECK(whole.head(5) == first);
  CHECK(whole.tail(5) == second);

  RngStream c({7, 4}), d({7, 4});
  Eigen::VectorXd u = draw_uniform(c, 9);
  Eigen::VectorXd u1 = draw_uniform(d, 2), u2 = draw_uniform(d, 7);
  CHECK(u.head(2) == u1);
  CHECK(u.tail(7) == u2);
}

TEST_CASE("streams are reproducible across threads") {
  constexpr int kThreads = 8;
  std::vector<Eigen::VectorXd> got(kThreads);
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < kThreads; ++t)
      pool.emplace_back([&got, t] {
        RngStream s({123, static_cast<std::uint64_t>(t)});
        got[static_cast<std::size_t>(t)] = draw_standard_normal(s, 1000);
      });
  }
  for (int t = 0; t < kThreads; ++t) {
    RngStream s({123, static_cast<std::uint64_t>(t)});
    CHECK(draw_standard_normal(s, 1000) == got[static_cast<std::size_t>(t)]);
  }
}

TEST_CASE("standard normal draws") {
  RngStream s({123, 0});
  CHECK(draw_standard_normal(s, 0).size() == 0);
  Eigen::VectorXd z = draw_standard_normal(s, 1'000'000);
  CHECK(std::abs(oracle::mean(z)) < 0.005);
  CHECK(oracle::variance(z) > 0.99);
  CHECK(oracle::variance(z) < 1.01);
  CHECK(z.allFinite());
  // Empirical CDF at a few points against erfc.
  for (double x : {-1.5, -0.3, 0.0, 0.8, 2.0}) {
    const double frac = static_cast<double>((z.array() <= x).count()) / static_cast<double>(z.size());
    CHECK(std::abs(frac - oracle::normal_cdf(x)) < 0.002);
  }
}

TEST_CASE("uniform draws") {
  RngStream s({123, 0});
  CHECK(draw_uniform(s, 0).size() == 0);
  Eigen::VectorXd u = draw_uniform(s, 1'000'000);
  CHECK(u.minCoeff() >= 0.0);
  CHECK(u.maxCoeff() < 1.0);
  CHECK(oracle::mean(u) > 0.499);
  CHECK(oracle::mean(u) < 0.501);
}

TEST_CASE("bounded integers stay in range and are roughly uniform") {
  RngStream s({5, 5});
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70'000; ++i) {
    const auto v = s.below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - 10'000) < 400);
  CHECK_THROWS_AS(s.below(0), InvalidArgument);
}

TEST_CASE("sampling without replacement") {
  RngStream s({123, 0});
  auto perm = sample_without_replacement(s, 5, 5);
  std::sort(perm.begin(), perm.end());
  CHECK(perm == std::vector<Eigen::Index>{0, 1, 2, 3, 4});

  auto big = sample_without_replacement(s, 1'000'000, 1000);
  CHECK(big.size() == 1000);
  CHECK(std::set<Eigen::Index>(big.begin(), big.end()).size() == 1000);
  for (auto i : big) CHECK((i >= 0 && i < 1'000'000));

  CHECK(sample_without_replacement(s, 10, 0).empty());
  CHECK_THROWS_AS(sample_without_replacement(s, 3, 4), InvalidArgument);
}

TEST_CASE("sampling without replacement is uniform over indices") {
  // Each of 20 indices appears in a 5-subset with probability 1/4.
  RngStream s({123, 9});
  constexpr int kTrials = 10'000;
  std::vector<int> hits(20, 0);
  for (int t = 0; t < kTrials; ++t)
    for (auto i : sample_without_replacement(s, 20, 5)) ++hits[static_cast<std::size_t>(i)];
  const double se = std::sqrt(0.25 * 0.75 / kTrials);
  for (int h : hits) CHECK(std::abs(h / double(kTrials) - 0.25) < 3 * se);
}

TEST_CASE("chi-square draws") {
  RngStream s({123, 0});
  constexpr int kN = 100'000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < kN; ++i) {
    const double v = draw_chi_square(s, 10);
    REQUIRE(v > 0.0);
    sum += v;
    sum2 += v * v;
  }
  const double m = sum / kN;
  const double var = sum2 / kN - m * m;
  CHECK(m > 9.95);
  CHECK(m < 10.05);
  CHECK(var > 19.5);
  CHECK(var < 20.5);
  CHECK(draw_chi_square(s, 1) > 0.0);
  CHECK_THROWS_AS(draw_chi_square(s, 0), InvalidArgument);
}

TEST_CASE("distinct stream ids are uncorrelated") {
  RngStream a({123, 0}), b({123, 1});
  Eigen::VectorXd x = draw_standard_normal(a, 100'000);
  Eigen::VectorXd y = draw_standard_normal(b, 100'000);
  CHECK(std::abs(oracle::corr(x, y)) < 0.01);
  RngStream p({123, 0});
  RngStream child = p.spawn();
  Eigen::VectorXd c = draw_standard_normal(child, 100'000);
  CHECK(std::abs(oracle::corr(draw_standard_normal(p, 100'000), c)) < 0.01);
}

TEST_CASE("stream ids from content hashes") {
  CHECK(hash_label("high") == hash_label("high"));
  CHECK(hash_label("high") != hash_label("low"));
  CHECK(hash_words({1, 2}) != hash_words({2, 1}));
  CHECK(stream_id_for(1, 0, Purpose::sampling) != stream_id_for(1, 0, Purpose::amputation));
  CHECK(stream_id_for(1, 0, Purpose::sampling) != stream_id_for(1, 1, Purpose::sampling));
}

TEST_CASE("normal quantile matches reference values") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.9599639845400545).epsilon(1e-14));
  CHECK(normal_quantile(0.3) == doctest::Approx(-0.5244005127080409).epsilon(1e-14));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
  for (double p = 0.001; p < 1.0; p += 0.0137)
    CHECK(oracle::normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}
