#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "cchain/model.hpp"

using namespace cchain;

TEST_CASE("params validation") {
  CHECK_NOTHROW(ModelParams(2.0, 0.0));
  CHECK_THROWS_AS(ModelParams(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(1.0, -0.1), std::invalid_argument);
  try {
    ModelParams(0.0, 1.0);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("beta > 0") != std::string::npos);
  }
}

TEST_CASE("chain state rejects zero and out-of-range spacings") {
  CHECK_THROWS_AS(ChainState({0.5, 0.0, 0.5}), std::domain_error);
  CHECK_THROWS_AS(ChainState({0.5, 1.5, 0.5}), std::domain_error);
  CHECK_THROWS_AS(ChainState({0.5, 0.5}), std::invalid_argument);
  ChainState s({0.1, 0.2, 0.3, 1.0});
  CHECK(s.at_circular(-1) == 1.0);
  CHECK(s.at_circular(4) == 0.1);
  CHECK_THROWS(s.set(0, 0.0));
}

TEST_CASE("q_eval values") {
  CHECK(q_eval(ModelParams(2, 1), 0.5, 0.5) == doctest::Approx(std::exp(-5.0)).epsilon(1e-15));
  CHECK(q_eval(ModelParams(2, 1), 0.5, 0.5) == doctest::Approx(6.7379e-3).epsilon(1e-4));
  CHECK(q_eval(ModelParams(1, 1), 0.25, 0.75) ==
        doctest::Approx(std::exp(-2.0 - 2.0 / 3.0 - 1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(q_eval(ModelParams(1, 1), 0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(q_eval(ModelParams(1, 1), 0.5, -0.1), std::domain_error);
}

TEST_CASE("q_eval is symmetric and factorizes without next-to-nearest coupling") {
  const ModelParams coupled(2, 1);
  const ModelParams free(2, 0);
  for (int i = 1; i <= 20; ++i) {
    for (int j = 1; j <= 20; ++j) {
      const double x = i / 20.0;
      const double y = j / 20.0;
      CHECK(q_eval(coupled, x, y) == q_eval(coupled, y, x));
      const double g = std::exp(-1.0 / x) * std::exp(-1.0 / y);
      CHECK(std::abs(q_eval(free, x, y) - g) <= 1e-14 * g);
    }
  }
}

TEST_CASE("circular energy") {
  CHECK(circular_energy(ModelParams(2, 1), ChainState({1.0, 1.0, 1.0})) == doctest::Approx(7.5));
  CHECK(circular_energy(ModelParams(2, 0), ChainState({0.5, 0.5, 0.5, 0.5})) == doctest::Approx(16.0));
  const ModelParams p(2, 1);
  const ChainState s({0.5, 0.5, 1.0});
  double log_product = 0.0;
  for (std::size_t i = 0; i < 3; ++i) log_product += std::log(q_eval(p, s[i], s.at_circular(i + 1)));
  CHECK(circular_energy(p, s) == doctest::Approx(-log_product).epsilon(1e-14));
}

TEST_CASE("energy matches the Q-product on random states") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  const ModelParams p(1.5, 0.7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> y(3 + trial % 10);
    for (auto& v : y) v = unif(gen);
    const ChainState s(y);
    double product = 1.0;
    for (std::size_t i = 0; i < s.size(); ++i) product *= q_eval(p, s[i], s.at_circular(i + 1));
    const double via_energy = std::exp(-circular_energy(p, s));
    CHECK(std::abs(via_energy - product) <= 1e-12 * product);
  }
}

TEST_CASE("cluster distance") {
  // Site k of the documentation is index k - 1.
  CHECK(cluster_distance(IndexCluster(0, 2, 10), IndexCluster(4, 2, 10)) == 2);
  CHECK(cluster_distance(IndexCluster(0, 1, 10), IndexCluster(1, 1, 10)) == 0);
  CHECK(cluster_distance(IndexCluster(10, 3, 12), IndexCluster(4, 2, 12)) == 3);
  CHECK_THROWS_AS(cluster_distance(IndexCluster(0, 3, 10), IndexCluster(2, 2, 10)), std::invalid_argument);
  CHECK_THROWS_AS(cluster_distance(IndexCluster(0, 1, 10), IndexCluster(3, 1, 11)), std::invalid_argument);
}

TEST_CASE("cluster distance is symmetric") {
  for (std::size_t n = 4; n <= 12; ++n) {
    for (std::size_t la = 1; la < n; ++la) {
      for (std::size_t lb = 1; la + lb <= n; ++lb) {
        for (std::size_t sb = la; sb + lb <= n; ++sb) {
          const IndexCluster a(0, la, n);
          const IndexCluster b(sb, lb, n);
          CHECK(cluster_distance(a, b) == cluster_distance(b, a));
          CHECK(forward_gap(a, b) + forward_gap(b, a) + la + lb == n);
        }
      }
    }
  }
}

TEST_CASE("index cluster wraps around") {
  const IndexCluster c(10, 3, 12);
  CHECK(c.indices() == std::vector<std::size_t>{10, 11, 0});
  CHECK(c.last() == 0);
  CHECK(c.contains(0));
  CHECK_FALSE(c.contains(1));
}
