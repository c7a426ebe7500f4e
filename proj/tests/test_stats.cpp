#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "hdc/recursion.hpp"
#include "hdc/stats.hpp"
#include "hdc/treesim.hpp"
#include "oracles.hpp"

using namespace hdc;

TEST_CASE("summaries") {
  const std::vector<double> zeros{0, 0, 0};
  const Summary z = summarize(zeros);
  CHECK(z.mean == 0.0);
  CHECK(z.variance == 0.0);
  const std::vector<double> abc{1, 2, 3};
  const Summary s = summarize(abc);
  CHECK(s.mean == 2.0);
  CHECK(s.variance == 1.0);
  CHECK(s.stderr_mean == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK_THROWS(summarize(std::vector<double>{1.0}));

  Rng rng(2024);
  std::vector<double> e(100000);
  for (double& v : e) v = rng.exponential(1.0);
  const Summary x = summarize(e);
  CHECK(std::abs(x.mean - 1.0) < 3 * x.stderr_mean);
  CHECK(std::abs(x.variance - 1.0) < 3 * x.stderr_variance);
  // Var of the sample variance for Exp(1) is about (mu4 - sigma^4)/R = 8/R.
  CHECK(x.stderr_variance == doctest::Approx(std::sqrt(8.0 / 100000)).epsilon(0.1));
  CHECK(compare_moments(x, 1.0, 1.0).passed);
  CHECK_FALSE(compare_moments(x, 1.1, 1.0).passed);
}

TEST_CASE("KS against the normal law") {
  const std::size_t r = 1000;
  boost::math::normal_distribution<> phi;
  std::vector<double> q(r);
  for (std::size_t j = 0; j < r; ++j) q[j] = boost::math::quantile(phi, (j + 0.5) / r);
  const NormalityReport pos = ks_normal(q, 0.0, 1.0);
  CHECK(pos.ks_distance <= 0.5 / r + 1e-12);
  CHECK(pos.passed);

  Rng rng(5);
  std::vector<double> e(10000);
  for (double& v : e) v = rng.exponential(1.0);
  const NormalityReport neg = ks_normal(e, 1.0, 1.0);
  CHECK(neg.ks_distance > 0.05);
  CHECK_FALSE(neg.passed);

  std::vector<double> scaled(e);
  for (double& v : scaled) v = 3.0 * v - 7.0;
  CHECK(ks_normal(scaled, -4.0, 3.0).ks_distance == doctest::Approx(neg.ks_distance).epsilon(1e-12));

  // A point mass at the mean: the empirical CDF jumps from 0 to 1 there.
  const std::vector<double> point(50, 0.0);
  CHECK(ks_normal(point, 0.0, 1.0).ks_distance == doctest::Approx(0.5));
  CHECK_THROWS(ks_normal(q, 0.0, 0.0));
  CHECK_THROWS(ks_normal(q, 0.0, -1.0));
  CHECK(to_string(ks_normal(q, 0, 1, 0.03, StandardizationSource::sample).source) == "sample");
}

TEST_CASE("ansatz sums") {
  const AnsatzResult r = ansatz_sum(500, {1.0, -2.0});
  CHECK(r.gap < 0.01);
  const AnsatzResult zero = ansatz_sum(100, parse_power_function("zero"));
  CHECK(zero.finite_sum == 0.0);
  CHECK(zero.limit_sum == 0.0);
  CHECK_THROWS_AS(ansatz_sum(100, {1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(parse_power_function("pow:0.5"), std::domain_error);
  CHECK_THROWS_AS(parse_power_function("exp:1"), std::invalid_argument);
  CHECK(parse_power_function("pow:-0.5:2").coefficient == 2.0);

  double prev = INFINITY;
  for (std::size_t n : {500u, 1000u, 2000u, 5000u}) {
    const double gap = ansatz_sum(n, {1.0, -0.5}).gap;
    CHECK(gap < prev);
    prev = gap;
  }

  // Limit against a longer plain sum with its own tail integral.
  const double s = 1.5;
  long double direct = 0.0L;
  long double h = 0.0L;
  const std::size_t big = 4'000'000;
  for (std::size_t k = 2; k <= big; ++k) {
    h += 1.0L / static_cast<long double>(k - 1);
    direct += 6.0L * h / (static_cast<long double>(kPi) * kPi * (k - 1)) *
              std::pow(static_cast<long double>(k), -1.5L);
  }
  const double x = big + 0.5;
  direct += 6.0 / (kPi * kPi) * std::pow(x, -s) * (std::log(x) / s + 1.0 / (s * s) + kEulerGamma / s);
  CHECK(ansatz_limit({1.0, -1.5}) == doctest::Approx(static_cast<double>(direct)).epsilon(1e-9));
}
