#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hdc/kernels.hpp"
#include "hdc/recursion.hpp"
#include "oracles.hpp"

using namespace hdc;

TEST_CASE("exact sequence values") {
  const auto x = evaluate_sequence_exact(2, Rational(1, 2), 10);
  CHECK(x[2] == Rational(1, 2));
  CHECK(x[3] == Rational(1, 3));
  CHECK(x[4] == Rational(7, 22));
  CHECK(x[1] == 0);
  const auto ref = oracle::sequence(2, Rational(1, 2), 10);
  for (std::size_t n = 2; n <= 10; ++n) CHECK(x[n] == ref[n]);
}

TEST_CASE("float sequence agrees with exact arithmetic") {
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto exact = oracle::sequence(k, Rational(3, 4), 60);
    const Sequence seq = evaluate_sequence(DescentKernel::harmonic(), k, 0.75, 60);
    CHECK(seq.n_max() == 60);
    for (std::size_t n = k; n <= 60; ++n)
      CHECK(seq[n] == doctest::Approx(to_double(exact[n])).epsilon(1e-13));
    CHECK(seq[k - 1] == 0.0);
  }
}

TEST_CASE("sequence equals x_k times the occupation probability") {
  const std::size_t n = 400;
  const OccupationVector occ = occupation_vector(n);
  for (std::size_t k : {2u, 7u, 150u}) {
    const Sequence seq = evaluate_sequence(DescentKernel::harmonic(), k, 2.0, n);
    CHECK(seq[n] == doctest::Approx(2.0 * occ[k]).epsilon(1e-12));
  }
}

TEST_CASE("sequence limit") {
  CHECK(limit_value(1, 0.3) == 0.3);
  CHECK(occupation_limit(2) == doctest::Approx(6.0 / (kPi * kPi)));
  CHECK(occupation_limit(4) == doctest::Approx(6.0 * (11.0 / 6.0) / (kPi * kPi * 3.0)));
  const Sequence seq = evaluate_sequence(DescentKernel::harmonic(), 3, 1.0, 10000);
  REQUIRE(seq.limit);
  CHECK(*seq.limit == doctest::Approx(occupation_limit(3)));
  CHECK(std::abs(seq[10000] - *seq.limit) < 1e-4);
  CHECK(seq[10000] > *seq.limit);
  // k = 1 is the constant sequence.
  const Sequence one = evaluate_sequence(DescentKernel::harmonic(), 1, 0.5, 50);
  for (std::size_t n = 1; n <= 50; ++n) CHECK(one[n] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sequence argument checks") {
  const auto h = DescentKernel::harmonic();
  CHECK_THROWS_AS(evaluate_sequence(h, 0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_sequence(h, 2, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_sequence(h, 5, 1.0, 4), std::invalid_argument);
  const Sequence s = evaluate_sequence(h, 2, 1.0, 5);
  CHECK_THROWS(s[6]);
}

TEST_CASE("beta kernel sequences decrease") {
  for (double beta : {-0.5, -2.0}) {
    const Sequence seq = evaluate_sequence(DescentKernel::beta(beta), 2, 1.0, 500);
    CHECK_FALSE(seq.limit);
    for (std::size_t n = 2; n < 500; ++n) CHECK(seq[n + 1] < seq[n]);
  }
}

TEST_CASE("occupation probabilities") {
  const auto exact = occupation_vector_exact(4);
  CHECK(exact[2] == Rational(7, 11));
  CHECK(exact[4] == 1);
  CHECK(exact[1] == 1);
  const std::size_t n = 30;
  const auto pi = oracle::visits(n);
  const auto ex = occupation_vector_exact(n);
  const OccupationVector occ = occupation_vector(n);
  for (std::size_t k = 1; k <= n; ++k) {
    CHECK(ex[k] == pi[k]);
    CHECK(occ[k] == doctest::Approx(to_double(pi[k])).epsilon(1e-13));
  }
  const OccupationVector big = occupation_vector(5000);
  CHECK(big[1] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k : {2u, 5u, 20u}) CHECK(std::abs(big[k] - occupation_limit(k)) < 1e-3);
  CHECK_THROWS(occupation_vector(1));
}

TEST_CASE("long-term and bootstrap bounds") {
  const Sequence seq = evaluate_sequence(DescentKernel::harmonic(), 2, 1.0, 3000);
  const LongTermBoundReport lt = verify_longterm_bound(seq);
  CHECK(lt.passed);
  CHECK(lt.constant > 0.0);
  CHECK(lt.constant <= lt.ceiling);

  const BootstrapBoundReport b = verify_bootstrap_bound(1000, 2, 1);
  CHECK(b.exponent == doctest::Approx(1.0 / 6.0));
  CHECK(b.m_max == 3);
  CHECK(b.passed);
  CHECK(b.max_ratio <= 1.0);
  CHECK_THROWS_AS(verify_bootstrap_bound(1'000'000'000, 2, 10), ResourceError);
  CHECK_THROWS_AS(verify_bootstrap_bound(1, 2, 1), std::invalid_argument);
  CHECK_THROWS(verify_longterm_bound(evaluate_sequence(DescentKernel::beta(-2.0), 2, 1.0, 20)));
}

TEST_CASE("sequence csv") {
  std::ostringstream os;
  write_sequence_csv(os, evaluate_sequence(DescentKernel::harmonic(), 2, 0.5, 4));
  const std::string s = os.str();
  CHECK(s.rfind("n,x_n,x_n_minus_x\n", 0) == 0);
  CHECK(s.find("\n3,0.33333333333333331,") != std::string::npos);
  CHECK(s.find("\n4,0.31818181818181818,") != std::string::npos);
}
