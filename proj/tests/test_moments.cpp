#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "hdc/moments.hpp"
#include "hdc/recursion.hpp"
#include "oracles.hpp"

using namespace hdc;

namespace {

Rational count_of(const oracle::Tree& t, std::size_t k) {
  return static_cast<unsigned long>(std::count(t.clades.begin(), t.clades.end(), k));
}

}  // namespace

TEST_CASE("exact moments at small n") {
  const ExactMomentTable c = dp_moments_count_exact(2, 6);
  CHECK(c.mean[3] == 1);
  CHECK(c.variance[3] == 0);
  CHECK(c.mean[4] == Rational(14, 11));
  CHECK(c.variance[4] == Rational(24, 121));
  const ExactMomentTable l = dp_moments_length_exact(4);
  CHECK(l.mean[2] == 1);
  CHECK(l.variance[2] == 1);
  CHECK(l.mean[3] == Rational(5, 3));
  CHECK(l.variance[3] == Rational(13, 9));
}

TEST_CASE("moments match full tree enumeration") {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t k = 1; k <= 4; ++k) {
      const auto ref = oracle::tree_moments(n, [k](const oracle::Tree& t) { return count_of(t, k); });
      const ExactMomentTable dp = dp_moments_count_exact(k, 8);
      CHECK(dp.mean[n] == ref.mean);
      CHECK(dp.variance[n] == ref.variance);
    }
    if (n >= 2) {
      const auto ref = oracle::length_moments(n);
      const ExactMomentTable dp = dp_moments_length_exact(8);
      CHECK(dp.mean[n] == ref.mean);
      CHECK(dp.variance[n] == ref.variance);
    }
  }
  for (const char* text : {"(*,*)", "(*,(*,*))", "((*,*),(*,*))", "(*,(*,(*,*)))"}) {
    for (const ShapeOrder order : {ShapeOrder::unordered, ShapeOrder::ordered}) {
      const CladeKey key = CladeKey::parse(text, order);
      const bool ordered = order == ShapeOrder::ordered;
      const ExactMomentTable dp = dp_moments_shape_exact(key, 8, order);
      for (std::size_t n = 1; n <= 8; ++n) {
        const auto ref = oracle::tree_moments(n, [&](const oracle::Tree& t) {
          const auto& shapes = ordered ? t.ordered_shapes : t.shapes;
          return Rational(static_cast<unsigned long>(std::count(shapes.begin(), shapes.end(), key.str())));
        });
        CHECK(dp.mean[n] == ref.mean);
        CHECK(dp.variance[n] == ref.variance);
      }
    }
  }
}

TEST_CASE("shape probabilities") {
  CHECK(shape_probability_exact(CladeKey::leaf()) == 1);
  CHECK(shape_probability_exact(CladeKey::parse("(*,(*,*))")) == 1);
  CHECK(shape_probability_exact(CladeKey::parse("((*,*),(*,*))")) == Rational(3, 11));
  CHECK(shape_probability_exact(CladeKey::parse("(*,(*,*))", ShapeOrder::ordered), ShapeOrder::ordered) ==
        Rational(1, 2));
  for (std::size_t n = 2; n <= 7; ++n) {
    std::map<std::string, Rational> by_shape;
    std::map<std::string, Rational> by_ordered;
    for (const auto& t : oracle::all_trees(n)) {
      by_shape[t.text] += t.prob;
      by_ordered[t.ordered_text] += t.prob;
    }
    Rational total = 0;
    for (const auto& [text, p] : by_shape) {
      CHECK(shape_probability_exact(CladeKey::parse(text)) == p);
      total += p;
    }
    CHECK(total == 1);
    for (const auto& [text, p] : by_ordered)
      CHECK(shape_probability_exact(CladeKey::parse(text, ShapeOrder::ordered), ShapeOrder::ordered) == p);
  }
  CHECK(shape_probability(CladeKey::parse("((*,*),(*,*))")) == doctest::Approx(3.0 / 11.0));
}

TEST_CASE("count moment invariants") {
  for (std::size_t k = 1; k <= 6; ++k) {
    const MomentTable t = dp_moments_count(k, 400);
    for (std::size_t n = 1; n < k; ++n) CHECK(t.mean[n] == 0.0);
    CHECK(t.mean[k] == 1.0);
    for (std::size_t n = 1; n <= 400; ++n) CHECK(t.variance[n] >= 0.0);
    // N_n(k) is deterministic for n <= k, and for n < 2k only when k <= 2.
    for (std::size_t n = 1; n <= k; ++n) CHECK(t.variance[n] == 0.0);
    if (k <= 2)
      for (std::size_t n = 1; n < 2 * k; ++n) CHECK(t.variance[n] == 0.0);
    else
      CHECK(t.variance[k + 1] > 0.0);
  }
  // A size-3 clade sits in DTCS(4) with probability 8/11.
  CHECK(dp_moments_count_exact(3, 4).variance[4] == Rational(24, 121));
}

TEST_CASE("float DP agrees with exact DP") {
  const ExactMomentTable ce = dp_moments_count_exact(3, 40);
  const MomentTable cf = dp_moments_count(3, 40);
  const ExactMomentTable le = dp_moments_length_exact(40);
  const MomentTable lf = dp_moments_length(40);
  const CladeKey four = CladeKey::parse("((*,*),(*,*))");
  const ExactMomentTable se = dp_moments_shape_exact(four, 40);
  const MomentTable sf = dp_moments_shape(four, 40);
  for (std::size_t n = 1; n <= 40; ++n) {
    CHECK(cf.mean[n] == doctest::Approx(to_double(ce.mean[n])).epsilon(1e-13));
    CHECK(cf.variance[n] == doctest::Approx(to_double(ce.variance[n])).epsilon(1e-12));
    CHECK(lf.mean[n] == doctest::Approx(to_double(le.mean[n])).epsilon(1e-13));
    CHECK(lf.variance[n] == doctest::Approx(to_double(le.variance[n])).epsilon(1e-12));
    CHECK(sf.mean[n] == doctest::Approx(to_double(se.mean[n])).epsilon(1e-13));
    CHECK(sf.variance[n] == doctest::Approx(to_double(se.variance[n])).epsilon(1e-12));
  }
  CladeKey caterpillar = CladeKey::leaf();
  for (int j = 0; j < 12; ++j) caterpillar = CladeKey::join(CladeKey::leaf(), caterpillar);
  REQUIRE(caterpillar.size() == 13);
  CHECK_THROWS_AS(dp_moments_shape(caterpillar, 20), std::invalid_argument);
}

TEST_CASE("normalized means converge") {
  const MomentTable c = dp_moments_count(2, 10000);
  CHECK(std::abs(c.normalized_mean(10000) - 3.0 / (kPi * kPi)) < 1e-4);
  const MomentTable l = dp_moments_length(10000);
  CHECK(std::abs(l.normalized_mean(10000) - 6.0 / (kPi * kPi)) < 1e-3);
  // The mean of N_n(k)/n tends to a(k)/k.
  const MomentTable c5 = dp_moments_count(5, 10000);
  CHECK(c5.normalized_mean(10000) == doctest::Approx(occupation_limit(5) / 5.0).epsilon(1e-3));
}

TEST_CASE("variance decomposition") {
  const DecompositionReport r2 = variance_decomposition_check(2, 200);
  CHECK(r2.passed);
  CHECK(r2.max_abs_error < 1e-10);
  CHECK(r2.seed_index == 4);
  const DecompositionReport r3 = variance_decomposition_check(3, 500);
  CHECK(r3.passed);
  CHECK(r3.max_abs_error < 1e-9);
  CHECK(variance_decomposition_exact(2, 100));
  CHECK(variance_decomposition_exact(4, 40));
  CHECK_THROWS_AS(variance_decomposition_check(2, 5000), ResourceError);

  // A single source reproduces the plain recursion.
  std::vector<double> src(101, 0.0);
  src[7] = 0.25;
  const auto one = superpose_sources(src);
  const Sequence seq = evaluate_sequence(DescentKernel::harmonic(), 7, 0.25, 100);
  for (std::size_t n = 1; n <= 100; ++n) CHECK(one[n] == doctest::Approx(seq[n]).epsilon(1e-15));
}

TEST_CASE("error stability") {
  std::vector<double> flat(2001, 0.0);
  std::vector<double> growing(2001, 0.0);
  for (std::size_t n = 1; n <= 2000; ++n) {
    flat[n] = 1.0 / static_cast<double>(n);
    growing[n] = std::sqrt(static_cast<double>(n));
  }
  CHECK(error_stability(flat, 1.0, 100, 2000).passed);
  const StabilityReport bad = error_stability(growing, 0.0, 100, 2000);
  CHECK_FALSE(bad.passed);
  CHECK(bad.tail_max > 2.0 * bad.head_max);
  CHECK_THROWS(error_stability(flat, 1.0, 100, 3000));
}

TEST_CASE("moments csv") {
  std::ostringstream os;
  write_moments_csv(os, dp_moments_count(2, 4));
  CHECK(os.str().rfind("n,mean,variance,E_n,V_n\n1,0,0,0,0\n2,1,0,0.5,0\n", 0) == 0);
}
