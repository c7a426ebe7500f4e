#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "hdc/kernels.hpp"
#include "hdc/recursion.hpp"
#include "hdc/treesim.hpp"
#include "oracles.hpp"

using namespace hdc;

TEST_CASE("clade keys") {
  const CladeKey a = CladeKey::parse("((*,*),*)");
  CHECK(a.str() == "(*,(*,*))");
  CHECK(a.size() == 3);
  CHECK(CladeKey::parse("((*,*),*)", ShapeOrder::ordered).str() == "((*,*),*)");
  const auto [l, r] = a.children();
  CHECK(l.is_leaf());
  CHECK(r.str() == "(*,*)");
  CHECK(CladeKey::join(r, CladeKey::leaf()) == a);
  CHECK(CladeKey::leaf() < a);
  for (const char* bad : {"", "(*,*", "(*)", "(*,*,*)", "x", "(*,*))", " (*,*)"})
    CHECK_THROWS_AS(CladeKey::parse(bad), std::invalid_argument);
}

TEST_CASE("seeding") {
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(replica_seed(5, 1) != replica_seed(5, 2));
  CHECK(replica_seed(5, 1) == replica_seed(5, 1));
  Rng a(123);
  Rng b(123);
  for (int j = 0; j < 100; ++j) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK_THROWS(a.exponential(0.0));
}

TEST_CASE("split sampler cdf and frequencies") {
  const SplitSampler s(400, SplitFamily::critical());
  for (std::size_t m : {2u, 3u, 17u, 400u}) {
    const SplitDistribution d = split_distribution(m, SplitFamily::critical());
    for (std::size_t i = 1; i < m; ++i) CHECK(s.cdf(m, i) == doctest::Approx(d.cumulative[i - 1]).epsilon(1e-13));
  }
  Rng rng(9);
  CHECK(s.sample(2, rng) == 1);
  for (const SplitFamily fam : {SplitFamily::critical(), SplitFamily::beta(-1.5)}) {
    const SplitSampler sampler(20, fam);
    const std::size_t m = 7;
    const int draws = 200000;
    std::vector<int> hits(m, 0);
    for (int j = 0; j < draws; ++j) ++hits.at(sampler.sample(m, rng));
    const SplitDistribution d = split_distribution(m, fam);
    for (std::size_t i = 1; i < m; ++i) {
      const double p = d.probability(i);
      const double se = std::sqrt(p * (1 - p) / draws);
      CHECK(std::abs(hits[i] / double(draws) - p) < 4.5 * se);
    }
  }
  CHECK_THROWS(s.sample(401, rng));
}

TEST_CASE("tree structure invariants") {
  Rng rng(77);
  for (std::size_t n : {1u, 2u, 3u, 50u, 1000u}) {
    const DtcsCounts c = simulate_dtcs(n, rng, 6);
    REQUIRE(c.by_size.size() == n + 1);
    CHECK(c.by_size[n] == 1);
    CHECK(c.by_size[1] == n);
    CHECK(std::accumulate(c.by_size.begin() + std::min<std::size_t>(2, n + 1), c.by_size.end(), std::size_t{0}) ==
          n - 1);
    std::map<std::size_t, std::size_t> per_size;
    for (const auto& [key, count] : c.by_shape) per_size[key.size()] += count;
    for (std::size_t s = 1; s <= std::min<std::size_t>(n, 6); ++s) CHECK(per_size[s] == c.by_size[s]);
  }
}

TEST_CASE("root shape frequencies match exact enumeration") {
  const std::size_t n = 5;
  std::map<std::string, double> exact;
  for (const auto& t : oracle::all_trees(n)) exact[t.text] += to_double(t.prob);
  std::map<std::string, int> seen;
  const int draws = 100000;
  for (int j = 0; j < draws; ++j) {
    Rng rng(replica_seed(31, j));
    const DtcsCounts c = simulate_dtcs(n, rng, n);
    for (const auto& [key, count] : c.by_shape)
      if (key.size() == n) seen[key.str()] += static_cast<int>(count);
  }
  CHECK(exact.size() == 3);
  for (const auto& [key, p] : exact) {
    const double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(seen[key] / double(draws) - p) < 4.5 * se);
  }
}

TEST_CASE("length and descent simulation") {
  double sum = 0.0;
  const int draws = 100000;
  for (int j = 0; j < draws; ++j) {
    Rng rng(replica_seed(3, j));
    sum += simulate_lambda(3, rng);
  }
  // E = 5/3; sd of Lambda_3 is sqrt(13/9).
  CHECK(std::abs(sum / draws - 5.0 / 3.0) < 4.5 * std::sqrt(13.0 / 9.0 / draws));

  const std::size_t n = 60;
  const OccupationVector occ = occupation_vector(n);
  std::vector<int> visits(n + 1, 0);
  for (int j = 0; j < draws; ++j) {
    Rng rng(replica_seed(4, j));
    const auto path = simulate_descent(n, rng);
    REQUIRE(path.front() == n);
    REQUIRE(path.back() == 1);
    for (std::size_t s = 1; s < path.size(); ++s) REQUIRE(path[s] < path[s - 1]);
    for (std::size_t v : path) ++visits[v];
  }
  for (std::size_t k : {2u, 10u, 30u}) {
    const double p = occ[k];
    CHECK(std::abs(visits[k] / double(draws) - p) < 4.5 * std::sqrt(p * (1 - p) / draws));
  }
}

TEST_CASE("statistics and batches") {
  CHECK(parse_statistic("count:2").kind == Statistic::Kind::count);
  CHECK(parse_statistic("shape:((*,*),*)").shape->str() == "(*,(*,*))");
  CHECK(parse_statistic("length").label() == "length");
  CHECK_THROWS(parse_statistic("count:"));
  CHECK_THROWS(parse_statistic("depth"));

  const SimBatch all_ones = run_batch(2, Statistic::count(2), 10, 1);
  for (double v : all_ones.samples) CHECK(v == 1.0);

  BatchOptions one;
  one.threads = 1;
  BatchOptions four;
  four.threads = 4;
  const SimBatch a = run_batch(200, Statistic::length(), 64, 99, one);
  const SimBatch b = run_batch(200, Statistic::length(), 64, 99, four);
  CHECK(a.samples == b.samples);
  const SimBatch prefix = run_batch(200, Statistic::length(), 10, 99, one);
  CHECK(std::equal(prefix.samples.begin(), prefix.samples.end(), a.samples.begin()));
  CHECK(a.generator_id == std::string(kGeneratorId));

  CHECK_THROWS_AS(run_batch(1'000'000, Statistic::count(2), 2000, 1), ResourceError);
  CHECK_THROWS_AS(run_batch(10, Statistic::count(2), 10, 1, BatchOptions{SplitFamily::beta(0.5)}),
                  std::invalid_argument);

  std::ostringstream os;
  write_batch_csv(os, all_ones);
  CHECK(os.str().rfind("replica,value\n0,1\n", 0) == 0);
}
