#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hdc/numeric.hpp"
#include "hdc/treesim.hpp"

namespace hdc {

/// Exact first two moments of a split-additive statistic of DTCS(n),
/// X_n = X_L + X_{n-L} + b_n, for 1 <= n <= n_max (index 0 unused).
struct MomentTable {
  std::string statistic;
  std::size_t n_max = 0;
  std::vector<double> mean;
  std::vector<double> variance;

  /// E_n = mean / n and V_n = variance / n.
  double normalized_mean(std::size_t n) const { return mean.at(n) / static_cast<double>(n); }
  double normalized_variance(std::size_t n) const { return variance.at(n) / static_cast<double>(n); }
};

struct ExactMomentTable {
  std::string statistic;
  std::size_t n_max = 0;
  std::vector<Rational> mean;
  std::vector<Rational> variance;
};

/// N_n(k): number of clades with k leaves.
MomentTable dp_moments_count(std::size_t k, std::size_t n_max);
ExactMomentTable dp_moments_count_exact(std::size_t k, std::size_t n_max);

/// N_n(chi): number of clades with shape chi (at most 12 leaves).
MomentTable dp_moments_shape(const CladeKey& shape, std::size_t n_max,
                             ShapeOrder order = ShapeOrder::unordered);
ExactMomentTable dp_moments_shape_exact(const CladeKey& shape, std::size_t n_max,
                                        ShapeOrder order = ShapeOrder::unordered);

/// Lambda_n: total length of CTCS(n).
MomentTable dp_moments_length(std::size_t n_max);
ExactMomentTable dp_moments_length_exact(std::size_t n_max);

MomentTable dp_moments(const Statistic& statistic, std::size_t n_max,
                       ShapeOrder order = ShapeOrder::unordered);

/// P(DTCS(|chi|) has shape chi).
Rational shape_probability_exact(const CladeKey& shape, ShapeOrder order = ShapeOrder::unordered);
double shape_probability(const CladeKey& shape, ShapeOrder order = ShapeOrder::unordered);

/// Split-mean source term of the normalized variance recursion,
/// eps_n = Var_L(E[X_L] + E[X_{n-L}]) / n, from a mean array.
std::vector<double> split_mean_sources(const std::vector<double>& mean);

/// sum_m W^{(m)}_n where W^{(m)} follows the harmonic recursion with
/// W^{(m)}_m = sources[m] and zeros below m. Zero sources are skipped.
std::vector<double> superpose_sources(const std::vector<double>& sources);

struct DecompositionReport {
  std::size_t k = 0;
  std::size_t n_max = 0;
  /// First n with V_n > 0; its recursion carries V_{n0} as the seed.
  std::size_t seed_index = 0;
  std::size_t sources = 0;
  double max_abs_error = 0.0;
  double tolerance = 1e-9;
  bool passed = false;
};

/// Rebuilds V_n = Var[N_n(k)]/n as the seeded recursion plus one fresh
/// recursion per split-mean source and compares with the direct DP.
DecompositionReport variance_decomposition_check(std::size_t k, std::size_t n_max);

/// The same identity in exact arithmetic; true when it holds exactly.
bool variance_decomposition_exact(std::size_t k, std::size_t n_max);

struct StabilityReport {
  std::size_t n_lo = 0;
  std::size_t n_hi = 0;
  /// Largest scaled error in [n_lo, split) and [split, n_hi], split = sqrt(n_lo n_hi).
  double head_max = 0.0;
  double tail_max = 0.0;
  double max_growth = 2.0;
  bool passed = false;
};

/// Scaled errors q(n) = |error[n]| * n^power over [n_lo, n_hi]. Passes when
/// all are finite and the upper half stays within max_growth of the lower half.
StabilityReport error_stability(const std::vector<double>& error, double power,
                                std::size_t n_lo, std::size_t n_hi, double max_growth = 2.0);

/// CSV: n,mean,variance,E_n,V_n.
void write_moments_csv(std::ostream& os, const MomentTable& table);

}  // namespace hdc
