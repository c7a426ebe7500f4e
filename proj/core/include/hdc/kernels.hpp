#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdc/numeric.hpp"

namespace hdc {

/// Harmonic numbers h_0..h_max_n with h_0 = 0. Values up to exact_cap are
/// also held as exact rationals.
class HarmonicTable {
 public:
  HarmonicTable(std::size_t max_n, std::size_t exact_cap = 0);

  std::size_t max_n() const noexcept { return values_.size() - 1; }
  std::size_t exact_cap() const noexcept { return exact_.empty() ? 0 : exact_.size() - 1; }

  /// h_n, unchecked.
  double operator[](std::size_t n) const noexcept { return values_[n]; }
  double at(std::size_t n) const;
  const Rational& exact(std::size_t n) const;

  /// h_b - h_a for a <= b. Short spans are summed directly so that the
  /// result keeps full relative precision.
  double difference(std::size_t a, std::size_t b) const;

  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
  std::vector<Rational> exact_;
};

HarmonicTable build_harmonic_table(std::size_t max_n, std::size_t exact_cap);

/// Process-wide table covering n <= shared_harmonics_max_n.
inline constexpr std::size_t shared_harmonics_max_n = std::size_t{1} << 21;
const HarmonicTable& shared_harmonics();

/// h_n in double precision; uses the shared table or an asymptotic expansion
/// beyond it.
double harmonic(std::size_t n);
Rational harmonic_exact(std::size_t n);

/// Splitting law family: the critical law q_m(i) = m / (2 h_{m-1} i (m-i)),
/// or weights proportional to (i(m-i))^beta.
class SplitFamily {
 public:
  static SplitFamily critical() { return SplitFamily(std::nullopt); }
  static SplitFamily beta(double b) { return SplitFamily(b); }

  bool is_critical() const noexcept { return !beta_; }
  /// -1 for the critical family.
  double beta_value() const noexcept { return beta_.value_or(-1.0); }
  std::string name() const;

 private:
  explicit SplitFamily(std::optional<double> b) : beta_(b) {}
  std::optional<double> beta_;
};

/// Parses "critical" or a real number.
SplitFamily parse_split_family(const std::string& text);

struct SplitDistribution {
  std::size_t m = 0;
  /// probabilities[i - 1] = q_m(i), i = 1..m-1.
  std::vector<double> probabilities;
  /// cumulative[i - 1] = q_m(1) + ... + q_m(i); the last entry is exactly 1.
  std::vector<double> cumulative;

  double probability(std::size_t i) const;
};

SplitDistribution split_distribution(std::size_t m, SplitFamily family);

/// Critical split law in exact arithmetic; entry i - 1 holds q_m(i).
std::vector<Rational> split_distribution_exact(std::size_t m);

/// Descent transition law p(n, i), 1 <= i <= n-1. Rows are normalized.
class DescentKernel {
 public:
  enum class Kind { harmonic, beta, custom };
  /// Unnormalized nonnegative weights w(n, i); each row is normalized on use.
  using WeightFn = std::function<double(std::size_t n, std::size_t i)>;

  /// p(n, i) = 1 / (h_{n-1} (n - i)).
  static DescentKernel harmonic();
  /// Size-biased beta-splitting step: p(n, i) proportional to i (i(n-i))^beta.
  /// Requires beta < 0.
  static DescentKernel beta(double beta);
  static DescentKernel custom(std::string name, WeightFn weights);

  Kind kind() const noexcept { return kind_; }
  double beta_value() const noexcept { return beta_; }
  const std::string& name() const noexcept { return name_; }

  /// p(n, i) with range validation. O(n) for non-harmonic kinds.
  double operator()(std::size_t n, std::size_t i) const;

  /// Writes p(n, first_i), ..., p(n, n-1) into out[0..n-1-first_i].
  void row(std::size_t n, std::size_t first_i, std::span<double> out) const;
  std::vector<double> row(std::size_t n) const;

 private:
  DescentKernel(Kind kind, double beta, std::string name, WeightFn weights)
      : kind_(kind), beta_(beta), name_(std::move(name)), weights_(std::move(weights)) {}

  Kind kind_;
  double beta_;
  std::string name_;
  WeightFn weights_;
};

double descent_kernel(const DescentKernel& kernel, std::size_t n, std::size_t i);

/// Harmonic kernel in exact arithmetic.
Rational harmonic_kernel_exact(std::size_t n, std::size_t i);

struct RatioConditionReport {
  bool passed = true;
  /// Every row ratio was strictly increasing (not merely nondecreasing).
  bool strict = true;
  std::size_t rows_checked = 0;
  /// (n, i) where p(n,i+1)/p(n+1,i+1) < p(n,i)/p(n+1,i).
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
  std::optional<std::pair<std::size_t, std::size_t>> first_tie;
};

/// Checks that p(n,i) / p(n+1,i) is nondecreasing in i for 2 <= n < n_max.
RatioConditionReport ratio_condition_check(const DescentKernel& kernel, std::size_t n_max);

}  // namespace hdc
