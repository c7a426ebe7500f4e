#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hdc/kernels.hpp"
#include "hdc/numeric.hpp"

namespace hdc {

/// x_n = sum_{i<n} p(n,i) x_i for n > k, with x_1 = ... = x_{k-1} = 0.
struct Sequence {
  DescentKernel kernel = DescentKernel::harmonic();
  std::size_t k = 1;
  double x_k = 1.0;
  /// values[j] holds x_{k+j}.
  std::vector<double> values;
  /// Closed-form limit, known for the harmonic kernel.
  std::optional<double> limit;

  std::size_t n_max() const noexcept { return k + values.size() - 1; }
  /// x_n; zero below k.
  double operator[](std::size_t n) const;
};

/// Direct O(n_max^2) evaluation with compensated, ascending-i summation.
Sequence evaluate_sequence(const DescentKernel& kernel, std::size_t k, double x_k,
                           std::size_t n_max);

/// Harmonic-kernel sequence in exact arithmetic; result[n] = x_n for
/// 0 <= n <= n_max (entries below k are zero).
std::vector<Rational> evaluate_sequence_exact(std::size_t k, const Rational& x_k,
                                              std::size_t n_max);

/// a(k) = 6 h_{k-1} / (pi^2 (k-1)) for k >= 2, and a(1) = 1.
double occupation_limit(std::size_t k);

/// Harmonic-kernel limit of the sequence started at (k, x_k): x_k a(k).
double limit_value(std::size_t k, double x_k);

struct OccupationVector {
  std::size_t n = 0;
  /// a[k] = a(n, k) for 1 <= k <= n; a[0] is unused.
  std::vector<double> a;

  double operator[](std::size_t k) const { return a.at(k); }
};

/// Probability that the descent chain started at n visits each k. One
/// backward O(n^2) pass; a(n, 1) = 1 comes out as a checksum.
OccupationVector occupation_vector(std::size_t n);
std::vector<Rational> occupation_vector_exact(std::size_t n);

struct LongTermBoundReport {
  /// sup over n > k of (x_n - x)(n - k) / (k x_k).
  double constant = 0.0;
  /// Same supremum restricted to the lower and upper halves of (k, n_max].
  double head_constant = 0.0;
  double tail_constant = 0.0;
  double ceiling = 10.0;
  bool passed = false;
};

/// Requires a harmonic-kernel sequence. Passes when the constant is finite,
/// at most `ceiling`, and the upper half does not exceed the lower half.
LongTermBoundReport verify_longterm_bound(const Sequence& seq);

struct BootstrapBoundReport {
  std::size_t k = 0;
  unsigned c = 2;
  unsigned l = 1;
  /// d_l = 1 - 1/(c+1) - 2^-l.
  double exponent = 0.0;
  std::size_t m_max = 0;
  /// max over m of x_{k+m} m h_k / (c^l x_k); the bound holds iff <= 1.
  double max_ratio = 0.0;
  std::optional<std::size_t> first_violation;
  bool passed = false;
};

/// Checks x_{k+m} <= c^l x_k / (m h_k) for 1 <= m <= k^{d_l}.
BootstrapBoundReport verify_bootstrap_bound(std::size_t k, unsigned c, unsigned l);

/// CSV: n,x_n[,x_n_minus_x].
void write_sequence_csv(std::ostream& os, const Sequence& seq);

}  // namespace hdc
