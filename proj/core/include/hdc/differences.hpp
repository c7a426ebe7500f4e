#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hdc/kernels.hpp"
#include "hdc/numeric.hpp"

namespace hdc {

/// s(n, i) = p(n,1) + ... + p(n,i). Closed form for the harmonic kernel:
/// (h_{n-1} - h_{n-i-1}) / h_{n-1}.
double s_value(const DescentKernel& kernel, std::size_t n, std::size_t i);
double s_value(std::size_t n, std::size_t i);
Rational s_value_exact(std::size_t n, std::size_t i);

/// Coefficient of d_i in d_n = (1/h_n) sum_{i=k}^{n-1} alpha'_{i,n} d_i:
///   (i-k+1)/((n-i)(n-k+1))
///     - (k-1)/(n(n-k+1)) * (h_{n-k} - h_{n-i-1}) / (h_{n-1} - h_{n-k}).
/// Requires n > k >= 2 and k <= i <= n-1.
double alpha_prime(std::size_t i, std::size_t n, std::size_t k);
Rational alpha_prime_exact(std::size_t i, std::size_t n, std::size_t k);

/// The same coefficient rebuilt from the pairwise kernel differences,
/// (h_n - h_{n-k+1}) * sum_{a=k-1}^{i-1} sum_{b=0}^{k-2}
///   (a-b) / ((n-a)(n-a-1)(n-b)(n-b-1)) / ((h_n - h_{n-k+1})(h_{n-1} - h_{n-k})).
/// O(i k) rational work; an oracle for small n.
Rational alpha_prime_double_sum(std::size_t i, std::size_t n, std::size_t k);

/// The coefficient from its definition through partial sums:
/// (h_n - h_{n-k+1}) * (s(n,i)/s(n,k-1) - s(n+1,i)/s(n+1,k-1)).
Rational alpha_prime_from_partial_sums(std::size_t i, std::size_t n, std::size_t k);

struct DifferenceSequence {
  std::size_t k = 2;
  /// d[j] holds d_{k+j} = x_{k+j} - x_{k+j+1}.
  std::vector<double> d;

  std::size_t last() const noexcept { return k + d.size() - 1; }
  double operator[](std::size_t n) const;
};

/// Differences d_k..d_{n_max-1} of the harmonic sequence started at
/// (k, x_k), computed through the alpha' recursion with d_k = x_k(1 - 1/h_k).
DifferenceSequence d_sequence(std::size_t k, double x_k, std::size_t n_max);

/// Exact version; result[n] = d_n for k <= n <= n_max - 1, zero below k.
std::vector<Rational> d_sequence_exact(std::size_t k, const Rational& x_k, std::size_t n_max);

/// x_n - x_{n+1} for k <= n < n_max, from a direct evaluation of the
/// harmonic sequence in GMP floating point with `bits` of mantissa. Indexed
/// like DifferenceSequence::d.
std::vector<double> direct_differences(std::size_t k, double x_k, std::size_t n_max,
                                       unsigned bits = 256);

/// CSV: n,d_n.
void write_differences_csv(std::ostream& os, const DifferenceSequence& diffs);

}  // namespace hdc
