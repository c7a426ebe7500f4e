#include "hdc/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hdc {

namespace {

constexpr std::size_t kBootstrapSpanGuard = 100'000;

}  // namespace

double Sequence::operator[](std::size_t n) const {
  if (n < k) return 0.0;
  if (n > n_max()) throw std::out_of_range("sequence index beyond n_max");
  return values[n - k];
}

Sequence evaluate_sequence(const DescentKernel& kernel, std::size_t k, double x_k,
                           std::size_t n_max) {
  if (k < 1) throw std::invalid_argument("sequence: k must be >= 1");
  if (!(x_k > 0.0) || !std::isfinite(x_k)) throw std::invalid_argument("sequence: x_k must be positive");
  if (n_max < k) throw std::invalid_argument("sequence: n_max below k");

  Sequence seq{kernel, k, x_k, {}, std::nullopt};
  seq.values.resize(n_max - k + 1);
  seq.values[0] = x_k;
  std::vector<double> weights(n_max);
  for (std::size_t n = k + 1; n <= n_max; ++n) {
    const std::size_t terms = n - k;
    CompensatedSum acc;
    if (kernel.kind() == DescentKernel::Kind::harmonic) {
      // p(n,i) = 1/(h_{n-1}(n-i)); the common factor is applied once.
      for (std::size_t j = 0; j < terms; ++j) {
        acc.add(seq.values[j] / static_cast<double>(n - k - j));
      }
      seq.values[terms] = acc.value() / harmonic(n - 1);
    } else {
      kernel.row(n, k, std::span<double>(weights.data(), terms));
      for (std::size_t j = 0; j < terms; ++j) acc.add(weights[j] * seq.values[j]);
      seq.values[terms] = acc.value();
    }
  }
  if (kernel.kind() == DescentKernel::Kind::harmonic) seq.limit = limit_value(k, x_k);
  return seq;
}

std::vector<Rational> evaluate_sequence_exact(std::size_t k, const Rational& x_k,
                                              std::size_t n_max) {
  if (k < 1) throw std::invalid_argument("sequence: k must be >= 1");
  if (x_k <= 0) throw std::invalid_argument("sequence: x_k must be positive");
  if (n_max < k) throw std::invalid_argument("sequence: n_max below k");
  std::vector<Rational> x(n_max + 1);
  x[k] = x_k;
  Rational h = harmonic_exact(k - 1);
  for (std::size_t n = k + 1; n <= n_max; ++n) {
    h += Rational(1, static_cast<unsigned long>(n - 1));
    Rational acc = 0;
    for (std::size_t i = k; i < n; ++i) {
      acc += x[i] / Rational(static_cast<unsigned long>(n - i));
    }
    x[n] = acc / h;
  }
  return x;
}

double occupation_limit(std::size_t k) {
  if (k < 1) throw std::invalid_argument("occupation limit: k must be >= 1");
  if (k == 1) return 1.0;
  return 6.0 * harmonic(k - 1) / (kPi * kPi * static_cast<double>(k - 1));
}

double limit_value(std::size_t k, double x_k) {
  if (k < 1) throw std::invalid_argument("limit: k must be >= 1");
  if (!(x_k > 0.0)) throw std::invalid_argument("limit: x_k must be positive");
  return k == 1 ? x_k : x_k * occupation_limit(k);
}

OccupationVector occupation_vector(std::size_t n) {
  if (n < 2) throw std::invalid_argument("occupation vector requires n >= 2");
  // u(m) = sum_{j>m} u(j) p(j,m); contributions are pushed down from j = n.
  std::vector<CompensatedSum> acc(n + 1);
  OccupationVector out{n, std::vector<double>(n + 1, 0.0)};
  out.a[n] = 1.0;
  for (std::size_t j = n; j >= 2; --j) {
    const double u = (j == n) ? 1.0 : acc[j].value();
    out.a[j] = u;
    const double scale = u / harmonic(j - 1);
    for (std::size_t m = 1; m < j; ++m) acc[m].add(scale / static_cast<double>(j - m));
  }
  out.a[1] = acc[1].value();
  return out;
}

std::vector<Rational> occupation_vector_exact(std::size_t n) {
  if (n < 2) throw std::invalid_argument("occupation vector requires n >= 2");
  std::vector<Rational> acc(n + 1);
  std::vector<Rational> a(n + 1);
  a[n] = 1;
  Rational h = harmonic_exact(n - 1);
  for (std::size_t j = n; j >= 2; --j) {
    if (j < n) a[j] = acc[j];
    const Rational scale = a[j] / h;
    for (std::size_t m = 1; m < j; ++m) acc[m] += scale / Rational(static_cast<unsigned long>(j - m));
    h -= Rational(1, static_cast<unsigned long>(j - 1));
  }
  a[1] = acc[1];
  return a;
}

LongTermBoundReport verify_longterm_bound(const Sequence& seq) {
  if (seq.kernel.kind() != DescentKernel::Kind::harmonic) {
    throw std::invalid_argument("long-term bound check needs the harmonic kernel");
  }
  const double x = seq.limit.value_or(limit_value(seq.k, seq.x_k));
  LongTermBoundReport report;
  const std::size_t k = seq.k;
  const std::size_t n_max = seq.n_max();
  const std::size_t mid = k + (n_max - k) / 2;
  const double scale = static_cast<double>(k) * seq.x_k;
  for (std::size_t n = k + 1; n <= n_max; ++n) {
    const double c = (seq[n] - x) * static_cast<double>(n - k) / scale;
    report.constant = std::max(report.constant, c);
    if (n <= mid) {
      report.head_constant = std::max(report.head_constant, c);
    } else {
      report.tail_constant = std::max(report.tail_constant, c);
    }
  }
  report.passed = std::isfinite(report.constant) && report.constant <= report.ceiling &&
                  report.tail_constant <= report.head_constant;
  return report;
}

BootstrapBoundReport verify_bootstrap_bound(std::size_t k, unsigned c, unsigned l) {
  if (k < 2) throw std::invalid_argument("bootstrap bound: k must be >= 2");
  if (c < 2) throw std::invalid_argument("bootstrap bound: c must be >= 2");
  if (l < 1) throw std::invalid_argument("bootstrap bound: l must be >= 1");
  BootstrapBoundReport report;
  report.k = k;
  report.c = c;
  report.l = l;
  report.exponent = 1.0 - 1.0 / static_cast<double>(c + 1) - std::ldexp(1.0, -static_cast<int>(l));
  const double span = std::pow(static_cast<double>(k), report.exponent);
  report.m_max = static_cast<std::size_t>(std::floor(span + 1e-9));
  if (report.m_max < 1) throw std::invalid_argument("bootstrap bound: empty m-range");
  if (report.m_max > kBootstrapSpanGuard) {
    throw ResourceError("bootstrap bound: m-range of " + std::to_string(report.m_max) +
                        " terms exceeds the O(m^2) guard; lower c or l, or k");
  }
  // Only x_k..x_{k+m_max} are nonzero inputs, so the work is O(m_max^2).
  const Sequence seq = evaluate_sequence(DescentKernel::harmonic(), k, 1.0, k + report.m_max);
  const double bound_scale = std::pow(static_cast<double>(c), static_cast<double>(l)) / harmonic(k);
  report.passed = true;
  for (std::size_t m = 1; m <= report.m_max; ++m) {
    const double bound = bound_scale / static_cast<double>(m);
    const double ratio = seq[k + m] / bound;
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (ratio > 1.0 && !report.first_violation) {
      report.first_violation = m;
      report.passed = false;
    }
  }
  return report;
}

void write_sequence_csv(std::ostream& os, const Sequence& seq) {
  const auto old_precision = os.precision(17);
  os << (seq.limit ? "n,x_n,x_n_minus_x\n" : "n,x_n\n");
  for (std::size_t n = seq.k; n <= seq.n_max(); ++n) {
    os << n << ',' << seq[n];
    if (seq.limit) os << ',' << (seq[n] - *seq.limit);
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace hdc
