#include "hdc/differences.hpp"

#include <ostream>
#include <vector>

#include <gmpxx.h>
#include <stdexcept>

namespace hdc {

namespace {

void check_alpha_range(std::size_t i, std::size_t n, std::size_t k) {
  if (k < 2 || n <= k) throw std::invalid_argument("alpha': need n > k >= 2");
  if (i < k || i >= n) throw std::invalid_argument("alpha': need k <= i <= n-1");
}

Rational rat(std::size_t v) { return Rational(static_cast<unsigned long>(v)); }

// h_b - h_a in exact arithmetic, a <= b.
Rational harmonic_span_exact(std::size_t a, std::size_t b) {
  Rational acc = 0;
  for (std::size_t j = a + 1; j <= b; ++j) acc += Rational(1, static_cast<unsigned long>(j));
  return acc;
}

// h_b - h_a in floating point with full relative precision, a <= b.
double harmonic_span(std::size_t a, std::size_t b) {
  if (b <= shared_harmonics_max_n) return shared_harmonics().difference(a, b);
  CompensatedSum acc;
  for (std::size_t j = b; j > a; --j) acc.add(1.0 / static_cast<double>(j));
  return acc.value();
}

}  // namespace

double s_value(const DescentKernel& kernel, std::size_t n, std::size_t i) {
  if (n < 2 || i < 1 || i > n - 1) throw std::invalid_argument("s(n,i): need 1 <= i <= n-1");
  if (i == n - 1) return 1.0;
  if (kernel.kind() == DescentKernel::Kind::harmonic) return s_value(n, i);
  const std::vector<double> row = kernel.row(n);
  CompensatedSum acc;
  for (std::size_t j = 0; j < i; ++j) acc.add(row[j]);
  return acc.value();
}

double s_value(std::size_t n, std::size_t i) {
  if (n < 2 || i < 1 || i > n - 1) throw std::invalid_argument("s(n,i): need 1 <= i <= n-1");
  return harmonic_span(n - i - 1, n - 1) / harmonic(n - 1);
}

Rational s_value_exact(std::size_t n, std::size_t i) {
  if (n < 2 || i < 1 || i > n - 1) throw std::invalid_argument("s(n,i): need 1 <= i <= n-1");
  Rational s = harmonic_span_exact(n - i - 1, n - 1) / harmonic_exact(n - 1);
  s.canonicalize();
  return s;
}

double alpha_prime(std::size_t i, std::size_t n, std::size_t k) {
  check_alpha_range(i, n, k);
  const double nd = static_cast<double>(n);
  const double first = static_cast<double>(i - k + 1) /
                       (static_cast<double>(n - i) * static_cast<double>(n - k + 1));
  const double outer = static_cast<double>(k - 1) / (nd * static_cast<double>(n - k + 1));
  return first - outer * harmonic_span(n - i - 1, n - k) / harmonic_span(n - k, n - 1);
}

Rational alpha_prime_exact(std::size_t i, std::size_t n, std::size_t k) {
  check_alpha_range(i, n, k);
  Rational first = rat(i - k + 1) / (rat(n - i) * rat(n - k + 1));
  Rational outer = rat(k - 1) / (rat(n) * rat(n - k + 1));
  Rational out = first - outer * harmonic_span_exact(n - i - 1, n - k) / harmonic_span_exact(n - k, n - 1);
  out.canonicalize();
  return out;
}

Rational alpha_prime_double_sum(std::size_t i, std::size_t n, std::size_t k) {
  check_alpha_range(i, n, k);
  Rational acc = 0;
  for (std::size_t a = k - 1; a <= i - 1; ++a) {
    for (std::size_t b = 0; b <= k - 2; ++b) {
      const long diff = static_cast<long>(a) - static_cast<long>(b);
      Rational term(diff);
      term /= rat(n - a) * rat(n - a - 1) * rat(n - b) * rat(n - b - 1);
      acc += term;
    }
  }
  // The (h_n - h_{n-k+1}) factors of -alpha and of alpha' cancel.
  Rational out = acc / harmonic_span_exact(n - k, n - 1);
  out.canonicalize();
  return out;
}

Rational alpha_prime_from_partial_sums(std::size_t i, std::size_t n, std::size_t k) {
  check_alpha_range(i, n, k);
  const Rational alpha = s_value_exact(n + 1, i) / s_value_exact(n + 1, k - 1) -
                         s_value_exact(n, i) / s_value_exact(n, k - 1);
  Rational out = -harmonic_span_exact(n - k + 1, n) * alpha;
  out.canonicalize();
  return out;
}

double DifferenceSequence::operator[](std::size_t n) const {
  if (n < k || n > last()) throw std::out_of_range("difference index out of range");
  return d[n - k];
}

std::vector<double> direct_differences(std::size_t k, double x_k, std::size_t n_max,
                                       unsigned bits) {
  if (k < 1) throw std::invalid_argument("direct differences: k must be >= 1");
  if (!(x_k > 0.0)) throw std::invalid_argument("direct differences: x_k must be positive");
  if (n_max <= k) throw std::invalid_argument("direct differences: n_max must exceed k");
  if (bits < 64) throw std::invalid_argument("direct differences: need at least 64 bits");

  std::vector<mpf_class> inv(n_max + 1, mpf_class(0, bits));
  for (std::size_t j = 1; j <= n_max; ++j) {
    inv[j] = 1;
    inv[j] /= static_cast<unsigned long>(j);
  }
  std::vector<mpf_class> x(n_max + 1, mpf_class(0, bits));
  x[k] = x_k;
  mpf_class h(0, bits);
  for (std::size_t j = 1; j < k; ++j) h += inv[j];
  mpf_class acc(0, bits);
  mpf_class term(0, bits);
  for (std::size_t n = k + 1; n <= n_max; ++n) {
    h += inv[n - 1];  // now h_{n-1}
    acc = 0;
    for (std::size_t i = k; i < n; ++i) {
      term = x[i] * inv[n - i];
      acc += term;
    }
    x[n] = acc / h;
  }
  std::vector<double> d(n_max - k);
  for (std::size_t n = k; n < n_max; ++n) {
    term = x[n] - x[n + 1];
    d[n - k] = term.get_d();
  }
  return d;
}

DifferenceSequence d_sequence(std::size_t k, double x_k, std::size_t n_max) {
  if (k < 2) throw std::invalid_argument("d-sequence: k must be >= 2");
  if (!(x_k > 0.0)) throw std::invalid_argument("d-sequence: x_k must be positive");
  if (n_max <= k) throw std::invalid_argument("d-sequence: n_max must exceed k");

  DifferenceSequence out{k, std::vector<double>(n_max - k, 0.0)};
  out.d[0] = x_k * (1.0 - 1.0 / harmonic(k));
  const double kd = static_cast<double>(k);
  for (std::size_t n = k + 1; n < n_max; ++n) {
    const double nd = static_cast<double>(n);
    const double width = nd - kd + 1.0;
    const double outer = (kd - 1.0) / (nd * width);
    const double denom = harmonic_span(n - k, n - 1);
    // tail accumulates h_{n-k} - h_{n-i-1} = sum_{j=n-i}^{n-k} 1/j as i grows.
    CompensatedSum tail;
    CompensatedSum acc;
    for (std::size_t i = k; i < n; ++i) {
      tail.add(1.0 / static_cast<double>(n - i));
      const double first = static_cast<double>(i - k + 1) / (static_cast<double>(n - i) * width);
      const double coeff = first - outer * tail.value() / denom;
      acc.add(coeff * out.d[i - k]);
    }
    out.d[n - k] = acc.value() / harmonic(n);
  }
  return out;
}

std::vector<Rational> d_sequence_exact(std::size_t k, const Rational& x_k, std::size_t n_max) {
  if (k < 2) throw std::invalid_argument("d-sequence: k must be >= 2");
  if (x_k <= 0) throw std::invalid_argument("d-sequence: x_k must be positive");
  if (n_max <= k) throw std::invalid_argument("d-sequence: n_max must exceed k");
  std::vector<Rational> d(n_max);
  d[k] = x_k * (1 - 1 / harmonic_exact(k));
  d[k].canonicalize();
  for (std::size_t n = k + 1; n < n_max; ++n) {
    Rational acc = 0;
    for (std::size_t i = k; i < n; ++i) acc += alpha_prime_exact(i, n, k) * d[i];
    d[n] = acc / harmonic_exact(n);
  }
  return d;
}

void write_differences_csv(std::ostream& os, const DifferenceSequence& diffs) {
  const auto old_precision = os.precision(17);
  os << "n,d_n\n";
  for (std::size_t n = diffs.k; n <= diffs.last(); ++n) os << n << ',' << diffs[n] << '\n';
  os.precision(old_precision);
}

}  // namespace hdc
