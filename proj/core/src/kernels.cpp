#include "hdc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hdc {

HarmonicTable::HarmonicTable(std::size_t max_n, std::size_t exact_cap) {
  if (max_n == 0) {
    throw std::invalid_argument("harmonic table: max_n must be at least 1");
  }
  if (exact_cap > max_n) {
    throw std::invalid_argument("harmonic table: exact_cap exceeds max_n");
  }
  values_.resize(max_n + 1);
  values_[0] = 0.0;
  CompensatedSum acc;
  for (std::size_t n = 1; n <= max_n; ++n) {
    acc.add(1.0 / static_cast<double>(n));
    values_[n] = acc.value();
  }
  if (exact_cap > 0) {
    exact_.resize(exact_cap + 1);
    exact_[0] = 0;
    for (std::size_t n = 1; n <= exact_cap; ++n) {
      exact_[n] = exact_[n - 1] + Rational(1, static_cast<unsigned long>(n));
    }
  }
}

double HarmonicTable::at(std::size_t n) const {
  if (n > max_n()) {
    throw std::out_of_range("harmonic table: index beyond max_n");
  }
  return values_[n];
}

const Rational& HarmonicTable::exact(std::size_t n) const {
  if (exact_.empty() || n > exact_cap()) {
    throw std::out_of_range("harmonic table: index beyond exact_cap");
  }
  return exact_[n];
}

double HarmonicTable::difference(std::size_t a, std::size_t b) const {
  if (a > b || b > max_n()) {
    throw std::out_of_range("harmonic table: bad difference range");
  }
  constexpr std::size_t direct_span = 64;
  if (b - a <= direct_span) {
    CompensatedSum acc;
    for (std::size_t j = b; j > a; --j) acc.add(1.0 / static_cast<double>(j));
    return acc.value();
  }
  return values_[b] - values_[a];
}

HarmonicTable build_harmonic_table(std::size_t max_n, std::size_t exact_cap) {
  return HarmonicTable(max_n, exact_cap);
}

const HarmonicTable& shared_harmonics() {
  static const HarmonicTable table(shared_harmonics_max_n);
  return table;
}

double harmonic(std::size_t n) {
  if (n <= shared_harmonics_max_n) return shared_harmonics()[n];
  const double x = static_cast<double>(n);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + kEulerGamma + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0;
}

Rational harmonic_exact(std::size_t n) {
  Rational h = 0;
  for (std::size_t j = 1; j <= n; ++j) h += Rational(1, static_cast<unsigned long>(j));
  return h;
}

std::string SplitFamily::name() const {
  if (is_critical()) return "critical";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "beta(" << *beta_ << ")";
  return os.str();
}

SplitFamily parse_split_family(const std::string& text) {
  if (text == "critical") return SplitFamily::critical();
  std::size_t used = 0;
  double b = 0.0;
  try {
    b = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("beta must be 'critical' or a real number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(b)) {
    throw std::invalid_argument("beta must be 'critical' or a real number, got '" + text + "'");
  }
  return SplitFamily::beta(b);
}

double SplitDistribution::probability(std::size_t i) const {
  if (i < 1 || i >= m) throw std::invalid_argument("split index out of range");
  return probabilities[i - 1];
}

SplitDistribution split_distribution(std::size_t m, SplitFamily family) {
  if (m < 2) throw std::invalid_argument("split distribution requires m >= 2");
  SplitDistribution out;
  out.m = m;
  out.probabilities.resize(m - 1);
  out.cumulative.resize(m - 1);
  const double md = static_cast<double>(m);
  if (family.is_critical()) {
    const double scale = md / (2.0 * harmonic(m - 1));
    for (std::size_t i = 1; i < m; ++i) {
      const double id = static_cast<double>(i);
      out.probabilities[i - 1] = scale / (id * (md - id));
    }
  } else {
    const double b = family.beta_value();
    CompensatedSum z;
    for (std::size_t i = 1; i < m; ++i) {
      const double id = static_cast<double>(i);
      const double w = std::pow(id * (md - id), b);
      out.probabilities[i - 1] = w;
      z.add(w);
    }
    const double total = z.value();
    for (double& p : out.probabilities) p /= total;
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    acc.add(out.probabilities[i]);
    out.cumulative[i] = acc.value();
  }
  out.cumulative.back() = 1.0;
  return out;
}

std::vector<Rational> split_distribution_exact(std::size_t m) {
  if (m < 2) throw std::invalid_argument("split distribution requires m >= 2");
  const Rational h = harmonic_exact(m - 1);
  std::vector<Rational> q(m - 1);
  for (std::size_t i = 1; i < m; ++i) {
    Rational denom = 2 * h * Rational(static_cast<unsigned long>(i * (m - i)));
    q[i - 1] = Rational(static_cast<unsigned long>(m)) / denom;
    q[i - 1].canonicalize();
  }
  return q;
}

DescentKernel DescentKernel::harmonic() {
  return DescentKernel(Kind::harmonic, -1.0, "harmonic", {});
}

DescentKernel DescentKernel::beta(double b) {
  if (!(b < 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("beta descent kernel requires beta < 0");
  }
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "beta(" << b << ")";
  return DescentKernel(Kind::beta, b, os.str(), [b](std::size_t n, std::size_t i) {
    const double id = static_cast<double>(i);
    const double rest = static_cast<double>(n - i);
    return id * std::pow(id * rest, b);
  });
}

DescentKernel DescentKernel::custom(std::string name, WeightFn weights) {
  if (!weights) throw std::invalid_argument("custom kernel requires a weight function");
  return DescentKernel(Kind::custom, 0.0, std::move(name), std::move(weights));
}

void DescentKernel::row(std::size_t n, std::size_t first_i, std::span<double> out) const {
  if (n < 2 || first_i < 1 || first_i > n - 1) {
    throw std::invalid_argument("descent kernel row: need n >= 2 and 1 <= first_i <= n-1");
  }
  if (out.size() < n - first_i) throw std::invalid_argument("descent kernel row: output too small");
  if (kind_ == Kind::harmonic) {
    const double h = hdc::harmonic(n - 1);
    for (std::size_t i = first_i; i < n; ++i) {
      out[i - first_i] = 1.0 / (h * static_cast<double>(n - i));
    }
    return;
  }
  CompensatedSum z;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = weights_(n, i);
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("descent kernel '" + name_ + "': weights must be positive and finite");
    }
    z.add(w);
    if (i >= first_i) out[i - first_i] = w;
  }
  const double total = z.value();
  for (std::size_t j = 0; j < n - first_i; ++j) out[j] /= total;
}

std::vector<double> DescentKernel::row(std::size_t n) const {
  std::vector<double> out(n - 1);
  row(n, 1, out);
  return out;
}

double DescentKernel::operator()(std::size_t n, std::size_t i) const {
  if (n < 2 || i < 1 || i > n - 1) {
    throw std::invalid_argument("descent kernel: need n >= 2 and 1 <= i <= n-1");
  }
  if (kind_ == Kind::harmonic) {
    return 1.0 / (hdc::harmonic(n - 1) * static_cast<double>(n - i));
  }
  std::vector<double> tail(n - i);
  row(n, i, tail);
  return tail.front();
}

double descent_kernel(const DescentKernel& kernel, std::size_t n, std::size_t i) {
  return kernel(n, i);
}

Rational harmonic_kernel_exact(std::size_t n, std::size_t i) {
  if (n < 2 || i < 1 || i > n - 1) {
    throw std::invalid_argument("descent kernel: need n >= 2 and 1 <= i <= n-1");
  }
  Rational p = 1 / (harmonic_exact(n - 1) * Rational(static_cast<unsigned long>(n - i)));
  p.canonicalize();
  return p;
}

RatioConditionReport ratio_condition_check(const DescentKernel& kernel, std::size_t n_max) {
  if (n_max < 3) throw std::invalid_argument("ratio condition check requires n_max >= 3");
  constexpr double rel_tol = 1e-12;
  RatioConditionReport report;
  std::vector<double> cur = kernel.row(2);
  for (std::size_t n = 2; n < n_max; ++n) {
    std::vector<double> next = kernel.row(n + 1);
    double prev_ratio = cur[0] / next[0];
    for (std::size_t i = 2; i < n; ++i) {
      const double ratio = cur[i - 1] / next[i - 1];
      if (ratio < prev_ratio * (1.0 - rel_tol)) {
        report.passed = false;
        if (!report.first_violation) report.first_violation = std::make_pair(n, i - 1);
      }
      if (!(ratio > prev_ratio)) {
        report.strict = false;
        if (!report.first_tie) report.first_tie = std::make_pair(n, i - 1);
      }
      prev_ratio = ratio;
    }
    ++report.rows_checked;
    cur = std::move(next);
  }
  if (!report.passed) report.strict = false;
  return report;
}

}  // namespace hdc
