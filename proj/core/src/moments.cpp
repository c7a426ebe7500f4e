#include "hdc/moments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "hdc/kernels.hpp"
#include "hdc/recursion.hpp"

namespace hdc {
namespace {

// X_n for n < seed is zero; X_seed has the given moments; above the seed
// X_n = X_L + X_{n-L} + b_n with b_n independent of the split.
template <typename T>
struct DpPlan {
  std::size_t seed = 1;
  T seed_mean{0};
  T seed_var{0};
  bool has_bias = false;
};

// Double DP. q_n(i) = q_n(n-i) and the summand is symmetric too, so only
// i <= n/2 is visited.
MomentTable run_dp(std::string label, std::size_t n_max, const DpPlan<double>& plan) {
  if (n_max < 1) throw std::invalid_argument("moments: n_max must be >= 1");
  MomentTable t{std::move(label), n_max, std::vector<double>(n_max + 1, 0.0),
                std::vector<double>(n_max + 1, 0.0)};
  if (plan.seed > n_max) return t;
  t.mean[plan.seed] = plan.seed_mean;
  t.variance[plan.seed] = plan.seed_var;
  std::vector<double> q;
  for (std::size_t n = std::max<std::size_t>(plan.seed + 1, 2); n <= n_max; ++n) {
    const double h = harmonic(n - 1);
    const double nd = static_cast<double>(n);
    const std::size_t half = n / 2;
    q.resize(half + 1);
    for (std::size_t i = 1; i <= half; ++i) {
      const double w = nd / (2.0 * h * static_cast<double>(i) * static_cast<double>(n - i));
      q[i] = (2 * i == n) ? w : 2.0 * w;
    }
    CompensatedSum m;
    CompensatedSum v;
    for (std::size_t i = 1; i <= half; ++i) {
      m += q[i] * (t.mean[i] + t.mean[n - i]);
      v += q[i] * (t.variance[i] + t.variance[n - i]);
    }
    const double mean = m.value();
    CompensatedSum spread;
    for (std::size_t i = 1; i <= half; ++i) {
      const double d = t.mean[i] + t.mean[n - i] - mean;
      spread += q[i] * d * d;
    }
    t.mean[n] = mean;
    t.variance[n] = v.value() + spread.value();
    if (plan.has_bias) {
      t.mean[n] += 1.0 / h;
      t.variance[n] += 1.0 / (h * h);
    }
  }
  return t;
}

ExactMomentTable run_dp_exact(std::string label, std::size_t n_max, const DpPlan<Rational>& plan) {
  if (n_max < 1) throw std::invalid_argument("moments: n_max must be >= 1");
  ExactMomentTable t{std::move(label), n_max, std::vector<Rational>(n_max + 1, Rational(0)),
                     std::vector<Rational>(n_max + 1, Rational(0))};
  if (plan.seed > n_max) return t;
  t.mean[plan.seed] = plan.seed_mean;
  t.variance[plan.seed] = plan.seed_var;
  for (std::size_t n = std::max<std::size_t>(plan.seed + 1, 2); n <= n_max; ++n) {
    const auto q = split_distribution_exact(n);
    Rational m = 0;
    Rational v = 0;
    for (std::size_t i = 1; i < n; ++i) {
      m += q[i - 1] * (t.mean[i] + t.mean[n - i]);
      v += q[i - 1] * (t.variance[i] + t.variance[n - i]);
    }
    for (std::size_t i = 1; i < n; ++i) {
      const Rational d = t.mean[i] + t.mean[n - i] - m;
      v += q[i - 1] * d * d;
    }
    if (plan.has_bias) {
      const Rational inv = 1 / harmonic_exact(n - 1);
      m += inv;
      v += inv * inv;
    }
    m.canonicalize();
    v.canonicalize();
    t.mean[n] = m;
    t.variance[n] = v;
  }
  return t;
}

void check_shape(const CladeKey& shape) {
  if (shape.size() > kMaxShapeCap)
    throw std::invalid_argument("moments: shapes are limited to " + std::to_string(kMaxShapeCap) +
                                " leaves");
}

}  // namespace

MomentTable dp_moments_count(std::size_t k, std::size_t n_max) {
  if (k < 1) throw std::invalid_argument("moments: k must be >= 1");
  return run_dp(Statistic::count(k).label(), n_max, DpPlan<double>{k, 1.0, 0.0, false});
}

ExactMomentTable dp_moments_count_exact(std::size_t k, std::size_t n_max) {
  if (k < 1) throw std::invalid_argument("moments: k must be >= 1");
  return run_dp_exact(Statistic::count(k).label(), n_max,
                      DpPlan<Rational>{k, Rational(1), Rational(0), false});
}

MomentTable dp_moments_shape(const CladeKey& shape, std::size_t n_max, ShapeOrder order) {
  check_shape(shape);
  const double p = shape_probability(shape, order);
  return run_dp(Statistic::of_shape(shape).label(), n_max,
                DpPlan<double>{shape.size(), p, p * (1.0 - p), false});
}

ExactMomentTable dp_moments_shape_exact(const CladeKey& shape, std::size_t n_max,
                                        ShapeOrder order) {
  check_shape(shape);
  const Rational p = shape_probability_exact(shape, order);
  Rational var = p * (1 - p);
  var.canonicalize();
  return run_dp_exact(Statistic::of_shape(shape).label(), n_max,
                      DpPlan<Rational>{shape.size(), p, var, false});
}

MomentTable dp_moments_length(std::size_t n_max) {
  return run_dp(Statistic::length().label(), n_max, DpPlan<double>{1, 0.0, 0.0, true});
}

ExactMomentTable dp_moments_length_exact(std::size_t n_max) {
  return run_dp_exact(Statistic::length().label(), n_max,
                      DpPlan<Rational>{1, Rational(0), Rational(0), true});
}

MomentTable dp_moments(const Statistic& statistic, std::size_t n_max, ShapeOrder order) {
  switch (statistic.kind) {
    case Statistic::Kind::count:
      return dp_moments_count(statistic.k, n_max);
    case Statistic::Kind::shape:
      return dp_moments_shape(statistic.shape.value(), n_max, order);
    case Statistic::Kind::length:
      return dp_moments_length(n_max);
  }
  throw std::logic_error("moments: unknown statistic");
}

Rational shape_probability_exact(const CladeKey& shape, ShapeOrder order) {
  if (shape.is_leaf()) return Rational(1);
  const auto [a, b] = shape.children();
  const std::size_t m = shape.size();
  const auto q = split_distribution_exact(m);
  // An unordered shape with distinct children arises from either child order.
  Rational factor = q[a.size() - 1];
  if (order == ShapeOrder::unordered && !(a == b)) factor += q[b.size() - 1];
  Rational p = factor * shape_probability_exact(a, order) * shape_probability_exact(b, order);
  p.canonicalize();
  return p;
}

double shape_probability(const CladeKey& shape, ShapeOrder order) {
  return to_double(shape_probability_exact(shape, order));
}

std::vector<double> split_mean_sources(const std::vector<double>& mean) {
  const std::size_t n_max = mean.empty() ? 0 : mean.size() - 1;
  std::vector<double> eps(mean.size(), 0.0);
  for (std::size_t n = 2; n <= n_max; ++n) {
    const auto dist = split_distribution(n, SplitFamily::critical());
    CompensatedSum m;
    for (std::size_t i = 1; i < n; ++i) m += dist.probabilities[i - 1] * (mean[i] + mean[n - i]);
    CompensatedSum s;
    for (std::size_t i = 1; i < n; ++i) {
      const double d = mean[i] + mean[n - i] - m.value();
      s += dist.probabilities[i - 1] * d * d;
    }
    eps[n] = s.value() / static_cast<double>(n);
  }
  return eps;
}

std::vector<double> superpose_sources(const std::vector<double>& sources) {
  std::vector<double> total(sources.size(), 0.0);
  if (sources.empty()) return total;
  const std::size_t n_max = sources.size() - 1;
  const auto kernel = DescentKernel::harmonic();
  for (std::size_t m = 1; m <= n_max; ++m) {
    if (sources[m] == 0.0) continue;
    if (sources[m] < 0.0) throw std::invalid_argument("superpose: negative source");
    const Sequence seq = evaluate_sequence(kernel, m, sources[m], n_max);
    for (std::size_t n = m; n <= n_max; ++n) total[n] += seq[n];
  }
  return total;
}

DecompositionReport variance_decomposition_check(std::size_t k, std::size_t n_max) {
  if (n_max > 4000)
    throw ResourceError("variance decomposition: n_max above 4000 (cubic cost)");
  const MomentTable table = dp_moments_count(k, n_max);
  std::vector<double> v(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) v[n] = table.normalized_variance(n);

  // Sizes up to k are fixed by the seed (variance zero), so only the split
  // means above k feed the variance.
  std::vector<double> sources = split_mean_sources(table.mean);
  for (std::size_t n = 0; n <= std::min(k, n_max); ++n) sources[n] = 0.0;

  DecompositionReport r;
  r.k = k;
  r.n_max = n_max;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (v[n] > 0.0 && r.seed_index == 0) r.seed_index = n;
    if (sources[n] > 0.0) ++r.sources;
  }
  const std::vector<double> rebuilt = superpose_sources(sources);
  for (std::size_t n = 1; n <= n_max; ++n)
    r.max_abs_error = std::max(r.max_abs_error, std::abs(rebuilt[n] - v[n]));
  r.passed = std::isfinite(r.max_abs_error) && r.max_abs_error < r.tolerance;
  return r;
}

bool variance_decomposition_exact(std::size_t k, std::size_t n_max) {
  const ExactMomentTable table = dp_moments_count_exact(k, n_max);
  std::vector<Rational> total(n_max + 1, Rational(0));
  for (std::size_t m = k + 1; m <= n_max; ++m) {
    const auto q = split_distribution_exact(m);
    Rational mean = 0;
    for (std::size_t i = 1; i < m; ++i) mean += q[i - 1] * (table.mean[i] + table.mean[m - i]);
    Rational eps = 0;
    for (std::size_t i = 1; i < m; ++i) {
      const Rational d = table.mean[i] + table.mean[m - i] - mean;
      eps += q[i - 1] * d * d;
    }
    eps /= static_cast<unsigned long>(m);
    eps.canonicalize();
    if (eps == 0) continue;
    const auto part = evaluate_sequence_exact(m, eps, n_max);
    for (std::size_t n = m; n <= n_max; ++n) total[n] += part[n];
  }
  for (std::size_t n = 1; n <= n_max; ++n) {
    Rational v = table.variance[n] / static_cast<unsigned long>(n);
    v.canonicalize();
    total[n].canonicalize();
    if (total[n] != v) return false;
  }
  return true;
}

StabilityReport error_stability(const std::vector<double>& error, double power, std::size_t n_lo,
                                std::size_t n_hi, double max_growth) {
  if (n_lo < 1 || n_hi <= n_lo || n_hi >= error.size())
    throw std::invalid_argument("stability: bad window");
  StabilityReport r;
  r.n_lo = n_lo;
  r.n_hi = n_hi;
  r.max_growth = max_growth;
  const double split = std::sqrt(static_cast<double>(n_lo) * static_cast<double>(n_hi));
  bool finite = true;
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    const double s = std::abs(error[n]) * std::pow(static_cast<double>(n), power);
    if (!std::isfinite(s)) finite = false;
    double& slot = static_cast<double>(n) < split ? r.head_max : r.tail_max;
    slot = std::max(slot, s);
  }
  r.passed = finite && r.tail_max <= max_growth * r.head_max;
  return r;
}

void write_moments_csv(std::ostream& os, const MomentTable& table) {
  const auto old = os.precision(17);
  os << "n,mean,variance,E_n,V_n\n";
  for (std::size_t n = 1; n <= table.n_max; ++n)
    os << n << ',' << table.mean[n] << ',' << table.variance[n] << ','
       << table.normalized_mean(n) << ',' << table.normalized_variance(n) << '\n';
  os.precision(old);
}

}  // namespace hdc
