#include "hdc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hdc/kernels.hpp"
#include "hdc/numeric.hpp"
#include "hdc/recursion.hpp"

namespace hdc {

Summary summarize(std::span<const double> samples) {
  const std::size_t r = samples.size();
  if (r < 2) throw std::invalid_argument("summarize: need at least two samples");
  const double rd = static_cast<double>(r);
  CompensatedSum total;
  for (double x : samples) total += x;
  const double mean = total.value() / rd;
  CompensatedSum m2;
  CompensatedSum m4;
  for (double x : samples) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  Summary s;
  s.count = r;
  s.mean = mean;
  s.variance = m2.value() / (rd - 1.0);
  s.stderr_mean = std::sqrt(s.variance / rd);
  const double mu4 = m4.value() / rd;
  const double v2 = s.variance * s.variance;
  s.stderr_variance = std::sqrt(std::max(0.0, (mu4 - (rd - 3.0) / (rd - 1.0) * v2) / rd));
  return s;
}

MomentAgreement compare_moments(const Summary& s, double mean, double variance, double limit) {
  auto z = [](double diff, double se) {
    if (se > 0.0) return diff / se;
    return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  };
  MomentAgreement a;
  a.limit = limit;
  a.mean_z = z(s.mean - mean, s.stderr_mean);
  a.variance_z = z(s.variance - variance, s.stderr_variance);
  a.passed = std::abs(a.mean_z) <= limit && std::abs(a.variance_z) <= limit;
  return a;
}

std::string to_string(StandardizationSource source) {
  return source == StandardizationSource::dp_exact ? "dp-exact" : "sample";
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

NormalityReport ks_normal(std::span<const double> samples, double mean, double sd,
                          double threshold, StandardizationSource source) {
  if (!(sd > 0.0) || !std::isfinite(sd)) throw std::invalid_argument("ks_normal: sd must be > 0");
  if (samples.empty()) throw std::invalid_argument("ks_normal: no samples");
  std::vector<double> z(samples.begin(), samples.end());
  for (double& v : z) v = (v - mean) / sd;
  std::sort(z.begin(), z.end());
  const double r = static_cast<double>(z.size());
  double d = 0.0;
  // Over a tie group the maxima land on its first and last members, which
  // matches the step of the empirical CDF there.
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max({d, static_cast<double>(i + 1) / r - f, f - static_cast<double>(i) / r});
  }
  NormalityReport rep;
  rep.sample_count = z.size();
  rep.mean_used = mean;
  rep.sd_used = sd;
  rep.source = source;
  rep.ks_distance = d;
  rep.pass_threshold = threshold;
  rep.passed = d < threshold;
  return rep;
}

double PowerFunction::operator()(double k) const {
  return coefficient == 0.0 ? 0.0 : coefficient * std::pow(k, exponent);
}

PowerFunction parse_power_function(const std::string& text) {
  if (text == "zero") return PowerFunction{0.0, -1.0};
  if (text.rfind("pow:", 0) != 0)
    throw std::invalid_argument("function must be pow:<e>[:<coef>] or zero: " + text);
  const std::string rest = text.substr(4);
  const auto colon = rest.find(':');
  std::size_t used = 0;
  PowerFunction f;
  const std::string e_text = rest.substr(0, colon);
  f.exponent = std::stod(e_text, &used);
  if (used != e_text.size()) throw std::invalid_argument("bad exponent: " + e_text);
  if (colon != std::string::npos) {
    const std::string c_text = rest.substr(colon + 1);
    f.coefficient = std::stod(c_text, &used);
    if (used != c_text.size()) throw std::invalid_argument("bad coefficient: " + c_text);
  }
  if (!(f.exponent < 0.0))
    throw std::domain_error("ansatz: exponent must be negative");
  return f;
}

double ansatz_limit(const PowerFunction& f) {
  if (!(f.exponent < 0.0)) throw std::domain_error("ansatz: exponent must be negative");
  if (f.coefficient == 0.0) return 0.0;
  CompensatedSum sum;
  for (std::size_t k = 2; k <= kAnsatzTruncation; ++k) sum += occupation_limit(k) * f(k);
  // Beyond K, a(k) ~ 6 (log k + gamma_E) / (pi^2 k); integrate from K + 1/2.
  const double s = -f.exponent;
  const double x = static_cast<double>(kAnsatzTruncation) + 0.5;
  const double xs = std::pow(x, -s);
  const double tail = 6.0 / (kPi * kPi) * xs * (std::log(x) / s + 1.0 / (s * s) + kEulerGamma / s);
  sum += f.coefficient * tail;
  return sum.value();
}

AnsatzResult ansatz_sum(std::size_t n, const PowerFunction& f) {
  if (n < 2) throw std::invalid_argument("ansatz: n must be >= 2");
  if (!(f.exponent < 0.0)) throw std::domain_error("ansatz: exponent must be negative");
  AnsatzResult r;
  r.n = n;
  if (f.coefficient != 0.0) {
    const OccupationVector occ = occupation_vector(n);
    CompensatedSum sum;
    for (std::size_t k = 2; k <= n; ++k) sum += occ.a[k] * f(static_cast<double>(k));
    r.finite_sum = sum.value();
  }
  r.limit_sum = ansatz_limit(f);
  r.gap = std::abs(r.finite_sum - r.limit_sum);
  return r;
}

}  // namespace hdc
