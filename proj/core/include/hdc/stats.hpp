#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace hdc {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  /// Unbiased sample variance.
  double variance = 0.0;
  double stderr_mean = 0.0;
  /// Large-sample s.e. of the sample variance from the fourth central moment.
  double stderr_variance = 0.0;
};

/// Requires at least two samples.
Summary summarize(std::span<const double> samples);

/// Sample moments against reference values, in units of standard errors.
struct MomentAgreement {
  double mean_z = 0.0;
  double variance_z = 0.0;
  double limit = 3.0;
  bool passed = false;
};

MomentAgreement compare_moments(const Summary& s, double mean, double variance,
                                 double limit = 3.0);

enum class StandardizationSource { dp_exact, sample };
std::string to_string(StandardizationSource source);

/// KS pass thresholds at R = 5000: asymptotic 1% critical value plus an
/// allowance for lattice steps and finite-n bias.
inline constexpr double kKsThresholdContinuous = 0.03;
inline constexpr double kKsThresholdLattice = 0.035;

struct NormalityReport {
  std::size_t sample_count = 0;
  double mean_used = 0.0;
  double sd_used = 0.0;
  StandardizationSource source = StandardizationSource::dp_exact;
  double ks_distance = 0.0;
  double pass_threshold = kKsThresholdContinuous;
  bool passed = false;
};

double normal_cdf(double z);

/// One-sample KS distance of (x - mean) / sd against the standard normal.
/// Ties are handled exactly, so lattice data is fine.
NormalityReport ks_normal(std::span<const double> samples, double mean, double sd,
                          double threshold = kKsThresholdContinuous,
                          StandardizationSource source = StandardizationSource::dp_exact);

/// f(k) = coefficient * k^exponent with exponent < 0.
struct PowerFunction {
  double coefficient = 1.0;
  double exponent = -1.0;
  double operator()(double k) const;
};

/// Parses "pow:<e>" or "pow:<e>:<coefficient>"; "zero" is the null function.
PowerFunction parse_power_function(const std::string& text);

struct AnsatzResult {
  std::size_t n = 0;
  double finite_sum = 0.0;
  double limit_sum = 0.0;
  double gap = 0.0;
};

inline constexpr std::size_t kAnsatzTruncation = 1'000'000;

/// finite_sum = sum_{k=2}^n a(n,k) f(k); limit_sum = sum_{k>=2} a(k) f(k),
/// summed to 10^6 with an integral estimate of the rest.
AnsatzResult ansatz_sum(std::size_t n, const PowerFunction& f);
double ansatz_limit(const PowerFunction& f);

}  // namespace hdc
