#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace hdc {

enum class ExponentMethod { series, digamma };

std::string to_string(ExponentMethod method);
ExponentMethod parse_exponent_method(const std::string& text);

inline constexpr std::size_t kDefaultTruncation = 10'000'000;

/// R(gamma) = sum_{i>=1} (1/i - i/((i+1)(i+1-gamma))) for 1 < gamma < 2,
/// summed to `truncation` terms plus an Euler-Maclaurin tail correction.
double residual(double gamma, std::size_t truncation = kDefaultTruncation);

/// Closed form of the same series: 1/gamma + ((gamma-1)/gamma)(psi(2-gamma) + euler_gamma).
double residual_digamma(double gamma);

struct ExponentResult {
  double gamma_star = 0.0;
  double residual_at_root = 0.0;
  ExponentMethod method = ExponentMethod::series;
  std::optional<std::size_t> truncation;
  double bracket_lo = 1.5;
  double bracket_hi = 2.0;
  int iterations = 0;
};

/// Bisection for the unique root of R on (1.5, 2). The returned value is
/// within `tol` of the root of the evaluated residual.
ExponentResult solve_gamma_star(double tol, ExponentMethod method = ExponentMethod::series,
                                std::size_t truncation = kDefaultTruncation);

/// S(gamma) = sum_{i>=1} (1/i - i/((i+1)(i+2-gamma))) = R(gamma - 1), 2 < gamma < 3.
double em_limit(double gamma, std::size_t truncation = kDefaultTruncation);

struct EmRemainder {
  double gamma = 0.0;
  std::size_t k = 0;
  std::size_t n = 0;
  double j_n = 0.0;
  double limit = 0.0;
  /// j_n - limit.
  double gap = 0.0;
};

/// j_n = h_n - sum_{i=k}^{n-1} (u - log(1+u)) (n/i)^gamma / n with u = (i/n)/(1-i/n).
EmRemainder em_remainder(double gamma, std::size_t k, std::size_t n,
                         std::size_t truncation = kDefaultTruncation);

/// g(x) = 1/(1-x) - x^{1-gamma}/(1-x) - x^{-gamma} log(1-x), 0 < x < 1.
double g_function(double gamma, double x);
/// g'(x) = (-(gamma+1)x^{1-gamma} + 1 + gamma x^{-gamma})/(1-x)^2 + gamma x^{-gamma-1} log(1-x).
double g_prime(double gamma, double x);

struct GPrimeScan {
  double minimum = 0.0;
  double argmin = 0.0;
  std::size_t grid_points = 0;
};

/// Minimum of g' over x = j/(G+1), j = 1..G.
GPrimeScan g_prime_scan(double gamma, std::size_t grid_points);
double g_prime_min(double gamma, std::size_t grid_points);

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of log y on log n. All y must be positive.
PowerFit fit_exponent(std::span<const double> n, std::span<const double> y);

}  // namespace hdc
