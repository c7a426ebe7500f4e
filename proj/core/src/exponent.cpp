#include "hdc/exponent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "hdc/kernels.hpp"
#include "hdc/numeric.hpp"

namespace hdc {

namespace {

constexpr double kBracketLo = 1.5;
constexpr double kBracketHi = 1.999;
constexpr std::size_t kMinTruncation = 1000;

void check_series_domain(double gamma, std::size_t truncation) {
  if (!(gamma > 1.0 && gamma < 2.0)) {
    throw std::domain_error("residual: gamma must lie in (1, 2)");
  }
  if (truncation < kMinTruncation) throw std::domain_error("residual: truncation must be >= 1000");
}

// u - log(1 + u), accurate for small u.
double u_minus_log1p(double u) {
  if (std::abs(u) < 1e-2) {
    // Alternating series u^2/2 - u^3/3 + ...; ten terms reach double precision here.
    double power = u * u;
    double acc = 0.0;
    double sign = 1.0;
    for (int j = 2; j <= 11; ++j) {
      acc += sign * power / j;
      power *= u;
      sign = -sign;
    }
    return acc;
  }
  return u - std::log1p(u);
}

template <typename Residual>
ExponentResult bisect(double tol, Residual&& f) {
  ExponentResult result;
  double lo = kBracketLo;
  double hi = kBracketHi;
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw std::logic_error("gamma* bracket endpoints share a sign; residual evaluation is broken");
  }
  int iterations = 0;
  while (hi - lo > 2.0 * tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }
  result.gamma_star = 0.5 * (lo + hi);
  result.residual_at_root = f(result.gamma_star);
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.iterations = iterations;
  return result;
}

}  // namespace

std::string to_string(ExponentMethod method) {
  return method == ExponentMethod::series ? "series" : "digamma";
}

ExponentMethod parse_exponent_method(const std::string& text) {
  if (text == "series") return ExponentMethod::series;
  if (text == "digamma") return ExponentMethod::digamma;
  throw std::invalid_argument("method must be 'series' or 'digamma', got '" + text + "'");
}

double residual(double gamma, std::size_t truncation) {
  check_series_domain(gamma, truncation);
  const double two_minus = 2.0 - gamma;
  const double one_minus = 1.0 - gamma;
  CompensatedSum acc;
  for (std::size_t i = 1; i <= truncation; ++i) {
    const double id = static_cast<double>(i);
    // 1/i - i/((i+1)(i+1-gamma)) over a common denominator.
    acc.add((id * two_minus + one_minus) / (id * (id + 1.0) * (id + one_minus)));
  }
  // Tail sum_{i>=a} f(i) ~ int_a^inf f + f(a)/2 - f'(a)/12 with
  // f(x) = 1/x - (1/gamma)/(x+1) - ((gamma-1)/gamma)/(x+1-gamma).
  const double a = static_cast<double>(truncation) + 1.0;
  const double w1 = 1.0 / gamma;
  const double w2 = (gamma - 1.0) / gamma;
  const double integral = w1 * std::log1p(1.0 / a) + w2 * std::log1p(one_minus / a);
  const double f_a = (a * two_minus + one_minus) / (a * (a + 1.0) * (a + one_minus));
  const double df_a = -1.0 / (a * a) + w1 / ((a + 1.0) * (a + 1.0)) +
                      w2 / ((a + 1.0 - gamma) * (a + 1.0 - gamma));
  acc.add(integral + 0.5 * f_a - df_a / 12.0);
  return acc.value();
}

double residual_digamma(double gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) {
    throw std::domain_error("residual: gamma must lie in (1, 2)");
  }
  return 1.0 / gamma + ((gamma - 1.0) / gamma) * (boost::math::digamma(2.0 - gamma) + kEulerGamma);
}

ExponentResult solve_gamma_star(double tol, ExponentMethod method, std::size_t truncation) {
  if (!(tol >= 1e-13) || !std::isfinite(tol)) {
    throw std::invalid_argument("gamma*: tolerance must be >= 1e-13");
  }
  ExponentResult result;
  if (method == ExponentMethod::series) {
    check_series_domain(kBracketLo, truncation);
    result = bisect(tol, [truncation](double g) { return residual(g, truncation); });
    result.truncation = truncation;
  } else {
    result = bisect(tol, [](double g) { return residual_digamma(g); });
  }
  result.method = method;
  return result;
}

double em_limit(double gamma, std::size_t truncation) {
  if (!(gamma > 2.0 && gamma < 3.0)) throw std::domain_error("S(gamma): gamma must lie in (2, 3)");
  return residual(gamma - 1.0, truncation);
}

EmRemainder em_remainder(double gamma, std::size_t k, std::size_t n, std::size_t truncation) {
  if (!(gamma > 2.0 && gamma < 3.0)) {
    throw std::domain_error("Euler-Maclaurin check: gamma must lie in (2, 3)");
  }
  if (k < 1 || k >= n) throw std::domain_error("Euler-Maclaurin check: need 1 <= k < n");
  const double nd = static_cast<double>(n);
  CompensatedSum sum;
  for (std::size_t i = k; i < n; ++i) {
    const double id = static_cast<double>(i);
    const double u = id / (nd - id);
    sum.add(u_minus_log1p(u) * std::pow(nd / id, gamma) / nd);
  }
  EmRemainder out;
  out.gamma = gamma;
  out.k = k;
  out.n = n;
  out.j_n = harmonic(n) - sum.value();
  out.limit = em_limit(gamma, truncation);
  out.gap = out.j_n - out.limit;
  return out;
}

double g_function(double gamma, double x) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("g: x must lie in (0, 1)");
  return (1.0 - std::pow(x, 1.0 - gamma)) / (1.0 - x) - std::pow(x, -gamma) * std::log1p(-x);
}

double g_prime(double gamma, double x) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("g': x must lie in (0, 1)");
  // g'(x) x^{gamma+1} (1-x)^2 = -(gamma+1)x^2 + x^{gamma+1} + gamma x + gamma (1-x)^2 log(1-x).
  const double one_minus = 1.0 - x;
  const double numer = -(gamma + 1.0) * x * x + std::pow(x, gamma + 1.0) + gamma * x +
                       gamma * one_minus * one_minus * std::log1p(-x);
  return numer / (std::pow(x, gamma + 1.0) * one_minus * one_minus);
}

GPrimeScan g_prime_scan(double gamma, std::size_t grid_points) {
  if (!(gamma > 2.0 && gamma < 3.0)) throw std::domain_error("g' scan: gamma must lie in (2, 3)");
  if (grid_points < 100) throw std::invalid_argument("g' scan: need at least 100 grid points");
  GPrimeScan scan;
  scan.grid_points = grid_points;
  scan.minimum = std::numeric_limits<double>::infinity();
  const double denom = static_cast<double>(grid_points + 1);
  for (std::size_t j = 1; j <= grid_points; ++j) {
    const double x = static_cast<double>(j) / denom;
    const double v = g_prime(gamma, x);
    if (v < scan.minimum) {
      scan.minimum = v;
      scan.argmin = x;
    }
  }
  return scan;
}

double g_prime_min(double gamma, std::size_t grid_points) {
  return g_prime_scan(gamma, grid_points).minimum;
}

PowerFit fit_exponent(std::span<const double> n, std::span<const double> y) {
  if (n.size() != y.size()) throw std::invalid_argument("rate fit: n and y differ in length");
  if (n.size() < 2) throw std::invalid_argument("rate fit: window needs at least two points");
  const std::size_t count = n.size();
  std::vector<double> lx(count);
  std::vector<double> ly(count);
  CompensatedSum sx;
  CompensatedSum sy;
  for (std::size_t j = 0; j < count; ++j) {
    if (!(n[j] > 0.0)) throw std::domain_error("rate fit: n must be positive");
    if (!(y[j] > 0.0)) {
      throw std::domain_error("rate fit: nonpositive y value (is the limit mis-estimated?)");
    }
    lx[j] = std::log(n[j]);
    ly[j] = std::log(y[j]);
    sx.add(lx[j]);
    sy.add(ly[j]);
  }
  const double cd = static_cast<double>(count);
  const double mx = sx.value() / cd;
  const double my = sy.value() / cd;
  CompensatedSum sxx;
  CompensatedSum sxy;
  for (std::size_t j = 0; j < count; ++j) {
    sxx.add((lx[j] - mx) * (lx[j] - mx));
    sxy.add((lx[j] - mx) * (ly[j] - my));
  }
  if (!(sxx.value() > 0.0)) throw std::invalid_argument("rate fit: window has a single distinct n");
  PowerFit fit;
  fit.points = count;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  if (count > 2) {
    CompensatedSum ssr;
    for (std::size_t j = 0; j < count; ++j) {
      const double r = ly[j] - (fit.intercept + fit.slope * lx[j]);
      ssr.add(r * r);
    }
    fit.stderr_slope = std::sqrt(ssr.value() / (cd - 2.0) / sxx.value());
  }
  return fit;
}

}  // namespace hdc
