#include "hdc_cli/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "hdc/differences.hpp"
#include "hdc/exponent.hpp"
#include "hdc/kernels.hpp"
#include "hdc/moments.hpp"
#include "hdc/recursion.hpp"
#include "hdc/stats.hpp"
#include "hdc/treesim.hpp"
#include "hdc_cli/acceptance.hpp"

#ifndef HDC_TOOL_VERSION
#define HDC_TOOL_VERSION "0.0.0"
#endif

namespace hdc::cli {
namespace {

using nlohmann::json;

constexpr std::size_t kQuadraticGuard = 100'000;
constexpr std::size_t kExactGuard = 500;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Result {
  json report = json::object();
  std::function<void(std::ostream&)> csv;
  /// Plain-text rendering; defaults to "key: value" lines of the report.
  std::string text;
  bool passed = true;
};

void guard_quadratic(const RunConfig& c, std::size_t n, const char* what) {
  if (n > kQuadraticGuard && !c.allow_large)
    throw ResourceError(std::string(what) + " = " + std::to_string(n) +
                        " exceeds 1e5 for an O(n^2) computation; pass --allow-large to override");
}

void guard_exact(const RunConfig& c, std::size_t n) {
  if (n > kExactGuard && !c.allow_large)
    throw ResourceError("exact rational mode limited to n <= 500; pass --allow-large to override");
}

DescentKernel parse_kernel(const std::string& text) {
  if (text == "harmonic") return DescentKernel::harmonic();
  if (text.rfind("beta:", 0) == 0) {
    std::size_t used = 0;
    const std::string b = text.substr(5);
    const double beta = std::stod(b, &used);
    if (used != b.size()) throw UsageError("bad kernel beta: " + b);
    return DescentKernel::beta(beta);
  }
  throw UsageError("kernel must be 'harmonic' or 'beta:<b>' with b < 0");
}

ShapeOrder parse_order(const std::string& text) {
  if (text == "unordered") return ShapeOrder::unordered;
  if (text == "ordered") return ShapeOrder::ordered;
  throw UsageError("order must be 'unordered' or 'ordered'");
}

double xk_value(const RunConfig& c) { return to_double(parse_rational(c.xk)); }

json rational_json(const Rational& q) { return to_string(q); }

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string plain(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// ---------------------------------------------------------------- exponent

Result cmd_gamma_star(const RunConfig& c) {
  const ExponentMethod method = parse_exponent_method(c.method);
  const ExponentResult r = solve_gamma_star(c.tol, method, c.truncation);
  Result out;
  out.report = {{"gamma_star", r.gamma_star},
                {"residual_at_root", r.residual_at_root},
                {"method", to_string(r.method)},
                {"truncation", r.truncation ? json(*r.truncation) : json(nullptr)},
                {"bracket_lo", r.bracket_lo},
                {"bracket_hi", r.bracket_hi},
                {"iterations", r.iterations},
                {"tol", c.tol}};
  const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(c.tol))), 1, 16);
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << r.gamma_star << '\n';
  out.text = os.str();
  return out;
}

Result cmd_em_check(const RunConfig& c) {
  const EmRemainder r = em_remainder(c.gamma, c.k, c.n, c.truncation);
  Result out;
  out.report = {{"gamma", r.gamma}, {"k", r.k},         {"n", r.n},
                {"j_n", r.j_n},     {"limit", r.limit}, {"gap", r.gap}};
  return out;
}

Result cmd_gprime_check(const RunConfig& c) {
  std::vector<double> gammas = c.gammas;
  if (gammas.empty()) gammas = {2.01, 2.25, 2.5, 2.75, 2.99};
  Result out;
  json rows = json::array();
  for (double g : gammas) {
    const GPrimeScan s = g_prime_scan(g, c.grid);
    const bool positive = s.minimum > 0.0;
    out.passed = out.passed && positive;
    rows.push_back({{"gamma", g},
                    {"min_g_prime", s.minimum},
                    {"argmin", s.argmin},
                    {"grid_points", s.grid_points},
                    {"positive", positive}});
  }
  out.report = {{"scans", rows}, {"all_positive", out.passed}};
  out.csv = [rows](std::ostream& os) {
    os.precision(17);
    os << "gamma,min_g_prime,argmin,grid_points\n";
    for (const auto& r : rows)
      os << r["gamma"].get<double>() << ',' << r["min_g_prime"].get<double>() << ','
         << r["argmin"].get<double>() << ',' << r["grid_points"].get<std::size_t>() << '\n';
  };
  return out;
}

Result cmd_rate_fit(const RunConfig& c) {
  if (c.n_lo <= c.k || c.n_hi <= c.n_lo) throw UsageError("need k < n-lo < n-hi");
  if (c.points < 3) throw UsageError("need at least 3 points");
  guard_quadratic(c, c.n_hi, "n-hi");
  const Sequence seq = evaluate_sequence(DescentKernel::harmonic(), c.k, xk_value(c), c.n_hi);
  const double limit = seq.limit.value();
  std::vector<double> ns;
  std::vector<double> ys;
  const double lo = std::log(static_cast<double>(c.n_lo));
  const double hi = std::log(static_cast<double>(c.n_hi));
  std::size_t last = 0;
  for (std::size_t j = 0; j < c.points; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(c.points - 1);
    const auto n = static_cast<std::size_t>(std::llround(std::exp(lo + (hi - lo) * t)));
    if (n == last) continue;
    last = n;
    ns.push_back(static_cast<double>(n));
    ys.push_back(seq[n] - limit);
  }
  const PowerFit fit = fit_exponent(ns, ys);
  const double g = solve_gamma_star(1e-12, ExponentMethod::digamma).gamma_star;
  Result out;
  out.passed = fit.slope >= -g - 0.15 && fit.slope <= -g + 0.10;
  out.report = {{"k", c.k},
                {"x_k", xk_value(c)},
                {"limit", limit},
                {"n_lo", c.n_lo},
                {"n_hi", c.n_hi},
                {"points", fit.points},
                {"slope", fit.slope},
                {"stderr_slope", fit.stderr_slope},
                {"intercept", fit.intercept},
                {"predicted_slope", -g},
                {"band", {-g - 0.15, -g + 0.10}},
                {"in_band", out.passed}};
  out.csv = [ns, ys](std::ostream& os) {
    os.precision(17);
    os << "n,x_n_minus_x\n";
    for (std::size_t j = 0; j < ns.size(); ++j) os << ns[j] << ',' << ys[j] << '\n';
  };
  return out;
}

// --------------------------------------------------------------- recursion

Result cmd_sequence(const RunConfig& c) {
  Result out;
  if (c.exact) {
    if (c.kernel != "harmonic") throw UsageError("exact mode supports the harmonic kernel only");
    guard_exact(c, c.n_max);
    const Rational x_k = parse_rational(c.xk);
    const auto values = evaluate_sequence_exact(c.k, x_k, c.n_max);
    json rows = json::array();
    for (std::size_t n = c.k; n <= c.n_max; ++n)
      rows.push_back({{"n", n}, {"x_n", rational_json(values[n])}, {"x_n_float", to_double(values[n])}});
    out.report = {{"k", c.k}, {"x_k", rational_json(x_k)}, {"n_max", c.n_max}, {"values", rows}};
    out.csv = [values, k = c.k](std::ostream& os) {
      os.precision(17);
      os << "n,x_n,x_n_float\n";
      for (std::size_t n = k; n < values.size(); ++n)
        os << n << ',' << to_string(values[n]) << ',' << to_double(values[n]) << '\n';
    };
    return out;
  }
  guard_quadratic(c, c.n_max, "n-max");
  const Sequence seq = evaluate_sequence(parse_kernel(c.kernel), c.k, xk_value(c), c.n_max);
  out.report = {{"k", c.k}, {"x_k", xk_value(c)}, {"n_max", c.n_max}, {"kernel", seq.kernel.name()},
                {"limit", seq.limit ? json(*seq.limit) : json(nullptr)}, {"values", seq.values}};
  if (seq.limit && c.n_max > c.k) {
    const LongTermBoundReport lt = verify_longterm_bound(seq);
    out.report["longterm_bound"] = {{"constant", lt.constant},
                                    {"head_constant", lt.head_constant},
                                    {"tail_constant", lt.tail_constant},
                                    {"ceiling", lt.ceiling},
                                    {"passed", lt.passed}};
  }
  out.csv = [seq](std::ostream& os) { write_sequence_csv(os, seq); };
  return out;
}

Result cmd_occupation(const RunConfig& c) {
  guard_quadratic(c, c.n, "n");
  const OccupationVector occ = occupation_vector(c.n);
  double worst = 0.0;
  for (std::size_t k = 2; k <= c.n; ++k)
    worst = std::max(worst, std::abs(occ.a[k] - occupation_limit(k)));
  Result out;
  out.report = {{"n", c.n}, {"a_n_1", occ.a[1]}, {"max_abs_a_n_k_minus_a_k", worst}};
  out.csv = [occ](std::ostream& os) {
    const auto old = os.precision(17);
    os << "k,a_n_k,a_k\n";
    for (std::size_t k = 1; k <= occ.n; ++k)
      os << k << ',' << occ.a[k] << ',' << (k == 1 ? 1.0 : occupation_limit(k)) << '\n';
    os.precision(old);
  };
  return out;
}

Result cmd_monotone_check(const RunConfig& c) {
  if (c.k_min < 2 || c.k_max < c.k_min) throw UsageError("need 2 <= k-min <= k-max");
  guard_quadratic(c, c.n_float, "n-float");
  const DescentKernel kernel = parse_kernel(c.kernel);
  const bool harmonic_kernel = kernel.kind() == DescentKernel::Kind::harmonic;
  if (harmonic_kernel) guard_exact(c, c.n_exact);
  Result out;
  json rows = json::array();
  for (std::size_t k = c.k_min; k <= c.k_max; ++k) {
    json row = {{"k", k}};
    if (harmonic_kernel && c.n_exact > k) {
      const auto exact = evaluate_sequence_exact(k, Rational(1), c.n_exact);
      json first = nullptr;
      for (std::size_t n = k; n < c.n_exact && first.is_null(); ++n)
        if (!(exact[n + 1] < exact[n])) first = n;
      row["exact_strict"] = first.is_null();
      row["exact_first_failure"] = first;
      out.passed = out.passed && first.is_null();
    }
    if (c.n_float > k) {
      const Sequence seq = evaluate_sequence(kernel, k, 1.0, c.n_float);
      json first = nullptr;
      for (std::size_t n = k; n < c.n_float && first.is_null(); ++n)
        if (!(seq[n + 1] < seq[n])) first = n;
      row["float_strict"] = first.is_null();
      row["float_first_failure"] = first;
      out.passed = out.passed && first.is_null();
    }
    rows.push_back(row);
  }
  out.report = {{"kernel", kernel.name()},
                {"n_exact", harmonic_kernel ? json(c.n_exact) : json(nullptr)},
                {"n_float", c.n_float},
                {"rows", rows}};
  if (c.n_float >= 3) {
    const RatioConditionReport ratio = ratio_condition_check(kernel, std::min<std::size_t>(c.n_float, 2000));
    out.report["ratio_condition"] = {{"passed", ratio.passed},
                                     {"strict", ratio.strict},
                                     {"rows_checked", ratio.rows_checked}};
    out.passed = out.passed && ratio.passed;
  }
  out.report["passed"] = out.passed;
  return out;
}

// ------------------------------------------------------------- differences

Result cmd_differences(const RunConfig& c) {
  Result out;
  if (c.exact) {
    guard_exact(c, c.n_max);
    const Rational x_k = parse_rational(c.xk);
    const auto d = d_sequence_exact(c.k, x_k, c.n_max);
    json rows = json::array();
    for (std::size_t n = c.k; n < d.size(); ++n)
      rows.push_back({{"n", n}, {"d_n", rational_json(d[n])}, {"d_n_float", to_double(d[n])}});
    out.report = {{"k", c.k}, {"x_k", rational_json(x_k)}, {"values", rows}};
    out.csv = [d, k = c.k](std::ostream& os) {
      os.precision(17);
      os << "n,d_n,d_n_float\n";
      for (std::size_t n = k; n < d.size(); ++n)
        os << n << ',' << to_string(d[n]) << ',' << to_double(d[n]) << '\n';
    };
    return out;
  }
  guard_quadratic(c, c.n_max, "n-max");
  const DifferenceSequence d = d_sequence(c.k, xk_value(c), c.n_max);
  out.report = {{"k", c.k}, {"x_k", xk_value(c)}, {"n_max", c.n_max}, {"d", d.d}};
  if (c.check_direct) {
    const auto direct = direct_differences(c.k, xk_value(c), c.n_max);
    double worst = 0.0;
    for (std::size_t j = 0; j < direct.size(); ++j)
      worst = std::max(worst, std::abs(d.d[j] - direct[j]) / std::abs(direct[j]));
    out.report["max_rel_vs_direct"] = worst;
    out.passed = worst < 1e-9;
  }
  out.csv = [d](std::ostream& os) { write_differences_csv(os, d); };
  return out;
}

// --------------------------------------------------------- treesim / stats

Statistic parse_stat(const RunConfig& c) {
  try {
    return parse_statistic(c.stat, parse_order(c.order));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

json batch_json(const SimBatch& b) {
  return {{"n", b.n},
          {"statistic", b.statistic.label()},
          {"replicas", b.replicas},
          {"base_seed", b.base_seed},
          {"generator_id", b.generator_id},
          {"family", b.family},
          {"shape_order", b.shape_order}};
}

Result cmd_simulate(const RunConfig& c) {
  const Statistic stat = parse_stat(c);
  BatchOptions opt;
  opt.family = parse_split_family(c.beta);
  opt.order = parse_order(c.order);
  opt.threads = c.threads;
  opt.allow_large = c.allow_large;
  const SimBatch batch = run_batch(c.n, stat, c.replicas, c.seed.value(), opt);
  Result out;
  out.report = batch_json(batch);
  if (batch.replicas >= 2) {
    const Summary s = summarize(batch.samples);
    out.report["summary"] = {{"mean", s.mean},
                             {"variance", s.variance},
                             {"stderr_mean", s.stderr_mean},
                             {"stderr_variance", s.stderr_variance}};
  }
  if (c.format == "json") out.report["samples"] = batch.samples;
  out.csv = [batch](std::ostream& os) { write_batch_csv(os, batch); };
  return out;
}

Result cmd_clt_check(const RunConfig& c) {
  const Statistic stat = parse_stat(c);
  BatchOptions opt;
  opt.family = parse_split_family(c.beta);
  opt.order = parse_order(c.order);
  opt.threads = c.threads;
  opt.allow_large = c.allow_large;
  if (c.replicas < 2) throw UsageError("clt-check needs at least 2 replicas");
  const SimBatch batch = run_batch(c.n, stat, c.replicas, c.seed.value(), opt);

  // Exact DP moments exist only for the critical family.
  StandardizationSource source = c.standardize == "sample" ? StandardizationSource::sample
                                                           : StandardizationSource::dp_exact;
  if (c.standardize != "sample" && c.standardize != "dp-exact")
    throw UsageError("standardize must be 'dp-exact' or 'sample'");
  std::string note;
  if (source == StandardizationSource::dp_exact && !opt.family.is_critical()) {
    source = StandardizationSource::sample;
    note = "dp-exact moments need the critical family; fell back to sample moments";
  }
  double mean = 0.0;
  double sd = 0.0;
  if (source == StandardizationSource::dp_exact) {
    guard_quadratic(c, c.n, "n");
    const MomentTable dp = dp_moments(stat, c.n, opt.order);
    mean = dp.mean[c.n];
    sd = std::sqrt(dp.variance[c.n]);
  } else {
    const Summary s = summarize(batch.samples);
    mean = s.mean;
    sd = std::sqrt(s.variance);
  }
  const double threshold = c.threshold.value_or(
      stat.kind == Statistic::Kind::length ? kKsThresholdContinuous : kKsThresholdLattice);
  const NormalityReport r = ks_normal(batch.samples, mean, sd, threshold, source);
  Result out;
  out.passed = r.passed;
  out.report = batch_json(batch);
  out.report["normality"] = {{"sample_count", r.sample_count},
                             {"mean_used", r.mean_used},
                             {"sd_used", r.sd_used},
                             {"source", to_string(r.source)},
                             {"ks_distance", r.ks_distance},
                             {"pass_threshold", r.pass_threshold},
                             {"verdict", r.passed ? "pass" : "fail"}};
  out.report["threshold_rule"] =
      "1.63/sqrt(R) asymptotic 1% KS level plus allowance for lattice steps and finite n: "
      "0.03 continuous, 0.035 integer-valued";
  out.report["scope"] =
      "empirical check of asymptotic normality at finite n; the moment hypotheses of the limit "
      "theorem are not verified";
  if (!note.empty()) out.report["note"] = note;
  return out;
}

Result cmd_dp_moments(const RunConfig& c) {
  const Statistic stat = parse_stat(c);
  const ShapeOrder order = parse_order(c.order);
  Result out;
  if (c.exact) {
    guard_exact(c, c.n_max);
    ExactMomentTable t;
    switch (stat.kind) {
      case Statistic::Kind::count: t = dp_moments_count_exact(stat.k, c.n_max); break;
      case Statistic::Kind::shape: t = dp_moments_shape_exact(*stat.shape, c.n_max, order); break;
      case Statistic::Kind::length: t = dp_moments_length_exact(c.n_max); break;
    }
    json rows = json::array();
    for (std::size_t n = 1; n <= t.n_max; ++n)
      rows.push_back({{"n", n}, {"mean", rational_json(t.mean[n])},
                      {"variance", rational_json(t.variance[n])}});
    out.report = {{"statistic", t.statistic}, {"n_max", t.n_max}, {"rows", rows}};
    out.csv = [t](std::ostream& os) {
      os << "n,mean,variance\n";
      for (std::size_t n = 1; n <= t.n_max; ++n)
        os << n << ',' << to_string(t.mean[n]) << ',' << to_string(t.variance[n]) << '\n';
    };
    return out;
  }
  guard_quadratic(c, c.n_max, "n-max");
  const MomentTable t = dp_moments(stat, c.n_max, order);
  out.report = {{"statistic", t.statistic},
                {"n_max", t.n_max},
                {"mean_at_n_max", t.mean[t.n_max]},
                {"variance_at_n_max", t.variance[t.n_max]},
                {"E_n_max", t.normalized_mean(t.n_max)},
                {"V_n_max", t.normalized_variance(t.n_max)}};
  if (c.format == "json") {
    out.report["mean"] = t.mean;
    out.report["variance"] = t.variance;
  }
  out.csv = [t](std::ostream& os) { write_moments_csv(os, t); };
  return out;
}

Result cmd_ansatz(const RunConfig& c) {
  PowerFunction f;
  try {
    f = parse_power_function(c.f);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::vector<std::size_t> ns = c.ns;
  if (ns.empty()) ns = {c.n};
  for (std::size_t n : ns) guard_quadratic(c, n, "n");
  json rows = json::array();
  std::vector<double> gaps;
  for (std::size_t n : ns) {
    const AnsatzResult r = ansatz_sum(n, f);
    gaps.push_back(r.gap);
    rows.push_back({{"n", r.n}, {"finite_sum", r.finite_sum}, {"limit_sum", r.limit_sum},
                    {"gap", r.gap}});
  }
  bool decreasing = true;
  for (std::size_t j = 1; j < gaps.size(); ++j) decreasing = decreasing && gaps[j] < gaps[j - 1];
  Result out;
  out.report = {{"f", c.f},
                {"exponent", f.exponent},
                {"coefficient", f.coefficient},
                {"limit_truncation", kAnsatzTruncation},
                {"rows", rows},
                {"gaps_decreasing", decreasing}};
  out.csv = [rows](std::ostream& os) {
    os.precision(17);
    os << "n,finite_sum,limit_sum,gap\n";
    for (const auto& r : rows)
      os << r["n"].get<std::size_t>() << ',' << r["finite_sum"].get<double>() << ','
         << r["limit_sum"].get<double>() << ',' << r["gap"].get<double>() << '\n';
  };
  return out;
}

Result cmd_verify_all(const RunConfig& c) {
  std::vector<int> ids = c.only.empty() ? criterion_ids() : c.only;
  for (int id : ids) {
    const auto all = criterion_ids();
    if (std::find(all.begin(), all.end(), id) == all.end())
      throw UsageError("no acceptance criterion " + std::to_string(id));
  }
  Result out;
  json rows = json::array();
  std::ostringstream text;
  std::size_t failed = 0;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, c.threads);
    print_result(text, r);
    if (!r.passed) ++failed;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed},
                    {"detail", r.detail}, {"seconds", r.seconds}});
  }
  text << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed")
       << '\n';
  out.passed = failed == 0;
  out.text = text.str();
  out.report = {{"criteria", rows}, {"failed", failed}};
  return out;
}

// ------------------------------------------------------------------ output

struct Command {
  Result (*handler)(const RunConfig&);
  const char* default_format;
  bool has_csv;
};

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"gamma-star", {cmd_gamma_star, "text", false}},
      {"sequence", {cmd_sequence, "csv", true}},
      {"differences", {cmd_differences, "csv", true}},
      {"occupation", {cmd_occupation, "csv", true}},
      {"rate-fit", {cmd_rate_fit, "json", true}},
      {"em-check", {cmd_em_check, "json", false}},
      {"gprime-check", {cmd_gprime_check, "json", true}},
      {"monotone-check", {cmd_monotone_check, "json", false}},
      {"simulate", {cmd_simulate, "csv", true}},
      {"clt-check", {cmd_clt_check, "json", false}},
      {"dp-moments", {cmd_dp_moments, "csv", true}},
      {"ansatz", {cmd_ansatz, "json", true}},
      {"verify-all", {cmd_verify_all, "text", false}},
  };
  return table;
}

std::string render_text(const Result& r) {
  if (!r.text.empty()) return r.text;
  std::string s;
  for (const auto& [key, value] : r.report.items()) s += key + ": " + plain(value) + '\n';
  return s;
}

std::filesystem::path resolve_path(const RunConfig& c) {
  std::filesystem::path p(c.out);
  if (p.is_relative() && !c.out_dir.empty()) p = std::filesystem::path(c.out_dir) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p;
}

void emit(const RunConfig& c, const std::string& format, const Result& r, std::ostream& out,
          std::ostream& err) {
  json doc = {{"metadata", metadata(c)}, {"report", r.report}};
  auto write_body = [&](std::ostream& os) {
    if (format == "json") {
      os << doc.dump(2) << '\n';
    } else if (format == "csv") {
      r.csv(os);
    } else {
      os << render_text(r);
    }
  };
  if (c.out.empty()) {
    write_body(out);
    if (format != "json" && !c.quiet) err << doc.dump() << '\n';
    return;
  }
  const auto path = resolve_path(c);
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path.string());
  file.imbue(std::locale::classic());
  write_body(file);
  if (format != "json") {
    std::ofstream meta(path.string() + ".meta.json");
    meta << doc.dump(2) << '\n';
  }
  if (!c.quiet) err << "wrote " << path.string() << '\n';
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto fail = [&]() -> Rational { throw UsageError("not a number: '" + text + "'"); };
  if (text.empty()) return fail();
  if (text.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(text, 10) != 0 || q.get_den() == 0) return fail();
    q.canonicalize();
    return q;
  }
  // sign, digits[.digits][e[sign]digits]
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  for (; pos < text.size() && text[pos] != 'e' && text[pos] != 'E'; ++pos) {
    const char ch = text[pos];
    if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if (ch >= '0' && ch <= '9') {
      digits += ch;
      if (seen_point) --scale;
    } else {
      return fail();
    }
  }
  if (digits.empty()) return fail();
  if (pos < text.size()) {
    const std::string ex = text.substr(pos + 1);
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(ex, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != ex.size() || std::abs(e) > 4000) return fail();
    scale += e;
  }
  Rational q(mpz_class(digits, 10));
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(scale)));
  if (scale >= 0) {
    q *= p10;
  } else {
    q /= p10;
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

json metadata(const RunConfig& config) {
  return {{"tool", "hdc"},
          {"version", HDC_TOOL_VERSION},
          {"generator_id", kGeneratorId},
          {"subcommand", config.subcommand},
          {"config", config.echo},
          {"timestamp", iso_timestamp()}};
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto it = commands().find(config.subcommand);
  if (it == commands().end()) {
    err << "error: unknown subcommand '" << config.subcommand << "'\n";
    return kExitUsage;
  }
  const Command& cmd = it->second;
  const std::string format = config.format.empty() ? cmd.default_format : config.format;
  if (format != "text" && format != "csv" && format != "json") {
    err << "error: format must be text, csv or json\n";
    return kExitUsage;
  }
  if (format == "csv" && !cmd.has_csv) {
    err << "error: " << config.subcommand << " has no csv output; use text or json\n";
    return kExitUsage;
  }
  RunConfig effective = config;
  effective.format = format;
  try {
    out.imbue(std::locale::classic());
    const Result r = cmd.handler(effective);
    emit(effective, format, r, out, err);
    return r.passed ? kExitOk : kExitCheckFailed;
  } catch (const ResourceError& e) {
    err << "error: resource guard: " << e.what() << '\n';
    return kExitResource;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid parameter: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: invalid parameter: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

namespace {

// Output options shared by every subcommand.
void add_output_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--format", c.format, "Output format: text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  sub->add_option("--out", c.out,
                  "Output file (relative to $HDC_OUTPUT_DIR), or csv/json to pick the format");
  sub->add_option("--out-dir", c.out_dir, "Directory for relative --out paths");
  sub->add_flag("--quiet", c.quiet, "Do not print the metadata block on stderr");
}

json echo_options(const CLI::App* sub) {
  json echo = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "format" || name == "out" ||
        name == "out-dir" || name == "quiet")
      continue;
    std::vector<std::string> values = opt->results();
    if (values.empty()) {
      const std::string d = opt->get_default_str();
      if (!d.empty()) values.push_back(d);
      // Flags take no value and have no default string.
      if (d.empty() && opt->get_expected_max() == 0) values.push_back("false");
    }
    auto typed = [](const std::string& s) -> json {
      if (s == "true") return true;
      if (s == "false") return false;
      if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos && s.size() < 20)
        return std::stoull(s);
      char* end = nullptr;
      const double d = std::strtod(s.c_str(), &end);
      if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(d)) return d;
      return s;
    };
    if (values.empty()) {
      echo[name] = nullptr;
    } else if (opt->get_expected_max() > 1) {
      json arr = json::array();
      for (const auto& v : values) arr.push_back(typed(v));
      echo[name] = arr;
    } else {
      echo[name] = typed(values.front());
    }
  }
  return echo;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Numerical lab for the harmonic descent chain and the critical beta-splitting tree"};
  app.set_version_flag("--version", HDC_TOOL_VERSION);
  app.require_subcommand(1);
  RunConfig c;
  if (const char* dir = std::getenv(kOutputDirEnv)) c.out_dir = dir;

  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    add_output_options(s, c);
    return s;
  };
  auto threads = [&](CLI::App* s) {
    s->add_option("--threads", c.threads, "Worker threads, 0 for all cores")->capture_default_str();
  };
  auto allow_large = [&](CLI::App* s) {
    s->add_flag("--allow-large", c.allow_large, "Lift the resource guards");
  };
  auto positive = CLI::PositiveNumber;

  {
    auto* s = sub("gamma-star", "Solve for the rate exponent gamma*");
    s->add_option("--tol", c.tol, "Bisection tolerance (>= 1e-13)")->capture_default_str();
    s->add_option("--method", c.method, "series or digamma")
        ->check(CLI::IsMember({"series", "digamma"}))
        ->capture_default_str();
    s->add_option("--truncation", c.truncation, "Series terms before the tail correction")
        ->capture_default_str();
  }
  {
    auto* s = sub("sequence", "Evaluate x_n = sum p(n,i) x_i");
    s->add_option("--k", c.k, "Start index")->check(positive)->capture_default_str();
    s->add_option("--xk", c.xk, "Start value x_k > 0, decimal or p/q")->capture_default_str();
    s->add_option("--n-max", c.n_max, "Last index")->check(positive)->capture_default_str();
    s->add_option("--kernel", c.kernel, "harmonic or beta:<b> (b < 0)")->capture_default_str();
    s->add_flag("--exact", c.exact, "Rational arithmetic (n-max <= 500)");
    allow_large(s);
  }
  {
    auto* s = sub("differences", "Consecutive differences via the positive-coefficient recursion");
    s->add_option("--k", c.k, "Start index >= 2")->check(CLI::Range(2ul, SIZE_MAX))->capture_default_str();
    s->add_option("--xk", c.xk, "Start value x_k > 0, decimal or p/q")->capture_default_str();
    s->add_option("--n-max", c.n_max, "Differences d_k..d_{n-max - 1}")->capture_default_str();
    s->add_flag("--exact", c.exact, "Rational arithmetic (n-max <= 500)");
    s->add_flag("--check-direct", c.check_direct,
                "Compare with high-precision direct differences")->capture_default_str();
    allow_large(s);
  }
  {
    auto* s = sub("occupation", "Occupation probabilities a(n,k) of the descent chain");
    s->add_option("--n", c.n, "Start state")->check(CLI::Range(2ul, SIZE_MAX))->capture_default_str();
    allow_large(s);
  }
  {
    auto* s = sub("rate-fit", "Log-log slope of x_n - x");
    s->add_option("--k", c.k, "Start index")->check(positive)->capture_default_str();
    s->add_option("--xk", c.xk, "Start value, decimal or p/q")->capture_default_str();
    s->add_option("--n-lo", c.n_lo, "Window start")->capture_default_str();
    s->add_option("--n-hi", c.n_hi, "Window end")->capture_default_str();
    s->add_option("--points", c.points, "Log-spaced fit points")->capture_default_str();
    allow_large(s);
  }
  {
    auto* s = sub("em-check", "Euler-Maclaurin remainder j_n against its limit");
    s->add_option("--gamma", c.gamma, "Exponent in (2, 3)")->capture_default_str();
    s->add_option("--k", c.k, "Lower summation index")->check(positive)->capture_default_str();
    s->add_option("--n", c.n, "Upper index")->capture_default_str();
    s->add_option("--truncation", c.truncation, "Series terms for the limit")->capture_default_str();
  }
  {
    auto* s = sub("gprime-check", "Minimum of g' on a grid in (0, 1)");
    s->add_option("--gamma", c.gammas, "Exponents in (2, 3); default 2.01 2.25 2.5 2.75 2.99");
    s->add_option("--grid", c.grid, "Grid points (>= 100)")->capture_default_str();
  }
  {
    auto* s = sub("monotone-check", "Strict monotonicity of x_n, exact and float");
    s->add_option("--k-min", c.k_min)->capture_default_str();
    s->add_option("--k-max", c.k_max)->capture_default_str();
    s->add_option("--n-exact", c.n_exact, "Rational check up to this n (harmonic only)")
        ->capture_default_str();
    s->add_option("--n-float", c.n_float, "Float check up to this n")->capture_default_str();
    s->add_option("--kernel", c.kernel, "harmonic or beta:<b> (b < 0)")->capture_default_str();
    allow_large(s);
  }
  {
    auto* s = sub("simulate", "Monte Carlo replicas of a tree statistic");
    s->add_option("--n", c.n, "Leaves")->check(positive)->capture_default_str();
    s->add_option("--replicas", c.replicas)->check(positive)->capture_default_str();
    s->add_option("--stat", c.stat, "count:<k>, shape:<key> or length")->capture_default_str();
    s->add_option("--seed", c.seed, "Base seed (required)")->required();
    s->add_option("--beta", c.beta, "critical or a real beta in (-2, 0)")->capture_default_str();
    s->add_option("--order", c.order, "Shape keys: unordered or ordered")->capture_default_str();
    threads(s);
    allow_large(s);
  }
  {
    auto* s = sub("clt-check", "KS distance of standardized replicas from the normal law");
    s->add_option("--n", c.n, "Leaves")->check(positive)->capture_default_str();
    s->add_option("--replicas", c.replicas)->check(positive)->capture_default_str();
    s->add_option("--stat", c.stat, "count:<k>, shape:<key> or length")->capture_default_str();
    s->add_option("--seed", c.seed, "Base seed (required)")->required();
    s->add_option("--beta", c.beta, "critical or a real beta in (-2, 0)")->capture_default_str();
    s->add_option("--order", c.order)->capture_default_str();
    s->add_option("--standardize", c.standardize, "dp-exact or sample")->capture_default_str();
    s->add_option("--threshold", c.threshold, "Override the KS pass threshold");
    threads(s);
    allow_large(s);
  }
  {
    auto* s = sub("dp-moments", "Exact means and variances by dynamic programming");
    s->add_option("--stat", c.stat, "count:<k>, shape:<key> or length")->capture_default_str();
    s->add_option("--n-max", c.n_max)->check(positive)->capture_default_str();
    s->add_option("--order", c.order)->capture_default_str();
    s->add_flag("--exact", c.exact, "Rational arithmetic (n-max <= 500)");
    allow_large(s);
  }
  {
    auto* s = sub("ansatz", "Weighted occupation sums against their limit");
    s->add_option("--n", c.ns, "One or more start states")->check(CLI::Range(2ul, SIZE_MAX));
    s->add_option("--f", c.f, "pow:<e>[:<coef>] with e < 0, or zero")->capture_default_str();
    allow_large(s);
  }
  {
    auto* s = sub("verify-all", "Run the acceptance criteria");
    s->add_option("--only", c.only, "Criterion ids to run");
    threads(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }
  CLI::App* chosen = app.get_subcommands().front();
  c.subcommand = chosen->get_name();
  c.echo = echo_options(chosen);
  if (c.out == "csv" || c.out == "json" || c.out == "text") {
    if (!c.format.empty() && c.format != c.out) {
      std::cerr << "error: --out " << c.out << " conflicts with --format " << c.format << '\n';
      return kExitUsage;
    }
    c.format = c.out;
    c.out.clear();
  }
  return dispatch(c, std::cout, std::cerr);
}

}  // namespace hdc::cli
