#include "hdc/treesim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hdc/numeric.hpp"

namespace hdc {

namespace {

constexpr std::size_t kMaxKeyText = 1 << 16;
// Cached CDF entries for non-critical split laws (about 200 MB of doubles).
constexpr double kSplitTableGuard = 2.5e7;

class KeyParser {
 public:
  KeyParser(std::string_view text, ShapeOrder order) : text_(text), order_(order) {}

  CladeKey run() {
    CladeKey key = parse_node();
    if (pos_ != text_.size()) fail("trailing characters");
    return key;
  }

 private:
  CladeKey parse_node() {
    if (pos_ >= text_.size()) fail("unexpected end of key");
    if (text_[pos_] == '*') {
      ++pos_;
      return CladeKey::leaf();
    }
    expect('(');
    CladeKey left = parse_node();
    expect(',');
    CladeKey right = parse_node();
    expect(')');
    return CladeKey::join(left, right, order_);
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("clade key '" + std::string(text_) + "': " + what + " at offset " +
                                std::to_string(pos_));
  }

  std::string_view text_;
  ShapeOrder order_;
  std::size_t pos_ = 0;
};

template <typename Fn>
std::size_t upper_index(std::size_t m, double u, Fn&& cdf) {
  // Smallest i in [1, m-1] with u < cdf(i).
  std::size_t lo = 1;
  std::size_t hi = m - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (u < cdf(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

CladeKey build_shape(std::size_t m, Rng& rng, const SplitSampler& sampler, ShapeOrder order,
                     DtcsCounts& out) {
  ++out.by_size[m];
  if (m == 1) {
    ++out.by_shape[CladeKey::leaf()];
    return CladeKey::leaf();
  }
  const std::size_t left = sampler.sample(m, rng);
  CladeKey lkey = build_shape(left, rng, sampler, order, out);
  CladeKey rkey = build_shape(m - left, rng, sampler, order, out);
  CladeKey key = CladeKey::join(lkey, rkey, order);
  ++out.by_shape[key];
  return key;
}

}  // namespace

CladeKey CladeKey::leaf() { return CladeKey("*", 1); }

CladeKey CladeKey::join(const CladeKey& left, const CladeKey& right, ShapeOrder order) {
  const bool swap = order == ShapeOrder::unordered && right < left;
  const CladeKey& a = swap ? right : left;
  const CladeKey& b = swap ? left : right;
  std::string text;
  text.reserve(a.text_.size() + b.text_.size() + 3);
  text += '(';
  text += a.text_;
  text += ',';
  text += b.text_;
  text += ')';
  return CladeKey(std::move(text), a.size_ + b.size_);
}

CladeKey CladeKey::parse(std::string_view text, ShapeOrder order) {
  if (text.empty() || text.size() > kMaxKeyText) {
    throw std::invalid_argument("clade key: empty or too long");
  }
  return KeyParser(text, order).run();
}

std::pair<CladeKey, CladeKey> CladeKey::children() const {
  if (is_leaf()) throw std::logic_error("clade key: a leaf has no children");
  int depth = 0;
  for (std::size_t j = 1; j + 1 < text_.size(); ++j) {
    const char c = text_[j];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      const std::string_view body(text_);
      return {parse(body.substr(1, j - 1), ShapeOrder::ordered),
              parse(body.substr(j + 1, text_.size() - j - 2), ShapeOrder::ordered)};
    }
  }
  throw std::logic_error("clade key: malformed internal key");
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  return -std::log1p(-uniform()) / rate;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t replica) {
  return splitmix64(splitmix64(base_seed) + replica * 0x9E3779B97F4A7C15ULL);
}

SplitSampler::SplitSampler(std::size_t max_m, SplitFamily family) : max_m_(max_m), family_(family) {
  if (max_m < 1) throw std::invalid_argument("split sampler: max_m must be >= 1");
  if (family_.is_critical()) {
    if (max_m > shared_harmonics_max_n) throw ResourceError("split sampler: max_m beyond harmonic table");
    return;
  }
  const double entries = 0.5 * static_cast<double>(max_m) * static_cast<double>(max_m);
  if (entries > kSplitTableGuard) {
    throw ResourceError("split sampler: cached CDF tables for beta != critical exceed the memory guard");
  }
  tables_.resize(max_m + 1);
  for (std::size_t m = 2; m <= max_m; ++m) tables_[m] = split_distribution(m, family_).cumulative;
}

double SplitSampler::cdf(std::size_t m, std::size_t i) const {
  if (m < 2 || m > max_m_ || i < 1 || i > m - 1) throw std::invalid_argument("split CDF out of range");
  if (!family_.is_critical()) return tables_[m][i - 1];
  if (i == m - 1) return 1.0;
  const HarmonicTable& h = shared_harmonics();
  return (h[i] + h[m - 1] - h[m - 1 - i]) / (2.0 * h[m - 1]);
}

std::size_t SplitSampler::sample(std::size_t m, Rng& rng) const {
  if (m < 2) throw std::invalid_argument("split sampling requires m >= 2");
  if (m > max_m_) throw std::invalid_argument("split sampling: m beyond sampler range");
  if (m == 2) {
    rng.next();  // keep one draw per split for every m
    return 1;
  }
  const double u = rng.uniform();
  if (!family_.is_critical()) {
    const auto& table = tables_[m];
    return static_cast<std::size_t>(std::upper_bound(table.begin(), table.end() - 1, u) - table.begin()) + 1;
  }
  const HarmonicTable& h = shared_harmonics();
  const double hm = h[m - 1];
  const double two_h = 2.0 * hm;
  return upper_index(m, u, [&](std::size_t i) { return (h[i] + hm - h[m - 1 - i]) / two_h; });
}

std::size_t sample_split(std::size_t m, SplitFamily family, Rng& rng) {
  if (m < 2) throw std::invalid_argument("split sampling requires m >= 2");
  return SplitSampler(m, family).sample(m, rng);
}

DtcsCounts simulate_dtcs(std::size_t n, Rng& rng, const SplitSampler& sampler,
                         std::size_t shape_cap, ShapeOrder order) {
  if (n < 1) throw std::invalid_argument("DTCS simulation requires n >= 1");
  if (shape_cap > kMaxShapeCap) {
    throw ResourceError("shape_cap above " + std::to_string(kMaxShapeCap) + " (shape-count explosion)");
  }
  if (n > sampler.max_m()) throw std::invalid_argument("DTCS simulation: n beyond sampler range");
  DtcsCounts out;
  out.by_size.assign(n + 1, 0);
  std::vector<std::size_t> stack;
  stack.reserve(64);
  stack.push_back(n);
  while (!stack.empty()) {
    const std::size_t m = stack.back();
    stack.pop_back();
    if (m <= shape_cap) {
      build_shape(m, rng, sampler, order, out);
      continue;
    }
    ++out.by_size[m];
    if (m == 1) continue;
    const std::size_t left = sampler.sample(m, rng);
    stack.push_back(m - left);
    stack.push_back(left);
  }
  return out;
}

DtcsCounts simulate_dtcs(std::size_t n, Rng& rng, std::size_t shape_cap, ShapeOrder order) {
  return simulate_dtcs(n, rng, SplitSampler(std::max<std::size_t>(n, 1), SplitFamily::critical()),
                       shape_cap, order);
}

double simulate_lambda(std::size_t n, Rng& rng, const SplitSampler& sampler) {
  if (n < 2) throw std::invalid_argument("length simulation requires n >= 2");
  if (n > sampler.max_m()) throw std::invalid_argument("length simulation: n beyond sampler range");
  const HarmonicTable& h = shared_harmonics();
  CompensatedSum total;
  std::vector<std::size_t> stack;
  stack.reserve(64);
  stack.push_back(n);
  while (!stack.empty()) {
    const std::size_t m = stack.back();
    stack.pop_back();
    if (m < 2) continue;
    const std::size_t left = sampler.sample(m, rng);
    total.add(rng.exponential(h[m - 1]));
    stack.push_back(m - left);
    stack.push_back(left);
  }
  return total.value();
}

double simulate_lambda(std::size_t n, Rng& rng) {
  return simulate_lambda(n, rng, SplitSampler(std::max<std::size_t>(n, 2), SplitFamily::critical()));
}

std::vector<std::size_t> simulate_descent(std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("descent simulation requires n >= 1");
  if (n > shared_harmonics_max_n) throw ResourceError("descent simulation: n beyond harmonic table");
  const HarmonicTable& h = shared_harmonics();
  std::vector<std::size_t> path{n};
  std::size_t m = n;
  while (m > 1) {
    if (m == 2) {
      rng.next();
      m = 1;
    } else {
      // P(next <= j) = (h_{m-1} - h_{m-1-j}) / h_{m-1}.
      const double u = rng.uniform();
      const double hm = h[m - 1];
      const std::size_t cur = m;
      m = upper_index(cur, u, [&](std::size_t j) {
        return j == cur - 1 ? 1.0 : (hm - h[cur - 1 - j]) / hm;
      });
    }
    path.push_back(m);
  }
  return path;
}

Statistic Statistic::count(std::size_t k) {
  if (k < 1) throw std::invalid_argument("count statistic needs k >= 1");
  Statistic s;
  s.kind = Kind::count;
  s.k = k;
  return s;
}

Statistic Statistic::of_shape(CladeKey key) {
  if (key.size() > kMaxShapeCap) {
    throw ResourceError("shape statistic: clades above " + std::to_string(kMaxShapeCap) + " leaves are not supported");
  }
  Statistic s;
  s.kind = Kind::shape;
  s.k = key.size();
  s.shape = std::move(key);
  return s;
}

Statistic Statistic::length() { return Statistic{}; }

std::string Statistic::label() const {
  switch (kind) {
    case Kind::count: return "count:" + std::to_string(k);
    case Kind::shape: return "shape:" + shape->str();
    case Kind::length: return "length";
  }
  return "length";
}

Statistic parse_statistic(std::string_view text, ShapeOrder order) {
  if (text == "length") return Statistic::length();
  if (text.starts_with("count:")) {
    const std::string digits(text.substr(6));
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw std::invalid_argument("count statistic needs a positive integer, got '" + digits + "'");
    }
    return Statistic::count(std::stoull(digits));
  }
  if (text.starts_with("shape:")) return Statistic::of_shape(CladeKey::parse(text.substr(6), order));
  throw std::invalid_argument("statistic must be count:<k>, shape:<key> or length");
}

SimBatch run_batch(std::size_t n, const Statistic& statistic, std::size_t replicas,
                   std::uint64_t base_seed, const BatchOptions& options) {
  if (replicas < 1) throw std::invalid_argument("batch needs at least one replica");
  if (n < 1) throw std::invalid_argument("batch needs n >= 1");
  if (statistic.kind == Statistic::Kind::length && n < 2) {
    throw std::invalid_argument("length statistic needs n >= 2");
  }
  if (!options.allow_large &&
      static_cast<double>(replicas) * static_cast<double>(n) > kSimulationWorkGuard) {
    throw ResourceError("replicas * n exceeds 1e9; pass the override flag to run anyway");
  }
  if (!options.family.is_critical() && !(options.family.beta_value() < 0.0)) {
    throw std::invalid_argument("tree simulation supports beta < 0 only");
  }

  SimBatch batch;
  batch.n = n;
  batch.statistic = statistic;
  batch.replicas = replicas;
  batch.base_seed = base_seed;
  batch.family = options.family.name();
  batch.shape_order = options.order == ShapeOrder::unordered ? "unordered" : "ordered";
  batch.samples.assign(replicas, 0.0);

  const SplitSampler sampler(std::max<std::size_t>(n, 2), options.family);
  auto run_replica = [&](std::size_t r) {
    Rng rng(replica_seed(base_seed, r));
    switch (statistic.kind) {
      case Statistic::Kind::count: {
        const DtcsCounts counts = simulate_dtcs(n, rng, sampler, 0, options.order);
        batch.samples[r] = statistic.k <= n ? static_cast<double>(counts.by_size[statistic.k]) : 0.0;
        break;
      }
      case Statistic::Kind::shape: {
        const DtcsCounts counts = simulate_dtcs(n, rng, sampler, statistic.k, options.order);
        const auto it = counts.by_shape.find(*statistic.shape);
        batch.samples[r] = it == counts.by_shape.end() ? 0.0 : static_cast<double>(it->second);
        break;
      }
      case Statistic::Kind::length:
        batch.samples[r] = simulate_lambda(n, rng, sampler);
        break;
    }
  };

  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, replicas));
  if (threads <= 1) {
    for (std::size_t r = 0; r < replicas; ++r) run_replica(r);
    return batch;
  }
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (replicas + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(replicas, begin + chunk);
    workers.emplace_back([&, begin, end] {
      for (std::size_t r = begin; r < end; ++r) run_replica(r);
    });
  }
  for (auto& w : workers) w.join();
  return batch;
}

void write_batch_csv(std::ostream& os, const SimBatch& batch) {
  const auto old_precision = os.precision(17);
  os << "replica,value\n";
  for (std::size_t r = 0; r < batch.samples.size(); ++r) os << r << ',' << batch.samples[r] << '\n';
  os.precision(old_precision);
}

}  // namespace hdc
