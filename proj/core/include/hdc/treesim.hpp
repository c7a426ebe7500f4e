#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdc/kernels.hpp"

namespace hdc {

enum class ShapeOrder { unordered, ordered };

/// Rooted binary tree shape written as nested pairs: a leaf is "*", an
/// internal node "(left,right)". In unordered mode the children of every
/// node are sorted by (leaf count, text), which makes the text canonical.
class CladeKey {
 public:
  static CladeKey leaf();
  static CladeKey join(const CladeKey& left, const CladeKey& right,
                       ShapeOrder order = ShapeOrder::unordered);
  /// Parses and canonicalizes. Throws std::invalid_argument on bad syntax.
  static CladeKey parse(std::string_view text, ShapeOrder order = ShapeOrder::unordered);

  const std::string& str() const noexcept { return text_; }
  std::size_t size() const noexcept { return size_; }
  bool is_leaf() const noexcept { return size_ == 1; }
  std::pair<CladeKey, CladeKey> children() const;

  friend bool operator==(const CladeKey& a, const CladeKey& b) { return a.text_ == b.text_; }
  friend std::strong_ordering operator<=>(const CladeKey& a, const CladeKey& b) {
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    return a.text_.compare(b.text_) <=> 0;
  }

 private:
  CladeKey(std::string text, std::size_t size) : text_(std::move(text)), size_(size) {}
  std::string text_;
  std::size_t size_;
};

/// Random engine for one replica: std::mt19937_64 seeded through splitmix64.
inline constexpr const char* kGeneratorId = "mt19937_64+splitmix64/v1";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Exp(rate) by inverse transform.
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Seed for replica r, a fixed function of (base_seed, r).
std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t replica);

/// Inverse-CDF split sampler for sizes up to max_m. The critical law uses its
/// closed-form CDF (h_i + h_{m-1} - h_{m-1-i}) / (2 h_{m-1}); other beta
/// values use per-m cached CDF arrays. Immutable after construction.
class SplitSampler {
 public:
  SplitSampler(std::size_t max_m, SplitFamily family);

  std::size_t max_m() const noexcept { return max_m_; }
  const SplitFamily& family() const noexcept { return family_; }
  /// P(L <= i) for a clade of size m.
  double cdf(std::size_t m, std::size_t i) const;
  /// Left subtree size L in {1..m-1}.
  std::size_t sample(std::size_t m, Rng& rng) const;

 private:
  std::size_t max_m_;
  SplitFamily family_;
  std::vector<std::vector<double>> tables_;
};

std::size_t sample_split(std::size_t m, SplitFamily family, Rng& rng);

struct DtcsCounts {
  /// by_size[m] = N_n(m), m = 0..n (by_size[0] = 0).
  std::vector<std::size_t> by_size;
  /// Clade counts by shape for every clade with at most shape_cap leaves.
  std::map<CladeKey, std::size_t> by_shape;
};

inline constexpr std::size_t kMaxShapeCap = 12;

/// One DTCS(n) realization built with an explicit work stack, left subtree
/// first. Shapes are recorded for clades of size <= shape_cap.
DtcsCounts simulate_dtcs(std::size_t n, Rng& rng, const SplitSampler& sampler,
                         std::size_t shape_cap = 0, ShapeOrder order = ShapeOrder::unordered);
DtcsCounts simulate_dtcs(std::size_t n, Rng& rng, std::size_t shape_cap = 0,
                         ShapeOrder order = ShapeOrder::unordered);

/// Total length of CTCS(n): one Exp(h_{m-1}) per clade of size m >= 2.
double simulate_lambda(std::size_t n, Rng& rng, const SplitSampler& sampler);
double simulate_lambda(std::size_t n, Rng& rng);

/// Descent chain trajectory n = s_0 > s_1 > ... > 1 with step law
/// p(m, i) = 1/(h_{m-1}(m-i)).
std::vector<std::size_t> simulate_descent(std::size_t n, Rng& rng);

struct Statistic {
  enum class Kind { count, shape, length };
  Kind kind = Kind::length;
  std::size_t k = 0;
  std::optional<CladeKey> shape;

  static Statistic count(std::size_t k);
  static Statistic of_shape(CladeKey key);
  static Statistic length();
  /// "count:2", "shape:(*,(*,*))", "length".
  std::string label() const;
};

Statistic parse_statistic(std::string_view text, ShapeOrder order = ShapeOrder::unordered);

struct BatchOptions {
  SplitFamily family = SplitFamily::critical();
  ShapeOrder order = ShapeOrder::unordered;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Lifts the replicas * n <= 1e9 guard.
  bool allow_large = false;
};

struct SimBatch {
  std::size_t n = 0;
  Statistic statistic;
  std::size_t replicas = 0;
  std::uint64_t base_seed = 0;
  std::string generator_id = kGeneratorId;
  std::string family = "critical";
  std::string shape_order = "unordered";
  std::vector<double> samples;
};

inline constexpr double kSimulationWorkGuard = 1e9;

/// Replica r draws from Rng(replica_seed(base_seed, r)); samples are stored
/// by replica index, so results do not depend on thread scheduling.
SimBatch run_batch(std::size_t n, const Statistic& statistic, std::size_t replicas,
                   std::uint64_t base_seed, const BatchOptions& options = {});

/// CSV: replica,value.
void write_batch_csv(std::ostream& os, const SimBatch& batch);

}  // namespace hdc
