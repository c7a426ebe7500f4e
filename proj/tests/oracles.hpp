#pragma once

// Brute-force references for the unit tests. Nothing here calls into the
// library beyond the Rational alias.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hdc/numeric.hpp"

namespace oracle {

using hdc::Rational;

inline Rational harmonic(std::size_t n) {
  Rational h = 0;
  for (std::size_t j = 1; j <= n; ++j) h += Rational(1, static_cast<unsigned long>(j));
  h.canonicalize();
  return h;
}

inline long double harmonic_ld(std::size_t n) {
  long double h = 0.0L;
  for (std::size_t j = n; j >= 1; --j) h += 1.0L / static_cast<long double>(j);
  return h;
}

// q_m(i) straight from the definition.
inline Rational split(std::size_t m, std::size_t i) {
  Rational q = Rational(static_cast<unsigned long>(m)) /
               (2 * harmonic(m - 1) * static_cast<unsigned long>(i) * static_cast<unsigned long>(m - i));
  q.canonicalize();
  return q;
}

// x_n = sum_{i<n} x_i / (h_{n-1} (n - i)) with x_i = 0 below k.
inline std::vector<Rational> sequence(std::size_t k, const Rational& x_k, std::size_t n_max) {
  std::vector<Rational> x(n_max + 1, Rational(0));
  x[k] = x_k;
  for (std::size_t n = k + 1; n <= n_max; ++n) {
    Rational s = 0;
    for (std::size_t i = k; i < n; ++i) s += x[i] / static_cast<unsigned long>(n - i);
    x[n] = s / harmonic(n - 1);
    x[n].canonicalize();
  }
  return x;
}

// Forward visiting probabilities of the descent chain from n:
// pi_n = 1, pi_j = sum_{m>j} pi_m p(m, j).
inline std::vector<Rational> visits(std::size_t n) {
  std::vector<Rational> pi(n + 1, Rational(0));
  pi[n] = 1;
  for (std::size_t j = n - 1; j >= 1; --j) {
    for (std::size_t m = j + 1; m <= n; ++m)
      pi[j] += pi[m] / (harmonic(m - 1) * static_cast<unsigned long>(m - j));
    pi[j].canonicalize();
  }
  return pi;
}

// One ordered tree of DTCS(n) with its probability. `clades` lists the
// leaf counts of all clades (leaves included); `shapes` the canonical
// unordered text of each clade; `rates` the h_{m-1} of internal clades.
struct Tree {
  Rational prob;
  std::vector<std::size_t> clades;
  std::vector<std::string> shapes;
  std::vector<std::string> ordered_shapes;
  std::string text;
  std::string ordered_text;
  std::size_t leaves = 1;
};

inline std::string join_unordered(const Tree& a, const Tree& b) {
  const bool swap = std::make_pair(b.leaves, b.text) < std::make_pair(a.leaves, a.text);
  return swap ? "(" + b.text + "," + a.text + ")" : "(" + a.text + "," + b.text + ")";
}

inline std::vector<Tree> all_trees(std::size_t n) {
  static std::map<std::size_t, std::vector<Tree>> memo;
  if (auto it = memo.find(n); it != memo.end()) return it->second;
  std::vector<Tree> out;
  if (n == 1) {
    out.push_back({Rational(1), {1}, {"*"}, {"*"}, "*", "*", 1});
  } else {
    for (std::size_t i = 1; i < n; ++i) {
      const Rational q = split(n, i);
      for (const Tree& l : all_trees(i)) {
        for (const Tree& r : all_trees(n - i)) {
          Tree t;
          t.prob = q * l.prob * r.prob;
          t.prob.canonicalize();
          t.leaves = n;
          t.text = join_unordered(l, r);
          t.ordered_text = "(" + l.ordered_text + "," + r.ordered_text + ")";
          t.clades = l.clades;
          t.clades.insert(t.clades.end(), r.clades.begin(), r.clades.end());
          t.clades.push_back(n);
          t.shapes = l.shapes;
          t.shapes.insert(t.shapes.end(), r.shapes.begin(), r.shapes.end());
          t.shapes.push_back(t.text);
          t.ordered_shapes = l.ordered_shapes;
          t.ordered_shapes.insert(t.ordered_shapes.end(), r.ordered_shapes.begin(),
                                  r.ordered_shapes.end());
          t.ordered_shapes.push_back(t.ordered_text);
          out.push_back(std::move(t));
        }
      }
    }
  }
  memo[n] = out;
  return out;
}

struct Moments {
  Rational mean;
  Rational variance;
};

// Mean and variance of a per-tree statistic over the exact tree law.
inline Moments tree_moments(std::size_t n, const std::function<Rational(const Tree&)>& stat) {
  Rational m = 0;
  Rational m2 = 0;
  for (const Tree& t : all_trees(n)) {
    const Rational v = stat(t);
    m += t.prob * v;
    m2 += t.prob * v * v;
  }
  Rational var = m2 - m * m;
  m.canonicalize();
  var.canonicalize();
  return {m, var};
}

// Total length: E and Var of sum over internal clades of Exp(h_{m-1}),
// independent given the tree.
inline Moments length_moments(std::size_t n) {
  Rational m = 0;
  Rational m2 = 0;
  Rational extra = 0;
  for (const Tree& t : all_trees(n)) {
    Rational mu = 0;
    Rational v = 0;
    for (std::size_t size : t.clades) {
      if (size < 2) continue;
      const Rational inv = 1 / harmonic(size - 1);
      mu += inv;
      v += inv * inv;
    }
    m += t.prob * mu;
    m2 += t.prob * mu * mu;
    extra += t.prob * v;
  }
  Rational var = m2 - m * m + extra;
  m.canonicalize();
  var.canonicalize();
  return {m, var};
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

}  // namespace oracle
