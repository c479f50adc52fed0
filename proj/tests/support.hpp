#pragma once

// Shared fixtures and brute-force oracles for the test suites. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mcip/mcip.hpp"

namespace mcip::testing {

inline std::string fixture_path(const std::string& name) { return std::string(MCIP_FIXTURE_DIR) + "/" + name; }

inline UndirectedGraph fig1() {
  return UndirectedGraph({"A", "B", "C", "D", "E", "F", "G"},
                         {{"A", "B"}, {"A", "D"}, {"B", "C"}, {"C", "D"}, {"C", "E"},
                          {"D", "E"}, {"E", "F"}, {"E", "G"}, {"F", "G"}});
}

inline UndirectedGraph fig2() {
  return UndirectedGraph({"systol", "protein", "smoke", "phys", "mental", "family"},
                         {{"systol", "protein"}, {"protein", "smoke"}, {"systol", "smoke"}, {"smoke", "phys"},
                          {"protein", "phys"}, {"smoke", "mental"}, {"phys", "mental"}, {"mental", "family"}});
}

inline UndirectedGraph fig3() {
  return UndirectedGraph({"systol", "protein", "smoke", "mental", "phys", "family"},
                         {{"systol", "protein"}, {"protein", "smoke"}, {"systol", "smoke"}, {"protein", "mental"},
                          {"smoke", "phys"}, {"mental", "phys"}, {"phys", "family"}});
}

inline std::vector<Label> names(std::size_t n) {
  std::vector<Label> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("v" + std::to_string(i));
  return v;
}

// Graph on n vertices from a bitmask over the n(n-1)/2 vertex pairs.
inline UndirectedGraph graph_from_code(std::size_t n, std::uint64_t code) {
  auto v = names(n);
  std::vector<Edge> edges;
  std::size_t bitpos = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++bitpos)
      if (code & (std::uint64_t{1} << bitpos)) edges.emplace_back(v[i], v[j]);
  return UndirectedGraph(v, edges);
}

inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

// Unordered family of sets for comparisons that ignore ordering.
inline std::set<std::set<Label>> as_family(const std::vector<VertexSet>& f) {
  std::set<std::set<Label>> out;
  for (const auto& s : f) out.emplace(s.begin(), s.end());
  return out;
}

// Maximal cliques by subset enumeration.
inline std::set<std::set<Label>> brute_maximal_cliques(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> cliques;
  for (std::uint32_t m = 1; m < (1u << n); ++m) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if ((m >> i & 1) && (m >> j & 1) && !g.adjacent(i, j)) ok = false;
    if (ok) cliques.push_back(m);
  }
  std::set<std::set<Label>> out;
  for (auto m : cliques) {
    bool maximal = true;
    for (auto o : cliques)
      if (o != m && (o & m) == m) maximal = false;
    if (!maximal) continue;
    std::set<Label> s;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1) s.insert(g.label(i));
    out.insert(std::move(s));
  }
  if (n == 0) out.clear();
  return out;
}

// Separation by enumerating every simple path from a to b.
inline bool brute_separates(const UndirectedGraph& g, const VertexSet& a, const VertexSet& b, const VertexSet& c) {
  std::vector<char> in_b(g.size(), 0), in_c(g.size(), 0);
  for (const auto& x : b) in_b[g.index_of(x)] = 1;
  for (const auto& x : c) in_c[g.index_of(x)] = 1;
  std::vector<char> on_path(g.size(), 0);
  bool found = false;
  auto dfs = [&](auto&& self, std::size_t u) -> void {
    if (found) return;
    if (in_b[u]) {
      found = true;  // a path avoiding c reached b
      return;
    }
    for (std::size_t v = 0; v < g.size(); ++v)
      if (g.adjacent(u, v) && !on_path[v] && !in_c[v]) {
        on_path[v] = 1;
        self(self, v);
        on_path[v] = 0;
      }
  };
  for (const auto& x : a) {
    const auto s = g.index_of(x);
    on_path[s] = 1;
    dfs(dfs, s);
    on_path[s] = 0;
  }
  return !found;
}

// Chordal iff no induced subgraph on >= 4 vertices is a cycle.
inline bool brute_chordal(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    const int k = std::popcount(m);
    if (k < 4) continue;
    bool all_deg2 = true;
    std::size_t start = n;
    for (std::size_t i = 0; i < n && all_deg2; ++i) {
      if (!(m >> i & 1)) continue;
      start = i;
      int deg = 0;
      for (std::size_t j = 0; j < n; ++j)
        if ((m >> j & 1) && g.adjacent(i, j)) ++deg;
      all_deg2 = deg == 2;
    }
    if (!all_deg2) continue;
    // Connected 2-regular induced subgraph is a single chordless cycle.
    std::uint32_t seen = 1u << start;
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v)
        if ((m >> v & 1) && !(seen >> v & 1) && g.adjacent(u, v)) {
          seen |= 1u << v;
          stack.push_back(v);
        }
    }
    if (seen == m) return false;
  }
  return true;
}

// Multivariate normal samples via a hand-rolled Cholesky factor.
template <typename Rng>
DataMatrix sample_mvn(const std::vector<Label>& labels, const std::vector<double>& cov, std::size_t n, Rng& rng) {
  const std::size_t p = labels.size();
  std::vector<double> l(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = cov[i * p + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * p + k] * l[j * p + k];
      l[i * p + j] = i == j ? std::sqrt(s) : s / l[j * p + j];
    }
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> values(n * p);
  std::vector<double> draw(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& x : draw) x = z(rng);
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k <= i; ++k) s += l[i * p + k] * draw[k];
      values[r * p + i] = s;
    }
  }
  return DataMatrix(labels, std::move(values));
}

// Gauss–Jordan without pivoting; only for SPD precision matrices chosen by hand.
inline std::vector<double> spd_inverse(std::vector<double> a, std::size_t n) {
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double d = a[c * n + c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * n + c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

}  // namespace mcip::testing
