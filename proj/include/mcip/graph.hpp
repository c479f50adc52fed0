#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcip/error.hpp"

namespace mcip {

using Label = std::string;

/// A set of vertex labels. Graph operations return members in the graph's
/// canonical (declaration) order; inputs may come in any order.
using VertexSet = std::vector<Label>;

using Edge = std::pair<Label, Label>;

/// Simple undirected graph over string labels. Immutable once built.
///
/// Vertices keep their declaration order; that order is the canonical order
/// for every set and family the graph operations return. Equality is
/// structural: two graphs are equal when they have the same vertex labels
/// and the same edges, regardless of declaration order.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;

  UndirectedGraph(std::vector<Label> vertices, std::span<const Edge> edges)
      : labels_(std::move(vertices)) {
    index_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      validate_label(labels_[i]);
      if (!index_.emplace(labels_[i], i).second)
        throw InputError("duplicate vertex label '" + labels_[i] + "'");
    }
    adj_.assign(labels_.size() * labels_.size(), 0);
    neighbours_.assign(labels_.size(), {});
    for (const auto& [x, y] : edges) {
      const auto i = index_of(x);
      const auto j = index_of(y);
      if (i == j) throw InputError("self-loop on vertex '" + x + "'");
      if (adjacent(i, j)) throw InputError("duplicate edge " + x + " - " + y);
      adj_[i * size() + j] = adj_[j * size() + i] = 1;
      neighbours_[i].push_back(j);
      neighbours_[j].push_back(i);
    }
    for (auto& n : neighbours_) std::sort(n.begin(), n.end());
  }

  UndirectedGraph(std::vector<Label> vertices, std::initializer_list<Edge> edges)
      : UndirectedGraph(std::move(vertices), std::span<const Edge>(edges.begin(), edges.size())) {}

  static UndirectedGraph complete(std::vector<Label> vertices) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      for (std::size_t j = i + 1; j < vertices.size(); ++j) edges.emplace_back(vertices[i], vertices[j]);
    return UndirectedGraph(std::move(vertices), edges);
  }

  static UndirectedGraph edgeless(std::vector<Label> vertices) {
    return UndirectedGraph(std::move(vertices), std::span<const Edge>{});
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<Label>& vertices() const { return labels_; }
  const Label& label(std::size_t i) const { return labels_[i]; }

  bool contains(const Label& x) const { return index_.contains(x); }

  std::size_t index_of(const Label& x) const {
    auto it = index_.find(x);
    if (it == index_.end()) throw InputError("unknown vertex '" + x + "'");
    return it->second;
  }

  /// Indices of `s` in ascending (canonical) order, duplicates removed.
  std::vector<std::size_t> indices_of(std::span<const Label> s) const {
    std::vector<std::size_t> out;
    out.reserve(s.size());
    for (const auto& x : s) out.push_back(index_of(x));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  VertexSet labels_of(std::span<const std::size_t> indices) const {
    VertexSet out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(labels_[i]);
    return out;
  }

  bool adjacent(std::size_t i, std::size_t j) const { return adj_[i * size() + j] != 0; }
  bool adjacent(const Label& x, const Label& y) const { return adjacent(index_of(x), index_of(y)); }

  const std::vector<std::size_t>& neighbours(std::size_t i) const { return neighbours_[i]; }

  /// Edges as (earlier, later) in canonical order, sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (auto j : neighbours_[i])
        if (i < j) out.emplace_back(labels_[i], labels_[j]);
    return out;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& nb : neighbours_) n += nb.size();
    return n / 2;
  }

  UndirectedGraph complement() const {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if (!adjacent(i, j)) edges.emplace_back(labels_[i], labels_[j]);
    return UndirectedGraph(labels_, edges);
  }

  friend bool operator==(const UndirectedGraph& a, const UndirectedGraph& b) {
    return a.sorted_vertices() == b.sorted_vertices() && a.sorted_edges() == b.sorted_edges();
  }

 private:
  static void validate_label(const Label& x) {
    if (x.empty()) throw InputError("empty vertex label");
    for (char c : x)
      if (c == ',' || c == '|' || c == '"' || static_cast<unsigned char>(c) <= ' ')
        throw InputError("vertex label '" + x + "' contains a reserved character");
  }

  std::vector<Label> sorted_vertices() const {
    auto v = labels_;
    std::sort(v.begin(), v.end());
    return v;
  }

  std::vector<Edge> sorted_edges() const {
    auto e = edges();
    for (auto& [x, y] : e)
      if (y < x) std::swap(x, y);
    std::sort(e.begin(), e.end());
    return e;
  }

  std::vector<Label> labels_;
  std::unordered_map<Label, std::size_t> index_;
  std::vector<char> adj_;
  std::vector<std::vector<std::size_t>> neighbours_;
};

namespace detail {

inline constexpr std::size_t kMaxEnumerationVertices = 64;

using Mask = std::uint64_t;

inline Mask bit(std::size_t i) { return Mask{1} << i; }

inline std::vector<std::size_t> mask_members(Mask m) {
  std::vector<std::size_t> out;
  while (m) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

// Bron–Kerbosch with Tomita pivoting over bitmask adjacency.
class CliqueEnumerator {
 public:
  explicit CliqueEnumerator(std::vector<Mask> adjacency) : adj_(std::move(adjacency)) {}

  std::vector<Mask> run() {
    found_.clear();
    const std::size_t n = adj_.size();
    const Mask all = n == 64 ? ~Mask{0} : (bit(n) - 1);
    if (n > 0) expand(0, all, 0);
    return std::move(found_);
  }

 private:
  void expand(Mask r, Mask p, Mask x) {
    if (p == 0 && x == 0) {
      found_.push_back(r);
      return;
    }
    std::size_t pivot = 0;
    int best = -1;
    for (Mask ux = p | x; ux; ux &= ux - 1) {
      const auto u = static_cast<std::size_t>(std::countr_zero(ux));
      const int score = std::popcount(p & adj_[u]);
      if (score > best) {
        best = score;
        pivot = u;
      }
    }
    for (Mask cand = p & ~adj_[pivot]; cand; cand &= cand - 1) {
      const auto v = static_cast<std::size_t>(std::countr_zero(cand));
      expand(r | bit(v), p & adj_[v], x & adj_[v]);
      p &= ~bit(v);
      x |= bit(v);
    }
  }

  std::vector<Mask> adj_;
  std::vector<Mask> found_;
};

inline std::vector<Mask> adjacency_masks(const UndirectedGraph& g, bool complement) {
  if (g.size() > kMaxEnumerationVertices)
    throw InputError("set enumeration is limited to " + std::to_string(kMaxEnumerationVertices) +
                     " vertices (graph has " + std::to_string(g.size()) + ")");
  std::vector<Mask> adj(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (i != j && g.adjacent(i, j) != complement) adj[i] |= bit(j);
  return adj;
}

inline std::vector<VertexSet> canonical_family(const UndirectedGraph& g, const std::vector<Mask>& masks) {
  std::vector<std::vector<std::size_t>> idx;
  idx.reserve(masks.size());
  for (auto m : masks) idx.push_back(mask_members(m));
  std::sort(idx.begin(), idx.end());
  std::vector<VertexSet> out;
  out.reserve(idx.size());
  for (const auto& s : idx) out.push_back(g.labels_of(s));
  return out;
}

}  // namespace detail

/// True iff no two members of `s` are adjacent. Empty sets and singletons
/// are independent.
inline bool is_independent_set(const UndirectedGraph& g, std::span<const Label> s) {
  const auto idx = g.indices_of(s);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (g.adjacent(idx[a], idx[b])) return false;
  return true;
}

/// All maximal cliques, members in canonical order, family sorted
/// lexicographically by canonical position.
inline std::vector<VertexSet> enumerate_maximal_cliques(const UndirectedGraph& g) {
  detail::CliqueEnumerator bk(detail::adjacency_masks(g, false));
  return detail::canonical_family(g, bk.run());
}

/// All maximal independent sets (AMIS): the maximal cliques of the
/// complement graph.
inline std::vector<VertexSet> enumerate_maximal_independent_sets(const UndirectedGraph& g) {
  detail::CliqueEnumerator bk(detail::adjacency_masks(g, true));
  return detail::canonical_family(g, bk.run());
}

/// Rebuilds the unique graph whose maximal independent sets are `families`:
/// V is their union (first-appearance order) and {x,y} is an edge iff no
/// family holds both.
inline UndirectedGraph reconstruct_from_amis(std::span<const VertexSet> families) {
  if (families.empty()) throw InputError("reconstruction needs at least one independent set");
  std::vector<Label> vertices;
  std::unordered_map<Label, std::size_t> index;
  std::vector<std::set<std::size_t>> sets;
  for (const auto& fam : families) {
    if (fam.empty()) throw InputError("empty set in maximal independent set family");
    std::set<std::size_t> s;
    for (const auto& x : fam) {
      auto [it, inserted] = index.emplace(x, vertices.size());
      if (inserted) vertices.push_back(x);
      s.insert(it->second);
    }
    sets.push_back(std::move(s));
  }
  for (std::size_t a = 0; a < sets.size(); ++a)
    for (std::size_t b = 0; b < sets.size(); ++b)
      if (sets[a].size() < sets[b].size() &&
          std::includes(sets[b].begin(), sets[b].end(), sets[a].begin(), sets[a].end()))
        throw InputError("family #" + std::to_string(a + 1) + " is strictly contained in family #" +
                         std::to_string(b + 1) + "; input is not a maximal family");

  const std::size_t n = vertices.size();
  std::vector<char> together(n * n, 0);
  for (const auto& s : sets)
    for (auto i : s)
      for (auto j : s) together[i * n + j] = 1;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!together[i * n + j]) edges.emplace_back(vertices[i], vertices[j]);
  return UndirectedGraph(std::move(vertices), edges);
}

/// True iff every path from `a` to `b` passes through `c`. `a`, `b` must be
/// nonempty and the three sets pairwise disjoint.
inline bool separates(const UndirectedGraph& g, std::span<const Label> a, std::span<const Label> b,
                      std::span<const Label> c) {
  const auto ia = g.indices_of(a);
  const auto ib = g.indices_of(b);
  const auto ic = g.indices_of(c);
  if (ia.empty() || ib.empty()) throw InputError("separation query needs nonempty end sets");
  std::vector<char> role(g.size(), 0);  // 1 = a, 2 = b, 3 = c
  auto mark = [&](const std::vector<std::size_t>& s, char r) {
    for (auto i : s) {
      if (role[i] != 0)
        throw InputError("separation sets overlap at vertex '" + g.label(i) + "'");
      role[i] = r;
    }
  };
  mark(ia, 1);
  mark(ib, 2);
  mark(ic, 3);

  std::vector<char> seen(g.size(), 0);
  std::queue<std::size_t> frontier;
  for (auto i : ia) {
    seen[i] = 1;
    frontier.push(i);
  }
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto v : g.neighbours(u)) {
      if (seen[v] || role[v] == 3) continue;
      if (role[v] == 2) return false;
      seen[v] = 1;
      frontier.push(v);
    }
  }
  return true;
}

/// Neighbours of `x`, canonical order.
inline VertexSet boundary(const UndirectedGraph& g, const Label& x) {
  return g.labels_of(g.neighbours(g.index_of(x)));
}

struct JunctionTreeNode {
  VertexSet clique;
  VertexSet separator;  // clique ∩ (union of earlier cliques)
  std::optional<std::size_t> parent;  // earlier node holding the separator; none when separator is empty
};

struct Decomposability {
  bool decomposable = false;
  // Populated only when decomposable.
  std::vector<Label> elimination_order;
  std::vector<JunctionTreeNode> junction_tree;  // RIP-ordered
};

/// Chordality test by maximum-cardinality search. For chordal graphs also
/// returns a perfect elimination ordering and an RIP ordering of the
/// maximal cliques with separators.
inline Decomposability is_decomposable(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> order;
  std::vector<std::size_t> position(n, n);
  std::vector<std::size_t> weight(n, 0);
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v)
      if (position[v] == n && (pick == n || weight[v] > weight[pick])) pick = v;
    position[pick] = step;
    order.push_back(pick);
    for (auto u : g.neighbours(pick))
      if (position[u] == n) ++weight[u];
  }

  // Earlier-visited neighbours of each vertex, and the zero fill-in test:
  // they must all be adjacent to the most recently visited one among them.
  std::vector<std::vector<std::size_t>> earlier(n);
  for (auto v : order) {
    for (auto u : g.neighbours(v))
      if (position[u] < position[v]) earlier[v].push_back(u);
    if (earlier[v].empty()) continue;
    const auto latest = *std::max_element(earlier[v].begin(), earlier[v].end(),
                                          [&](auto x, auto y) { return position[x] < position[y]; });
    for (auto u : earlier[v])
      if (u != latest && !g.adjacent(u, latest)) return {};
  }

  Decomposability out;
  out.decomposable = true;
  for (auto it = order.rbegin(); it != order.rend(); ++it) out.elimination_order.push_back(g.label(*it));

  // Candidate cliques {v} ∪ earlier(v) in visit order; keep the maximal ones.
  std::vector<std::vector<std::size_t>> candidates;
  for (auto v : order) {
    auto c = earlier[v];
    c.push_back(v);
    std::sort(c.begin(), c.end());
    candidates.push_back(std::move(c));
  }
  std::vector<std::vector<std::size_t>> cliques;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < candidates.size() && maximal; ++j) {
      if (i == j) continue;
      const auto& a = candidates[i];
      const auto& b = candidates[j];
      if (std::includes(b.begin(), b.end(), a.begin(), a.end()) && (b.size() > a.size() || j < i))
        maximal = false;
    }
    if (maximal) cliques.push_back(candidates[i]);
  }

  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < cliques.size(); ++k) {
    const auto& c = cliques[k];
    std::vector<std::size_t> sep;
    for (auto v : c)
      if (seen.contains(v)) sep.push_back(v);
    JunctionTreeNode node{g.labels_of(c), g.labels_of(sep), std::nullopt};
    if (!sep.empty()) {
      for (std::size_t p = 0; p < k; ++p) {
        const auto& pc = cliques[p];
        if (std::includes(pc.begin(), pc.end(), sep.begin(), sep.end())) {
          node.parent = p;
          break;
        }
      }
      if (!node.parent) throw NumericError("running intersection property violated in clique ordering");
    }
    out.junction_tree.push_back(std::move(node));
    seen.insert(c.begin(), c.end());
  }
  return out;
}

}  // namespace mcip
