#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcip/error.hpp"
#include "mcip/graph.hpp"

namespace mcip {

namespace detail {

inline VertexSet sorted_set(VertexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool disjoint(const VertexSet& a, const VertexSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) ++i; else ++j;
  }
  return true;
}

inline bool subset_of(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline std::string join(const VertexSet& s) {
  std::string out;
  for (const auto& x : s) {
    if (!out.empty()) out += ',';
    out += x;
  }
  return out;
}

}  // namespace detail

/// Conditional independence assertion A ⟂ B | C over labelled variables.
///
/// Stored in canonical form: each side sorted, and left <= right, so that
/// A ⟂ B | C and B ⟂ A | C compare equal.
class CIStatement {
 public:
  CIStatement(VertexSet left, VertexSet right, VertexSet given = {})
      : left_(detail::sorted_set(std::move(left))),
        right_(detail::sorted_set(std::move(right))),
        given_(detail::sorted_set(std::move(given))) {
    if (left_.empty() || right_.empty())
      throw InputError("conditional independence statement needs nonempty sides");
    if (!detail::disjoint(left_, right_) || !detail::disjoint(left_, given_) ||
        !detail::disjoint(right_, given_))
      throw InputError("conditional independence statement sets must be pairwise disjoint: " +
                       render(left_, right_, given_));
    if (right_ < left_) std::swap(left_, right_);
  }

  const VertexSet& left() const { return left_; }
  const VertexSet& right() const { return right_; }
  const VertexSet& given() const { return given_; }

  VertexSet variables() const {
    return detail::set_union(detail::set_union(left_, right_), given_);
  }

  /// `A,B _||_ C | D,E`; the ` | ...` part is omitted when nothing is given.
  std::string to_string() const { return render(left_, right_, given_); }

  auto operator<=>(const CIStatement&) const = default;

 private:
  static std::string render(const VertexSet& l, const VertexSet& r, const VertexSet& g) {
    std::string s = detail::join(l) + " _||_ " + detail::join(r);
    if (!g.empty()) s += " | " + detail::join(g);
    return s;
  }

  VertexSet left_;
  VertexSet right_;
  VertexSet given_;
};

/// Mutual conditional independence X1 ⟂ X2 ⟂ … ⟂ Xk | C, k >= 2.
class MutualCIStatement {
 public:
  MutualCIStatement(std::vector<VertexSet> blocks, VertexSet given = {})
      : given_(detail::sorted_set(std::move(given))) {
    if (blocks.size() < 2) throw InputError("mutual independence statement needs at least two blocks");
    for (auto& b : blocks) {
      auto s = detail::sorted_set(std::move(b));
      if (s.empty()) throw InputError("mutual independence statement has an empty block");
      if (!detail::disjoint(s, given_)) throw InputError("block overlaps the conditioning set");
      for (const auto& other : blocks_)
        if (!detail::disjoint(s, other)) throw InputError("mutual independence blocks must be disjoint");
      blocks_.push_back(std::move(s));
    }
    std::sort(blocks_.begin(), blocks_.end());
  }

  const std::vector<VertexSet>& blocks() const { return blocks_; }
  const VertexSet& given() const { return given_; }

  VertexSet variables() const {
    VertexSet all = given_;
    for (const auto& b : blocks_) all = detail::set_union(all, b);
    return all;
  }

  std::string to_string() const {
    std::string s;
    for (const auto& b : blocks_) {
      if (!s.empty()) s += " _||_ ";
      s += detail::join(b);
    }
    if (!given_.empty()) s += " | " + detail::join(given_);
    return s;
  }

  auto operator<=>(const MutualCIStatement&) const = default;

 private:
  std::vector<VertexSet> blocks_;
  VertexSet given_;
};

using CIStatementSet = std::set<CIStatement>;

/// x ⟂ y | V∖{x,y} for every non-adjacent pair.
inline CIStatementSet pairwise_relations(const UndirectedGraph& g) {
  CIStatementSet out;
  const auto& v = g.vertices();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      if (g.adjacent(i, j)) continue;
      VertexSet rest;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (k != i && k != j) rest.push_back(v[k]);
      out.emplace(VertexSet{v[i]}, VertexSet{v[j]}, std::move(rest));
    }
  return out;
}

/// x ⟂ V∖({x} ∪ bd(x)) | bd(x) for every x with at least one non-neighbour.
inline CIStatementSet local_relations(const UndirectedGraph& g) {
  CIStatementSet out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    VertexSet far;
    VertexSet bd;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (k == i) continue;
      (g.adjacent(i, k) ? bd : far).push_back(g.label(k));
    }
    if (!far.empty()) out.emplace(VertexSet{g.label(i)}, std::move(far), std::move(bd));
  }
  return out;
}

/// One mutual statement per maximal independent set I with |I| >= 2:
/// the members of I are mutually independent given V∖I. Singleton maximal
/// independent sets carry no content and are dropped.
inline std::set<MutualCIStatement> mcip_relations(const UndirectedGraph& g) {
  std::set<MutualCIStatement> out;
  for (const auto& amis : enumerate_maximal_independent_sets(g)) {
    if (amis.size() < 2) continue;
    std::vector<VertexSet> blocks;
    for (const auto& x : amis) blocks.push_back({x});
    const auto in = detail::sorted_set(amis);
    VertexSet rest;
    for (const auto& x : g.vertices())
      if (!std::binary_search(in.begin(), in.end(), x)) rest.push_back(x);
    out.emplace(std::move(blocks), std::move(rest));
  }
  return out;
}

/// Global Markov query: does `given` separate the two sides in `g`?
inline bool global_query(const UndirectedGraph& g, const CIStatement& s) {
  return separates(g, s.left(), s.right(), s.given());
}

/// Weak union applied to every pair of blocks:
/// X_i ⟂ X_j | given ∪ (other blocks).
inline CIStatementSet weak_union_expand(const MutualCIStatement& m) {
  CIStatementSet out;
  const auto& b = m.blocks();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      VertexSet cond = m.given();
      for (std::size_t k = 0; k < b.size(); ++k)
        if (k != i && k != j) cond = detail::set_union(cond, b[k]);
      out.emplace(b[i], b[j], std::move(cond));
    }
  return out;
}

enum class Axiom { symmetry, decomposition, weak_union, contraction, intersection };

inline std::string_view to_string(Axiom a) {
  switch (a) {
    case Axiom::symmetry: return "symmetry";
    case Axiom::decomposition: return "decomposition";
    case Axiom::weak_union: return "weak_union";
    case Axiom::contraction: return "contraction";
    case Axiom::intersection: return "intersection";
  }
  return "?";
}

namespace detail {

// X ⟂ (Y ∪ W) | Z with W = selection: locate the side holding W.
// Returns {X, Y} or nullopt if W fits on neither side.
inline std::optional<std::pair<VertexSet, VertexSet>> split_side(const CIStatement& s, const VertexSet& w) {
  if (subset_of(w, s.right()) && w.size() < s.right().size())
    return std::pair{s.left(), set_difference(s.right(), w)};
  if (subset_of(w, s.left()) && w.size() < s.left().size())
    return std::pair{s.right(), set_difference(s.left(), w)};
  return std::nullopt;
}

// Both orientations of a statement as (X, other side).
inline std::array<std::pair<VertexSet, VertexSet>, 2> orientations(const CIStatement& s) {
  return {std::pair{s.left(), s.right()}, std::pair{s.right(), s.left()}};
}

}  // namespace detail

/// One graphoid rewrite step.
///
///   symmetry:      X⟂Y|Z                      => Y⟂X|Z
///   decomposition: X⟂(Y∪W)|Z                  => X⟂Y|Z
///   weak_union:    X⟂(Y∪W)|Z                  => X⟂Y|(Z∪W)
///   contraction:   X⟂Y|Z  and X⟂W|(Z∪Y)       => X⟂(Y∪W)|Z
///   intersection:  X⟂Y|(Z∪W) and X⟂W|(Z∪Y)    => X⟂(Y∪W)|Z
///
/// `selection` is W for decomposition and weak union and must be a proper
/// subset of one side; it is ignored otherwise. Returns nullopt when the
/// inputs do not have the shape the axiom needs. Symmetry is the identity
/// on canonical statements.
inline std::optional<CIStatement> apply_axiom(Axiom axiom, std::span<const CIStatement> inputs,
                                              const VertexSet& selection = {}) {
  const std::size_t arity = (axiom == Axiom::contraction || axiom == Axiom::intersection) ? 2 : 1;
  if (inputs.size() != arity)
    throw InputError(std::string(to_string(axiom)) + " takes " + std::to_string(arity) + " statement(s), got " +
                     std::to_string(inputs.size()));
  const auto w = detail::sorted_set(selection);

  switch (axiom) {
    case Axiom::symmetry:
      return CIStatement(inputs[0].right(), inputs[0].left(), inputs[0].given());
    case Axiom::decomposition:
    case Axiom::weak_union: {
      if (w.empty()) return inputs[0];
      auto split = detail::split_side(inputs[0], w);
      if (!split) return std::nullopt;
      auto given = axiom == Axiom::weak_union ? detail::set_union(inputs[0].given(), w) : inputs[0].given();
      return CIStatement(split->first, split->second, std::move(given));
    }
    case Axiom::contraction: {
      const auto& s1 = inputs[0];
      const auto& s2 = inputs[1];
      for (const auto& [x1, y] : detail::orientations(s1))
        for (const auto& [x2, wset] : detail::orientations(s2))
          if (x1 == x2 && s2.given() == detail::set_union(s1.given(), y) && detail::disjoint(y, wset))
            return CIStatement(x1, detail::set_union(y, wset), s1.given());
      return std::nullopt;
    }
    case Axiom::intersection: {
      const auto& s1 = inputs[0];
      const auto& s2 = inputs[1];
      for (const auto& [x1, y] : detail::orientations(s1))
        for (const auto& [x2, wset] : detail::orientations(s2)) {
          if (x1 != x2 || !detail::subset_of(wset, s1.given()) || !detail::subset_of(y, s2.given())) continue;
          auto z1 = detail::set_difference(s1.given(), wset);
          auto z2 = detail::set_difference(s2.given(), y);
          if (z1 == z2) return CIStatement(x1, detail::set_union(y, wset), std::move(z1));
        }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Pairwise-Markov-shaped statements (x ⟂ y | V∖{x,y}) reachable from the
/// MCIP relations by weak union.
inline CIStatementSet pairwise_from_mcip(const UndirectedGraph& g) {
  CIStatementSet out;
  const std::size_t n = g.size();
  for (const auto& m : mcip_relations(g))
    for (const auto& s : weak_union_expand(m))
      if (s.left().size() == 1 && s.right().size() == 1 && s.given().size() + 2 == n) out.insert(s);
  return out;
}

}  // namespace mcip
