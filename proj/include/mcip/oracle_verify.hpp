#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mcip/ci.hpp"
#include "mcip/graph.hpp"
#include "mcip/joint.hpp"

namespace mcip {

/// Simple graph on `n` vertices named v0, v1, … with each edge present
/// independently with probability `p`.
template <typename Rng>
UndirectedGraph random_graph(std::size_t n, double p, Rng& rng) {
  std::vector<Label> vertices;
  for (std::size_t i = 0; i < n; ++i) vertices.push_back("v" + std::to_string(i));
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) edges.emplace_back(vertices[i], vertices[j]);
  return UndirectedGraph(std::move(vertices), edges);
}

/// Every statement A ⟂ B | C over disjoint subsets of V (A, B nonempty)
/// for which C separates A from B in `g`.
inline CIStatementSet separation_statements(const UndirectedGraph& g) {
  CIStatementSet out;
  const std::size_t n = g.size();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 4;
  // Base-4 digit per vertex: 0 = unused, 1 = A, 2 = B, 3 = C.
  for (std::size_t code = 0; code < combos; ++code) {
    VertexSet a, b, c;
    std::size_t rest = code;
    for (std::size_t i = 0; i < n; ++i, rest /= 4) {
      switch (rest % 4) {
        case 1: a.push_back(g.label(i)); break;
        case 2: b.push_back(g.label(i)); break;
        case 3: c.push_back(g.label(i)); break;
        default: break;
      }
    }
    if (a.empty() || b.empty() || b < a) continue;
    if (separates(g, a, b, c)) out.emplace(std::move(a), std::move(b), std::move(c));
  }
  return out;
}

struct OracleVerifyOptions {
  int graphs = 100;
  int max_vertices = 6;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  double edge_probability = 0.5;
  // Negative control: force the first two members of the first MCIP
  // statement to be equal, which must make the checks fail.
  bool inject_coupling = false;
};

struct CheckTally {
  std::size_t checked = 0;
  std::size_t failed = 0;
};

struct OracleVerifyReport {
  int graphs = 0;
  CheckTally mcip;
  CheckTally pairwise;
  CheckTally local;
  CheckTally global;
  CheckTally weak_union;  // mutual ⇒ each pairwise consequence
  std::vector<std::string> failures;

  bool passed() const {
    return mcip.failed + pairwise.failed + local.failed + global.failed + weak_union.failed == 0;
  }
};

namespace detail {

inline JointTable couple_first_pair(const JointTable& t, const MutualCIStatement& m) {
  const auto a = t.axis_of(m.blocks()[0].front());
  const auto b = t.axis_of(m.blocks()[1].front());
  auto p = t.probabilities();
  double z = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (t.shape().coordinate(c, a) != t.shape().coordinate(c, b)) p[c] = 0.0;
    z += p[c];
  }
  for (double& x : p) x /= z;
  return JointTable(t.variables(), std::move(p));
}

}  // namespace detail

/// Draws random graphs with random strictly positive binary clique
/// potentials and checks every MCIP, pairwise, local and separation-implied
/// statement against the exact joint table.
inline OracleVerifyReport verify_markov_ensemble(const OracleVerifyOptions& opts) {
  if (opts.graphs < 0) throw InputError("graph count must be nonnegative");
  if (opts.max_vertices < 2 || opts.max_vertices > 20)
    throw InputError("max vertices must lie in [2, 20] for the exact oracle");
  if (!(opts.tol > 0.0)) throw InputError("tolerance must be positive");

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> size_dist(2, opts.max_vertices);
  OracleVerifyReport rep;
  for (int gi = 0; gi < opts.graphs; ++gi) {
    const auto g = random_graph(static_cast<std::size_t>(size_dist(rng)), opts.edge_probability, rng);
    std::map<Label, std::size_t> levels;
    for (const auto& v : g.vertices()) levels[v] = 2;
    const auto pots = random_positive_potentials(g, levels, rng);
    auto table = from_clique_potentials(g, levels, pots);
    const auto mcips = mcip_relations(g);
    if (opts.inject_coupling && !mcips.empty()) table = detail::couple_first_pair(table, *mcips.begin());
    ++rep.graphs;

    auto record = [&](CheckTally& tally, bool ok, const std::string& kind, const std::string& what) {
      ++tally.checked;
      if (!ok) {
        ++tally.failed;
        rep.failures.push_back("graph " + std::to_string(gi) + " " + kind + ": " + what);
      }
    };
    for (const auto& m : mcips) {
      const bool ok = check_mcip(table, m, opts.tol);
      record(rep.mcip, ok, "mcip", m.to_string());
      if (ok)
        for (const auto& s : weak_union_expand(m))
          record(rep.weak_union, check_ci(table, s, opts.tol), "weak-union", s.to_string());
    }
    for (const auto& s : pairwise_relations(g)) record(rep.pairwise, check_ci(table, s, opts.tol), "pairwise", s.to_string());
    for (const auto& s : local_relations(g)) record(rep.local, check_ci(table, s, opts.tol), "local", s.to_string());
    for (const auto& s : separation_statements(g)) record(rep.global, check_ci(table, s, opts.tol), "global", s.to_string());
  }
  return rep;
}

}  // namespace mcip
