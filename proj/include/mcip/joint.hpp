#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mcip/ci.hpp"
#include "mcip/detail/table_shape.hpp"
#include "mcip/error.hpp"
#include "mcip/graph.hpp"

namespace mcip {

struct DiscreteVariable {
  Label name;
  std::size_t levels = 2;

  friend bool operator==(const DiscreteVariable&, const DiscreteVariable&) = default;
};

/// Nonnegative factor over the product space of `scope`, row-major with the
/// last scope variable varying fastest.
struct CliquePotential {
  VertexSet scope;
  std::vector<double> values;
};

/// Exact joint distribution over a handful of discrete variables. This is a
/// brute-force oracle, so the table is capped at 2^20 cells.
class JointTable {
 public:
  static constexpr std::size_t kMaxCells = std::size_t{1} << 20;
  static constexpr double kMassTolerance = 1e-12;

  JointTable(std::vector<DiscreteVariable> variables, std::vector<double> probabilities)
      : vars_(std::move(variables)), p_(std::move(probabilities)) {
    shape_ = detail::TableShape(checked_dims(vars_));
    if (p_.size() != shape_.size())
      throw InputError("joint table needs " + std::to_string(shape_.size()) + " cells, got " +
                       std::to_string(p_.size()));
    double total = 0.0;
    positive_ = true;
    for (double x : p_) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("joint table has a negative or non-finite cell");
      positive_ = positive_ && x > 0.0;
      total += x;
    }
    const double slack = std::max(kMassTolerance, static_cast<double>(p_.size()) * 0x1p-52);
    if (std::abs(total - 1.0) > slack)
      throw InputError("joint table mass is " + std::to_string(total) + ", expected 1");
  }

  const std::vector<DiscreteVariable>& variables() const { return vars_; }
  const std::vector<double>& probabilities() const { return p_; }
  const detail::TableShape& shape() const { return shape_; }
  std::size_t size() const { return p_.size(); }
  bool strictly_positive() const { return positive_; }

  std::size_t axis_of(const Label& x) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i].name == x) return i;
    throw InputError("unknown variable '" + x + "'");
  }

  std::vector<std::size_t> axes_of(std::span<const Label> labels) const {
    std::vector<std::size_t> out;
    for (const auto& l : labels) out.push_back(axis_of(l));
    return out;
  }

 private:
  static std::vector<std::size_t> checked_dims(const std::vector<DiscreteVariable>& vars) {
    std::vector<std::size_t> dims;
    std::size_t cells = 1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].levels < 2) throw InputError("variable '" + vars[i].name + "' needs at least 2 levels");
      for (std::size_t j = 0; j < i; ++j)
        if (vars[j].name == vars[i].name) throw InputError("duplicate variable '" + vars[i].name + "'");
      cells *= vars[i].levels;
      if (cells > kMaxCells)
        throw InputError("joint table exceeds the oracle cap of " + std::to_string(kMaxCells) + " cells");
      dims.push_back(vars[i].levels);
    }
    return dims;
  }

  std::vector<DiscreteVariable> vars_;
  std::vector<double> p_;
  detail::TableShape shape_;
  bool positive_ = false;
};

/// P(x) = (1/Z) ∏ ψ(x_scope). Each potential must live on a clique of `g`;
/// potentials are absorbed into the first maximal clique containing their
/// scope and the maximal-clique factors are multiplied in canonical order.
inline JointTable from_clique_potentials(const UndirectedGraph& g, const std::map<Label, std::size_t>& levels,
                                         std::span<const CliquePotential> potentials) {
  std::vector<DiscreteVariable> vars;
  for (const auto& v : g.vertices()) {
    auto it = levels.find(v);
    if (it == levels.end()) throw InputError("no level count for variable '" + v + "'");
    if (it->second < 2) throw InputError("variable '" + v + "' needs at least 2 levels");
    vars.push_back({v, it->second});
  }
  std::vector<std::size_t> dims;
  std::size_t cells = 1;
  for (const auto& v : vars) {
    dims.push_back(v.levels);
    cells *= v.levels;
    if (cells > JointTable::kMaxCells) throw InputError("joint table exceeds the oracle cap");
  }
  const detail::TableShape shape(dims);

  std::vector<std::vector<std::size_t>> cliques;
  for (const auto& c : enumerate_maximal_cliques(g)) cliques.push_back(g.indices_of(c));
  std::vector<std::vector<double>> factors(cliques.size());
  for (std::size_t k = 0; k < cliques.size(); ++k) factors[k].assign(shape.sub_shape(cliques[k]).size(), 1.0);

  for (const auto& pot : potentials) {
    std::vector<std::size_t> scope;
    for (const auto& x : pot.scope) scope.push_back(g.index_of(x));
    for (std::size_t a = 0; a < scope.size(); ++a)
      for (std::size_t b = a + 1; b < scope.size(); ++b) {
        if (scope[a] == scope[b]) throw InputError("potential scope repeats '" + g.label(scope[a]) + "'");
        if (!g.adjacent(scope[a], scope[b]))
          throw InputError("potential scope {" + detail::join(pot.scope) + "} is not a clique of the graph");
      }
    const auto scope_shape = shape.sub_shape(scope);
    if (pot.values.size() != scope_shape.size())
      throw InputError("potential over {" + detail::join(pot.scope) + "} needs " +
                       std::to_string(scope_shape.size()) + " values");
    for (double v : pot.values)
      if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("potential values must be finite and nonnegative");

    auto sorted_scope = scope;
    std::sort(sorted_scope.begin(), sorted_scope.end());
    std::size_t host = cliques.size();
    for (std::size_t k = 0; k < cliques.size() && host == cliques.size(); ++k)
      if (std::includes(cliques[k].begin(), cliques[k].end(), sorted_scope.begin(), sorted_scope.end())) host = k;

    if (host == cliques.size()) throw InputError("potential scope is not inside any maximal clique");

    // Walk the host clique's cells and pick up the matching potential entry.
    const auto host_shape = shape.sub_shape(cliques[host]);
    std::vector<std::size_t> scope_in_host;
    for (auto v : scope)
      scope_in_host.push_back(static_cast<std::size_t>(
          std::find(cliques[host].begin(), cliques[host].end(), v) - cliques[host].begin()));
    for (std::size_t c = 0; c < host_shape.size(); ++c) factors[host][c] *= pot.values[host_shape.project(c, scope_in_host)];
  }

  std::vector<double> p(shape.size(), 1.0);
  for (std::size_t k = 0; k < cliques.size(); ++k) {
    const auto proj = shape.projection_map(cliques[k]);
    for (std::size_t c = 0; c < shape.size(); ++c) p[c] *= factors[k][proj[c]];
  }
  double z = 0.0;
  for (double x : p) z += x;
  if (!(z > 0.0) || !std::isfinite(z)) throw InputError("potentials give a zero or non-finite normalizer");
  for (double& x : p) x /= z;
  return JointTable(std::move(vars), std::move(p));
}

/// Random strictly positive potentials, one per maximal clique, with values
/// drawn uniformly from [lo, hi].
template <typename Rng>
std::vector<CliquePotential> random_positive_potentials(const UndirectedGraph& g,
                                                        const std::map<Label, std::size_t>& levels, Rng& rng,
                                                        double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<CliquePotential> out;
  for (const auto& c : enumerate_maximal_cliques(g)) {
    std::size_t cells = 1;
    for (const auto& v : c) cells *= levels.at(v);
    CliquePotential pot{c, std::vector<double>(cells)};
    for (double& x : pot.values) x = dist(rng);
    out.push_back(std::move(pot));
  }
  return out;
}

/// Sums out every variable not in `keep`. Result keeps the table's variable
/// order.
inline JointTable marginalize(const JointTable& t, std::span<const Label> keep) {
  std::vector<std::size_t> axes;
  for (const auto& k : keep) axes.push_back(t.axis_of(k));
  std::sort(axes.begin(), axes.end());
  axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
  std::vector<DiscreteVariable> vars;
  for (auto a : axes) vars.push_back(t.variables()[a]);
  auto p = t.shape().sum_onto<double>(t.probabilities(), axes);
  return JointTable(std::move(vars), std::move(p));
}

namespace detail {

// Checks P(x_1..x_k | c) = ∏ P(x_i | c) over every cell with P(c) > 0.
inline bool factorizes_given(const JointTable& t, const std::vector<VertexSet>& blocks, const VertexSet& given,
                             double tol) {
  std::vector<std::size_t> axes;
  std::vector<std::vector<std::size_t>> block_axes;
  for (const auto& b : blocks) {
    block_axes.push_back(t.axes_of(b));
    axes.insert(axes.end(), block_axes.back().begin(), block_axes.back().end());
  }
  const auto given_axes = t.axes_of(given);
  axes.insert(axes.end(), given_axes.begin(), given_axes.end());

  // Marginal over (blocks..., given) in that axis order.
  const auto joint = t.shape().sum_onto<double>(t.probabilities(), axes);
  const auto joint_shape = t.shape().sub_shape(axes);

  // Positions of each block and of the conditioning set inside `axes`.
  std::vector<std::vector<std::size_t>> block_pos(blocks.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t k = 0; k < block_axes[i].size(); ++k) block_pos[i].push_back(offset++);
  std::vector<std::size_t> given_pos;
  for (std::size_t k = 0; k < given_axes.size(); ++k) given_pos.push_back(offset++);

  const auto pc = joint_shape.sum_onto<double>(joint, given_pos);
  std::vector<std::vector<double>> pbc;
  std::vector<std::vector<std::size_t>> bc_pos;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto pos = block_pos[i];
    pos.insert(pos.end(), given_pos.begin(), given_pos.end());
    pbc.push_back(joint_shape.sum_onto<double>(joint, pos));
    bc_pos.push_back(std::move(pos));
  }

  for (std::size_t cell = 0; cell < joint_shape.size(); ++cell) {
    const double c = pc[joint_shape.project(cell, given_pos)];
    if (c <= 0.0) continue;
    double product = 1.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) product *= pbc[i][joint_shape.project(cell, bc_pos[i])] / c;
    if (std::abs(joint[cell] / c - product) > tol) return false;
  }
  return true;
}

}  // namespace detail

/// Numeric check of A ⟂ B | C: |P(a,b|c) − P(a|c)P(b|c)| <= tol for every
/// cell. Conditioning cells with zero mass are skipped.
inline bool check_ci(const JointTable& t, const CIStatement& s, double tol = 1e-9) {
  return detail::factorizes_given(t, {s.left(), s.right()}, s.given(), tol);
}

/// Numeric check of X1 ⟂ … ⟂ Xk | C: the conditional of the blocks given C
/// equals the product of the per-block conditionals within tol per cell.
inline bool check_mcip(const JointTable& t, const MutualCIStatement& m, double tol = 1e-9) {
  return detail::factorizes_given(t, m.blocks(), m.given(), tol);
}

}  // namespace mcip
