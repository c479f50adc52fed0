#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mcip/chisq.hpp"
#include "mcip/detail/table_shape.hpp"
#include "mcip/error.hpp"
#include "mcip/graph.hpp"

namespace mcip {

struct CategoricalVariable {
  Label name;
  std::vector<std::string> levels;

  friend bool operator==(const CategoricalVariable&, const CategoricalVariable&) = default;
};

/// Dense table of (possibly fractional) cell counts over categorical
/// variables. Observed and fitted tables share this type. Cells are
/// row-major with the last variable varying fastest.
class ContingencyTable {
 public:
  ContingencyTable(std::vector<CategoricalVariable> variables, std::vector<double> counts)
      : vars_(std::move(variables)), counts_(std::move(counts)) {
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].levels.empty()) throw InputError("variable '" + vars_[i].name + "' has no levels");
      for (std::size_t j = 0; j < i; ++j)
        if (vars_[j].name == vars_[i].name) throw InputError("duplicate variable '" + vars_[i].name + "'");
      dims.push_back(vars_[i].levels.size());
    }
    shape_ = detail::TableShape(std::move(dims));
    if (counts_.size() != shape_.size())
      throw InputError("table needs " + std::to_string(shape_.size()) + " cells, got " +
                       std::to_string(counts_.size()));
    for (double c : counts_)
      if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("cell counts must be finite and nonnegative");
    if (!(total() > 0.0)) throw InputError("table total count must be positive");
  }

  const std::vector<CategoricalVariable>& variables() const { return vars_; }
  const std::vector<double>& counts() const { return counts_; }
  const detail::TableShape& shape() const { return shape_; }
  std::size_t size() const { return counts_.size(); }

  double total() const {
    double s = 0.0;
    for (double c : counts_) s += c;
    return s;
  }

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

  std::map<Label, std::size_t> level_counts() const {
    std::map<Label, std::size_t> out;
    for (const auto& v : vars_) out[v.name] = v.levels.size();
    return out;
  }

  VertexSet variable_names() const {
    VertexSet out;
    for (const auto& v : vars_) out.push_back(v.name);
    return out;
  }

  bool same_structure(const ContingencyTable& other) const { return vars_ == other.vars_; }

 private:
  std::vector<CategoricalVariable> vars_;
  std::vector<double> counts_;
  detail::TableShape shape_;
};

struct FitResult {
  ContingencyTable fitted;
  double x2 = 0.0;
  double g2 = 0.0;
  int df = 0;
  double p_value_x2 = 1.0;
  double p_value_g2 = 1.0;
  int iterations = 0;  // full IPF cycles; 0 for closed forms
  bool converged = true;
  double max_discrepancy = 0.0;  // largest |observed − fitted| over generator marginals
};

/// Sums counts over every variable not in `keep`; keeps the table's
/// variable order. `keep` empty gives a single cell with the grand total.
inline ContingencyTable marginal(const ContingencyTable& t, std::span<const Label> keep) {
  auto axes = t.axes_of(keep);
  std::sort(axes.begin(), axes.end());
  axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
  std::vector<CategoricalVariable> vars;
  for (auto a : axes) vars.push_back(t.variables()[a]);
  return ContingencyTable(std::move(vars), t.shape().sum_onto<double>(t.counts(), axes));
}

namespace detail {

inline void require_same_structure(const ContingencyTable& a, const ContingencyTable& b) {
  if (!a.same_structure(b)) throw InputError("observed and fitted tables have different variables or levels");
}

}  // namespace detail

/// Pearson X² = Σ (O − E)² / E. Cells with E = O = 0 contribute nothing; a
/// cell with E = 0 and O > 0 is a degenerate fit.
inline double pearson_x2(const ContingencyTable& observed, const ContingencyTable& fitted) {
  detail::require_same_structure(observed, fitted);
  double x2 = 0.0;
  for (std::size_t c = 0; c < observed.size(); ++c) {
    const double o = observed.counts()[c];
    const double e = fitted.counts()[c];
    if (e > 0.0) {
      x2 += (o - e) * (o - e) / e;
    } else if (o > 0.0) {
      throw NumericError("degenerate fit: cell " + std::to_string(c) + " has observed count but zero expectation");
    }
  }
  return x2;
}

/// Deviance G² = 2 Σ O ln(O / E), with 0·ln(0/E) = 0.
inline double g2(const ContingencyTable& observed, const ContingencyTable& fitted) {
  detail::require_same_structure(observed, fitted);
  double s = 0.0;
  for (std::size_t c = 0; c < observed.size(); ++c) {
    const double o = observed.counts()[c];
    const double e = fitted.counts()[c];
    if (o <= 0.0) continue;
    if (!(e > 0.0))
      throw NumericError("degenerate fit: cell " + std::to_string(c) + " has observed count but zero expectation");
    s += o * std::log(o / e);
  }
  return 2.0 * s;
}

/// Residual degrees of freedom of the hierarchical log-linear model
/// generated by `generators`: the cell count minus one free parameter
/// block per distinct subset of any generator (the empty set included).
inline int degrees_of_freedom(const std::map<Label, std::size_t>& levels, std::span<const VertexSet> generators) {
  if (generators.empty()) throw InputError("degrees of freedom need at least one generator");
  std::int64_t cells = 1;
  for (const auto& [name, k] : levels) cells *= static_cast<std::int64_t>(k);

  std::set<VertexSet> terms;
  for (const auto& gen : generators) {
    VertexSet g = gen;
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    for (const auto& v : g)
      if (!levels.contains(v)) throw InputError("generator mentions unknown variable '" + v + "'");
    if (g.size() > 30) throw InputError("generator too large for subset enumeration");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.size()); ++mask) {
      VertexSet sub;
      for (std::size_t i = 0; i < g.size(); ++i)
        if (mask & (std::uint64_t{1} << i)) sub.push_back(g[i]);
      terms.insert(std::move(sub));
    }
  }
  std::int64_t params = 0;
  for (const auto& term : terms) {
    std::int64_t p = 1;
    for (const auto& v : term) p *= static_cast<std::int64_t>(levels.at(v)) - 1;
    params += p;
  }
  return static_cast<int>(cells - params);
}

namespace detail {

inline FitResult finish_fit(const ContingencyTable& observed, ContingencyTable fitted, int df) {
  FitResult r{std::move(fitted)};
  r.x2 = pearson_x2(observed, r.fitted);
  r.g2 = g2(observed, r.fitted);
  r.df = df;
  // A saturated model has nothing left to test.
  r.p_value_x2 = df > 0 ? chi_square_sf(r.x2, df) : 1.0;
  r.p_value_g2 = df > 0 ? chi_square_sf(r.g2, df) : 1.0;
  return r;
}

inline double max_marginal_gap(const ContingencyTable& observed, std::span<const double> fitted,
                               const std::vector<std::vector<std::size_t>>& generator_axes) {
  double gap = 0.0;
  for (const auto& axes : generator_axes) {
    const auto o = observed.shape().sum_onto<double>(observed.counts(), axes);
    const auto f = observed.shape().sum_onto<double>(fitted, axes);
    for (std::size_t i = 0; i < o.size(); ++i) gap = std::max(gap, std::abs(o[i] - f[i]));
  }
  return gap;
}

}  // namespace detail

/// Closed-form fit under mutual conditional independence of `blocks` given
/// `given`:
///
///   m̂(x) = ∏_i n(x_{B_i}, x_S) / n(x_S)^(k−1)
///
/// Cells whose conditioning marginal n(x_S) is zero are fitted as 0. The
/// degrees of freedom are those of the model generated by {B_i ∪ S}.
inline FitResult fit_mcip(const ContingencyTable& t, std::span<const VertexSet> blocks, const VertexSet& given) {
  if (blocks.size() < 2) throw InputError("mutual independence fit needs at least two blocks");
  std::vector<int> owner(t.variables().size(), -1);
  auto claim = [&](const VertexSet& s, int who) {
    for (const auto& v : s) {
      const auto a = t.axis_of(v);
      if (owner[a] != -1) throw InputError("variable '" + v + "' appears in more than one block or in the given set");
      owner[a] = who;
    }
  };
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].empty()) throw InputError("mutual independence fit has an empty block");
    claim(blocks[i], static_cast<int>(i));
  }
  claim(given, static_cast<int>(blocks.size()));
  for (std::size_t a = 0; a < owner.size(); ++a)
    if (owner[a] == -1)
      throw InputError("blocks and given set must partition the table; '" + t.variables()[a].name + "' is missing");

  const auto s_axes = t.axes_of(given);
  const auto n_s = t.shape().sum_onto<double>(t.counts(), s_axes);
  std::vector<std::vector<std::size_t>> bs_axes;
  std::vector<std::vector<double>> n_bs;
  std::vector<VertexSet> generators;
  for (const auto& b : blocks) {
    auto axes = t.axes_of(b);
    axes.insert(axes.end(), s_axes.begin(), s_axes.end());
    n_bs.push_back(t.shape().sum_onto<double>(t.counts(), axes));
    bs_axes.push_back(std::move(axes));
    VertexSet gen = b;
    gen.insert(gen.end(), given.begin(), given.end());
    generators.push_back(std::move(gen));
  }

  const double k_minus_1 = static_cast<double>(blocks.size() - 1);
  std::vector<double> fitted(t.size(), 0.0);
  for (std::size_t c = 0; c < t.size(); ++c) {
    const double ns = n_s[t.shape().project(c, s_axes)];
    if (ns <= 0.0) continue;
    double num = 1.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) num *= n_bs[i][t.shape().project(c, bs_axes[i])];
    fitted[c] = num / std::pow(ns, k_minus_1);
  }
  return detail::finish_fit(t, ContingencyTable(t.variables(), std::move(fitted)),
                            degrees_of_freedom(t.level_counts(), generators));
}

/// Closed-form maximum likelihood fit of a decomposable (chordal) graphical
/// model: clique marginals over separator marginals along an RIP ordering.
inline FitResult fit_decomposable(const ContingencyTable& t, const UndirectedGraph& g) {
  {
    auto tv = t.variable_names();
    auto gv = g.vertices();
    std::sort(tv.begin(), tv.end());
    std::sort(gv.begin(), gv.end());
    if (tv != gv) throw InputError("graph vertices must match the table variables");
  }
  const auto dec = is_decomposable(g);
  if (!dec.decomposable)
    throw InputError("graph is not decomposable; no closed-form fit exists, use the IPF fit instead");

  // Starting from the total lets the first clique divide by n(∅) like any
  // other node with an empty separator.
  std::vector<double> fitted(t.size(), t.total());
  std::vector<VertexSet> generators;
  for (const auto& node : dec.junction_tree) {
    generators.push_back(node.clique);
    const auto c_axes = t.axes_of(node.clique);
    const auto s_axes = t.axes_of(node.separator);
    const auto n_c = t.shape().sum_onto<double>(t.counts(), c_axes);
    const auto n_s = t.shape().sum_onto<double>(t.counts(), s_axes);
    for (std::size_t c = 0; c < t.size(); ++c) {
      if (fitted[c] == 0.0) continue;
      const double ns = n_s[t.shape().project(c, s_axes)];
      fitted[c] = ns > 0.0 ? fitted[c] * n_c[t.shape().project(c, c_axes)] / ns : 0.0;
    }
  }
  if (generators.empty()) generators.push_back({});
  return detail::finish_fit(t, ContingencyTable(t.variables(), std::move(fitted)),
                            degrees_of_freedom(t.level_counts(), generators));
}

struct IpfOptions {
  double tol = 1e-8;
  int max_iter = 1000;
};

/// Iterative proportional fitting from a uniform table. One iteration is a
/// full cycle over the generators; the fit stops once every generator
/// marginal is within `tol` of the observed one, or after `max_iter`
/// cycles with converged = false.
inline FitResult fit_ipf(const ContingencyTable& t, std::span<const VertexSet> generators, IpfOptions opts = {}) {
  if (generators.empty()) throw InputError("IPF needs at least one generator");
  std::vector<std::vector<std::size_t>> gen_axes;
  std::vector<std::vector<double>> observed;
  for (const auto& gen : generators) {
    auto axes = t.axes_of(gen);
    std::sort(axes.begin(), axes.end());
    axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
    observed.push_back(t.shape().sum_onto<double>(t.counts(), axes));
    gen_axes.push_back(std::move(axes));
  }
  std::vector<std::vector<std::size_t>> proj;
  for (const auto& axes : gen_axes) proj.push_back(t.shape().projection_map(axes));

  std::vector<double> fit(t.size(), t.total() / static_cast<double>(t.size()));
  int cycles = 0;
  double gap = detail::max_marginal_gap(t, fit, gen_axes);
  bool converged = gap <= opts.tol;
  while (!converged && cycles < opts.max_iter) {
    for (std::size_t k = 0; k < gen_axes.size(); ++k) {
      std::vector<double> current(observed[k].size(), 0.0);
      for (std::size_t c = 0; c < t.size(); ++c) current[proj[k][c]] += fit[c];
      for (std::size_t c = 0; c < t.size(); ++c) {
        const double cur = current[proj[k][c]];
        fit[c] = cur > 0.0 ? fit[c] * observed[k][proj[k][c]] / cur : 0.0;
      }
    }
    ++cycles;
    gap = detail::max_marginal_gap(t, fit, gen_axes);
    converged = gap <= opts.tol;
  }

  auto r = detail::finish_fit(t, ContingencyTable(t.variables(), std::move(fit)),
                              degrees_of_freedom(t.level_counts(), generators));
  r.iterations = cycles;
  r.converged = converged;
  r.max_discrepancy = gap;
  return r;
}

}  // namespace mcip
