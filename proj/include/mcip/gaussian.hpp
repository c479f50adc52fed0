#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mcip/chisq.hpp"
#include "mcip/error.hpp"
#include "mcip/graph.hpp"

namespace mcip {

/// n observations of p real variables, stored row-major.
class DataMatrix {
 public:
  DataMatrix(std::vector<Label> variables, std::vector<double> values)
      : labels_(std::move(variables)), values_(std::move(values)) {
    if (labels_.empty()) throw InputError("data matrix needs at least one variable");
    for (std::size_t i = 0; i < labels_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (labels_[i] == labels_[j]) throw InputError("duplicate variable '" + labels_[i] + "'");
    if (values_.size() % labels_.size() != 0)
      throw InputError("data matrix size is not a multiple of the variable count");
    for (double x : values_)
      if (!std::isfinite(x)) throw InputError("data matrix contains a missing or non-finite value");
  }

  const std::vector<Label>& variables() const { return labels_; }
  std::size_t rows() const { return values_.size() / labels_.size(); }
  std::size_t cols() const { return labels_.size(); }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  const std::vector<double>& values() const { return values_; }

  std::size_t index_of(const Label& x) const {
    auto it = std::find(labels_.begin(), labels_.end(), x);
    if (it == labels_.end()) throw InputError("unknown variable '" + x + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

 private:
  std::vector<Label> labels_;
  std::vector<double> values_;
};

/// Symmetric p×p matrix with labelled rows and columns.
struct CovarianceMatrix {
  std::vector<Label> labels;
  std::vector<double> values;

  std::size_t size() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }

  std::size_t index_of(const Label& x) const {
    auto it = std::find(labels.begin(), labels.end(), x);
    if (it == labels.end()) throw InputError("unknown variable '" + x + "'");
    return static_cast<std::size_t>(it - labels.begin());
  }
};

/// Sample covariance with denominator n − 1.
inline CovarianceMatrix covariance(const DataMatrix& d) {
  const std::size_t n = d.rows();
  const std::size_t p = d.cols();
  if (n < 2) throw InputError("covariance needs at least 2 observations");
  std::vector<double> mean(p, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) mean[c] += d.at(r, c);
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<double> cov(p * p, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < p; ++i) {
      const double di = d.at(r, i) - mean[i];
      for (std::size_t j = i; j < p; ++j) cov[i * p + j] += di * (d.at(r, j) - mean[j]);
    }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      cov[i * p + j] /= static_cast<double>(n - 1);
      cov[j * p + i] = cov[i * p + j];
    }
  return {d.variables(), std::move(cov)};
}

namespace detail {

inline constexpr double kSingularPivotRatio = 1e-12;

// Gauss–Jordan inverse with partial pivoting. Throws NumericError when a
// pivot drops below kSingularPivotRatio times the largest initial entry.
inline std::vector<double> invert(std::vector<double> a, std::size_t n, const std::string& what) {
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  const double threshold = kSingularPivotRatio * scale;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (!(std::abs(a[pivot * n + col]) > threshold)) throw NumericError("singular covariance submatrix over " + what);
    if (pivot != col)
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a[col * n + k], a[pivot * n + k]);
        std::swap(inv[col * n + k], inv[pivot * n + k]);
      }
    const double diag = a[col * n + col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col * n + k] /= diag;
      inv[col * n + k] /= diag;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r * n + col];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[col * n + k];
        inv[r * n + k] -= f * inv[col * n + k];
      }
    }
  }
  return inv;
}

}  // namespace detail

/// Partial correlation of u and v given `given`, from the inverse Ω of the
/// covariance submatrix over {u, v} ∪ given: −Ω_uv / sqrt(Ω_uu Ω_vv).
inline double partial_correlation(const CovarianceMatrix& cov, const Label& u, const Label& v,
                                  const VertexSet& given) {
  std::vector<std::size_t> idx{cov.index_of(u), cov.index_of(v)};
  for (const auto& g : given) idx.push_back(cov.index_of(g));
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (idx[i] == idx[j]) throw InputError("partial correlation variables must be distinct ('" + cov.labels[idx[i]] + "')");

  const std::size_t m = idx.size();
  std::vector<double> sub(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) sub[i * m + j] = cov.at(idx[i], idx[j]);
  std::string what = "{";
  for (std::size_t i = 0; i < m; ++i) what += (i ? "," : "") + cov.labels[idx[i]];
  what += "}";
  const auto omega = detail::invert(std::move(sub), m, what);
  const double denom = omega[0] * omega[m + 1];
  if (!(denom > 0.0)) throw NumericError("non-positive precision diagonal over " + what);
  return -omega[1] / std::sqrt(denom);
}

struct GaussianCITestResult {
  double statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
  double partial_correlation = 0.0;
};

/// Deviance test of u ⟂ v | given for multivariate normal data:
/// statistic −n·ln(1 − r²) against χ²(1).
inline GaussianCITestResult ci_test_gaussian(const DataMatrix& d, const Label& u, const Label& v,
                                             const VertexSet& given) {
  const std::size_t n = d.rows();
  if (n <= given.size() + 2)
    throw InputError("conditional independence test needs more than " + std::to_string(given.size() + 2) +
                     " observations, got " + std::to_string(n));
  const double r = std::clamp(partial_correlation(covariance(d), u, v, given), -1.0, 1.0);
  const double one_minus = 1.0 - r * r;
  if (!(one_minus > 0.0)) throw NumericError("partial correlation of " + u + " and " + v + " is ±1; deviance is infinite");
  GaussianCITestResult out;
  out.partial_correlation = r;
  out.statistic = std::max(0.0, -static_cast<double>(n) * std::log(one_minus));
  out.df = 1;
  out.p_value = chi_square_sf(out.statistic, out.df);
  return out;
}

struct PairwiseTest {
  Label u;
  Label v;
  GaussianCITestResult result;
};

struct McipGaussianReport {
  VertexSet blocks;
  VertexSet given;
  double alpha = 0.05;
  std::vector<PairwiseTest> tests;
  bool mcip_consistent = true;
  std::string rationale;
};

/// Tests every pair of `blocks` given `given`. Under joint normality,
/// pairwise conditional independence of the block variables implies their
/// mutual conditional independence, so the set is declared consistent with
/// the mutual relation iff no pairwise test rejects at `alpha`.
inline McipGaussianReport mcip_gaussian_check(const DataMatrix& d, const VertexSet& blocks, const VertexSet& given,
                                              double alpha = 0.05) {
  if (blocks.size() < 2) throw InputError("mutual independence check needs at least two variables");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  McipGaussianReport rep{blocks, given, alpha, {}, true, {}};
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      auto res = ci_test_gaussian(d, blocks[i], blocks[j], given);
      rep.mcip_consistent = rep.mcip_consistent && res.p_value > alpha;
      rep.tests.push_back({blocks[i], blocks[j], res});
    }
  rep.rationale = rep.mcip_consistent
                      ? "no pairwise test rejects; for jointly normal variables pairwise conditional "
                        "independence implies mutual conditional independence"
                      : "at least one pairwise test rejects at the given level, so the variables are not "
                        "mutually conditionally independent";
  return rep;
}

}  // namespace mcip
