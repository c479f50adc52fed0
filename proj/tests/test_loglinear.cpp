#include <gtest/gtest.h>

#include <random>

#include "mcip/io.hpp"
#include "mcip/loglinear.hpp"
#include "support.hpp"

namespace {

using namespace mcip;
using namespace mcip::testing;

ContingencyTable reinis() { return io::parse_table_csv(io::read_file(fixture_path("reinis.csv"))); }

ContingencyTable two_by_two() { return ContingencyTable({{"r", {"r0", "r1"}}, {"c", {"c0", "c1"}}}, {10, 20, 30, 40}); }

template <typename Rng>
ContingencyTable random_table(const std::vector<std::size_t>& levels, Rng& rng, int lo = 0, int hi = 30) {
  std::vector<CategoricalVariable> vars;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    CategoricalVariable v{"v" + std::to_string(i), {}};
    for (std::size_t k = 0; k < levels[i]; ++k) v.levels.push_back("l" + std::to_string(k));
    vars.push_back(std::move(v));
    cells *= levels[i];
  }
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<double> counts(cells);
  for (auto& c : counts) c = d(rng);
  counts[0] += 1;
  return ContingencyTable(vars, counts);
}

// Mutual-independence fit by explicit nested loops over the three binary
// blocks and a binary conditioning variable.
std::vector<double> brute_three_block_fit(const ContingencyTable& t) {
  // Variable order v0, v1, v2, v3 with blocks v0, v1, v2 and given v3.
  const auto& n = t.counts();
  auto at = [&](int a, int b, int c, int s) { return n[static_cast<std::size_t>(((a * 2 + b) * 2 + c) * 2 + s)]; };
  std::vector<double> out(16);
  for (int s = 0; s < 2; ++s) {
    double ns = 0, na[2] = {}, nb[2] = {}, nc[2] = {};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const double x = at(a, b, c, s);
          ns += x;
          na[a] += x;
          nb[b] += x;
          nc[c] += x;
        }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          out[static_cast<std::size_t>(((a * 2 + b) * 2 + c) * 2 + s)] = ns > 0 ? na[a] * nb[b] * nc[c] / (ns * ns) : 0;
  }
  return out;
}

TEST(ContingencyTable, Validation) {
  EXPECT_THROW(ContingencyTable({{"a", {"x", "y"}}}, {0, 0}), InputError);
  EXPECT_THROW(ContingencyTable({{"a", {"x", "y"}}}, {1, -1}), InputError);
  EXPECT_THROW(ContingencyTable({{"a", {"x", "y"}}}, {1, 2, 3}), InputError);
}

TEST(Marginal, SumsAndGrandTotal) {
  const auto t = two_by_two();
  const VertexSet r{"r"};
  EXPECT_EQ(marginal(t, r).counts(), (std::vector<double>{30, 70}));
  const VertexSet c{"c"};
  EXPECT_EQ(marginal(t, c).counts(), (std::vector<double>{40, 60}));
  const auto all = marginal(t, std::span<const Label>{});
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all.counts()[0], 100.0);
}

TEST(Statistics, HandComputedIndependenceFit) {
  const auto t = two_by_two();
  const std::vector<VertexSet> blocks{{"r"}, {"c"}};
  const auto fit = fit_mcip(t, blocks, {});
  EXPECT_EQ(fit.fitted.counts(), (std::vector<double>{12, 18, 28, 42}));
  const double x2 = 4.0 / 12 + 4.0 / 18 + 4.0 / 28 + 4.0 / 42;
  EXPECT_NEAR(fit.x2, x2, 1e-12);
  const double g2 = 2 * (10 * std::log(10.0 / 12) + 20 * std::log(20.0 / 18) + 30 * std::log(30.0 / 28) +
                         40 * std::log(40.0 / 42));
  EXPECT_NEAR(fit.g2, g2, 1e-12);
  EXPECT_EQ(fit.df, 1);
  EXPECT_NEAR(fit.p_value_x2, std::erfc(std::sqrt(x2 / 2)), 1e-12);
}

TEST(Statistics, DegenerateFitIsRejected) {
  const auto t = two_by_two();
  const ContingencyTable bad(t.variables(), {0, 50, 25, 25});
  EXPECT_THROW(pearson_x2(t, bad), NumericError);
  EXPECT_THROW(g2(t, bad), NumericError);
  const ContingencyTable other({{"r", {"a", "b"}}, {"c", {"c0", "c1"}}}, {1, 1, 1, 1});
  EXPECT_THROW(pearson_x2(t, other), InputError);
}

TEST(DegreesOfFreedom, StructuralCounts) {
  const std::map<Label, std::size_t> lv{{"a", 2}, {"b", 3}, {"c", 4}};
  EXPECT_EQ(degrees_of_freedom(lv, std::vector<VertexSet>{{"a"}, {"b"}, {"c"}}), 24 - 1 - 1 - 2 - 3);
  EXPECT_EQ(degrees_of_freedom(lv, std::vector<VertexSet>{{"a", "b", "c"}}), 0);
  EXPECT_EQ(degrees_of_freedom(lv, std::vector<VertexSet>{{"a", "b"}, {"b", "c"}}), (2 - 1) * (4 - 1) * 3);
  EXPECT_THROW(degrees_of_freedom(lv, std::vector<VertexSet>{{"z"}}), InputError);
}

TEST(Reinis, DecomposableModel) {
  const auto fit = fit_decomposable(reinis(), fig2());
  EXPECT_NEAR(fit.x2, 51.11705, 1e-4);
  EXPECT_NEAR(fit.g2, 51.35869, 1e-4);
  EXPECT_EQ(fit.df, 46);
}

TEST(Reinis, IpfNonDecomposableModel) {
  const auto g = fig3();
  const auto gens = enumerate_maximal_cliques(g);
  const auto fit = fit_ipf(reinis(), gens);
  EXPECT_TRUE(fit.converged);
  EXPECT_LE(fit.iterations, 50);
  EXPECT_NEAR(fit.x2, 61.87653, 1e-2);
  EXPECT_NEAR(fit.g2, 62.84262, 1e-2);
  EXPECT_EQ(fit.df, 49);
  EXPECT_THROW(fit_decomposable(reinis(), g), InputError);
}

TEST(Reinis, MutualIndependenceFit) {
  const std::vector<VertexSet> blocks{{"systol"}, {"phys"}, {"family"}};
  const auto fit = fit_mcip(reinis(), blocks, {"protein", "smoke", "mental"});
  EXPECT_NEAR(fit.x2, 35.01, 1e-2);
  EXPECT_EQ(fit.df, 32);
}

TEST(FitMcip, MatchesNestedLoopFormula) {
  std::mt19937_64 rng(41);
  const std::vector<VertexSet> blocks{{"v0"}, {"v1"}, {"v2"}};
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_table({2, 2, 2, 2}, rng, 0, 12);
    const auto fit = fit_mcip(t, blocks, {"v3"});
    const auto expect = brute_three_block_fit(t);
    for (std::size_t c = 0; c < 16; ++c) ASSERT_NEAR(fit.fitted.counts()[c], expect[c], 1e-9);
  }
}

TEST(FitMcip, ValidatesPartition) {
  const auto t = two_by_two();
  const std::vector<VertexSet> one{{"r"}};
  EXPECT_THROW(fit_mcip(t, one, {"c"}), InputError);
  const std::vector<VertexSet> overlap{{"r"}, {"r"}};
  EXPECT_THROW(fit_mcip(t, overlap, {"c"}), InputError);
  const std::vector<VertexSet> missing{{"r"}, {"c"}};
  const ContingencyTable t3({{"r", {"a", "b"}}, {"c", {"a", "b"}}, {"z", {"a", "b"}}}, std::vector<double>(8, 1));
  EXPECT_THROW(fit_mcip(t3, missing, {}), InputError);
}

TEST(FitInvariants, MarginalsAndTotalArePreserved) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = random_table({2, 3, 2, 2, 3}, rng);
    const std::vector<VertexSet> blocks{{"v0", "v1"}, {"v2"}, {"v4"}};
    const auto fit = fit_mcip(t, blocks, {"v3"});
    EXPECT_NEAR(fit.fitted.total(), t.total(), 1e-9);
    for (const auto& b : blocks) {
      VertexSet keep = b;
      keep.push_back("v3");
      const auto o = marginal(t, keep).counts();
      const auto f = marginal(fit.fitted, keep).counts();
      for (std::size_t i = 0; i < o.size(); ++i) ASSERT_NEAR(o[i], f[i], 1e-9);
    }
    for (double x : fit.fitted.counts()) ASSERT_GE(x, 0.0);
  }
}

TEST(FitMcip, EqualsDecomposableFitOnStarGraph) {
  // Blocks are pairwise non-adjacent, each fully joined to the given set.
  std::mt19937_64 rng(47);
  const UndirectedGraph star({"v0", "v1", "v2", "v3", "v4"},
                             {{"v0", "v1"}, {"v0", "v4"}, {"v1", "v4"}, {"v2", "v4"}, {"v3", "v4"}});
  const std::vector<VertexSet> blocks{{"v0", "v1"}, {"v2"}, {"v3"}};
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = random_table({2, 2, 3, 2, 2}, rng);
    const auto a = fit_mcip(t, blocks, {"v4"});
    const auto b = fit_decomposable(t, star);
    EXPECT_EQ(a.df, b.df);
    for (std::size_t c = 0; c < t.size(); ++c) ASSERT_NEAR(a.fitted.counts()[c], b.fitted.counts()[c], 1e-9);
  }
}

TEST(FitIpf, AgreesWithClosedFormOnDecomposableGraphs) {
  std::mt19937_64 rng(53);
  int chordal = 0;
  for (int trial = 0; trial < 60 && chordal < 20; ++trial) {
    const auto g = random_graph(5, 0.5, rng);
    if (!is_decomposable(g).decomposable) continue;
    ++chordal;
    const auto t = random_table({2, 3, 2, 2, 2}, rng, 1, 30);
    const auto closed = fit_decomposable(t, g);
    IpfOptions opts;
    opts.tol = 1e-10;
    const auto ipf = fit_ipf(t, enumerate_maximal_cliques(g), opts);
    ASSERT_TRUE(ipf.converged);
    EXPECT_EQ(closed.df, ipf.df);
    for (std::size_t c = 0; c < t.size(); ++c) ASSERT_NEAR(closed.fitted.counts()[c], ipf.fitted.counts()[c], 1e-6);
  }
  EXPECT_GE(chordal, 10);
}

TEST(FitIpf, DevianceIsNonIncreasingAcrossCycles) {
  const auto t = reinis();
  const auto gens = enumerate_maximal_cliques(fig3());
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 10; ++k) {
    IpfOptions opts;
    opts.tol = 0.0;
    opts.max_iter = k;
    const auto fit = fit_ipf(t, gens, opts);
    EXPECT_EQ(fit.iterations, k);
    EXPECT_FALSE(fit.converged);
    EXPECT_LE(fit.g2, prev + 1e-9);
    prev = fit.g2;
  }
}

TEST(FitIpf, NonConvergenceIsReported) {
  IpfOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-14;
  const auto fit = fit_ipf(reinis(), enumerate_maximal_cliques(fig3()), opts);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.iterations, 1);
  EXPECT_GT(fit.max_discrepancy, 1e-14);
}

TEST(FitSaturated, HasZeroDfAndReproducesData) {
  const auto t = reinis();
  const auto fit = fit_decomposable(t, UndirectedGraph::complete(t.variable_names()));
  EXPECT_EQ(fit.df, 0);
  EXPECT_EQ(fit.p_value_x2, 1.0);
  EXPECT_NEAR(fit.x2, 0.0, 1e-9);
}

}  // namespace
