// Command-line front end for the mcip library.
//
// Exit codes: 0 success, 1 input error, 2 numeric or convergence failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcip/mcip.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;

#ifndef MCIP_DEFAULT_FIXTURES
#define MCIP_DEFAULT_FIXTURES "fixtures"
#endif

// Paths that do not exist as given are looked up in $MCIP_FIXTURES, then in
// the bundled fixture directory.
std::string resolve(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* env = std::getenv("MCIP_FIXTURES"); env && *env) {
    const auto p = fs::path(env) / path;
    if (fs::exists(p)) return p.string();
  }
  const auto p = fs::path(MCIP_DEFAULT_FIXTURES) / path;
  if (fs::exists(p)) return p.string();
  return path;
}

mcip::VertexSet split_list(const std::string& s, char sep = ',') {
  mcip::VertexSet out;
  if (s.empty()) return out;
  for (auto& item : mcip::io::detail::split(s, sep)) {
    if (item.empty()) throw mcip::InputError("empty item in list '" + s + "'");
    out.push_back(std::move(item));
  }
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

json statements_json(const std::vector<std::string>& lines) { return json{{"statements", lines}}; }

json fit_json(const std::string& model, const mcip::FitResult& r, bool with_fitted) {
  json j{{"model", model},
         {"x2", r.x2},
         {"g2", r.g2},
         {"df", r.df},
         {"p_value_x2", r.p_value_x2},
         {"p_value_g2", r.p_value_g2},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"max_discrepancy", r.max_discrepancy}};
  if (with_fitted) {
    json cells = json::array();
    const auto& t = r.fitted;
    for (std::size_t c = 0; c < t.size(); ++c) {
      json cell = json::object();
      for (std::size_t a = 0; a < t.variables().size(); ++a)
        cell[t.variables()[a].name] = t.variables()[a].levels[t.shape().coordinate(c, a)];
      cell["fitted"] = t.counts()[c];
      cells.push_back(std::move(cell));
    }
    j["fitted"] = std::move(cells);
  }
  return j;
}

void print_fit(const std::string& model, const mcip::FitResult& r, bool with_fitted) {
  using mcip::io::format_number;
  std::cout << "model: " << model << '\n'
            << "X2: " << format_number(r.x2, 5) << '\n'
            << "G2: " << format_number(r.g2, 5) << '\n'
            << "df: " << r.df << '\n'
            << "p-value (X2): " << format_number(r.p_value_x2, 6) << '\n'
            << "p-value (G2): " << format_number(r.p_value_g2, 6) << '\n'
            << "iterations: " << r.iterations << '\n'
            << "converged: " << (r.converged ? "true" : "false") << '\n';
  if (with_fitted) std::cout << '\n' << mcip::io::format_table_csv(r.fitted);
}

json citest_json(const std::string& u, const std::string& v, const mcip::VertexSet& given,
                 const mcip::GaussianCITestResult& r) {
  return json{{"u", u},
              {"v", v},
              {"given", given},
              {"statistic", r.statistic},
              {"df", r.df},
              {"p_value", r.p_value},
              {"partial_correlation", r.partial_correlation}};
}

void print_citest(const std::string& u, const std::string& v, const mcip::VertexSet& given,
                  const mcip::GaussianCITestResult& r) {
  using mcip::io::format_number;
  std::cout << "test: " << u << " _||_ " << v;
  if (!given.empty()) std::cout << " | " << mcip::detail::join(given);
  std::cout << '\n'
            << "statistic: " << format_number(r.statistic, 4) << "  df: " << r.df
            << "  p-value: " << format_number(r.p_value, 4)
            << "  partial correlation: " << format_number(r.partial_correlation, 6) << '\n';
}

mcip::DataMatrix load_data(const std::string& path) {
  std::vector<std::string> warnings;
  auto d = mcip::io::parse_data_csv(mcip::io::read_file(resolve(path)), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutual conditional independence tools for Markov networks"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "Emit machine-readable JSON");

  // amis
  std::string graph_file;
  auto* amis = app.add_subcommand("amis", "List all maximal independent sets of a graph");
  amis->add_option("graph", graph_file, "Graph file")->required();

  // reconstruct
  std::string amis_file;
  auto* recon = app.add_subcommand("reconstruct", "Rebuild a graph from its maximal independent sets");
  recon->add_option("amis", amis_file, "Set family file (one comma-separated set per line)")->required();

  // relations
  std::string kind = "pairwise";
  auto* rel = app.add_subcommand("relations", "Generate Markov-property or MCIP statements");
  rel->add_option("graph", graph_file, "Graph file")->required();
  rel->add_option("--kind", kind, "pairwise | local | mcip | pairwise-from-mcip")
      ->check(CLI::IsMember({"pairwise", "local", "mcip", "pairwise-from-mcip"}));

  // fit
  std::string table_file, model = "decomposable", fit_graph, blocks_arg, given_arg, generators_arg;
  double tol = 1e-8;
  int max_iter = 1000;
  bool show_fitted = false;
  auto* fit = app.add_subcommand("fit", "Fit a log-linear model to a contingency table");
  fit->add_option("table", table_file, "Long-form table CSV")->required();
  fit->add_option("--model", model, "mcip | decomposable | ipf")
      ->check(CLI::IsMember({"mcip", "decomposable", "ipf"}));
  fit->add_option("--graph", fit_graph, "Graph file (decomposable, ipf)");
  fit->add_option("--blocks", blocks_arg, "Mutually independent blocks, comma-separated; join variables of one block with '+'");
  fit->add_option("--given", given_arg, "Conditioning variables, comma-separated");
  fit->add_option("--generators", generators_arg, "IPF generators, e.g. 'a,b;b,c'");
  fit->add_option("--tol", tol, "IPF tolerance on marginal discrepancy");
  fit->add_option("--max-iter", max_iter, "IPF cycle limit");
  fit->add_flag("--show-fitted", show_fitted, "Print the fitted table");

  // citest
  std::string data_file, pair_arg;
  auto* citest = app.add_subcommand("citest", "Gaussian conditional independence test for one pair");
  citest->add_option("data", data_file, "Numeric data CSV")->required();
  citest->add_option("--pair", pair_arg, "u,v")->required();
  citest->add_option("--given", given_arg, "Conditioning variables, comma-separated");

  // mcip-check
  double alpha = 0.05;
  auto* mcheck = app.add_subcommand("mcip-check", "Pairwise Gaussian tests for a mutual independence claim");
  mcheck->add_option("data", data_file, "Numeric data CSV")->required();
  mcheck->add_option("--blocks", blocks_arg, "Variables claimed mutually independent")->required();
  mcheck->add_option("--given", given_arg, "Conditioning variables, comma-separated");
  mcheck->add_option("--alpha", alpha, "Test level");

  // oracle-verify
  mcip::OracleVerifyOptions ov;
  auto* oracle = app.add_subcommand("oracle-verify", "Check MCIP and Markov properties on exact random networks");
  oracle->add_option("--graphs", ov.graphs, "Number of random graphs");
  oracle->add_option("--max-vertices", ov.max_vertices, "Largest graph size");
  oracle->add_option("--seed", ov.seed, "Random seed");
  oracle->add_option("--tol", ov.tol, "Per-cell tolerance");
  oracle->add_flag("--inject-coupling", ov.inject_coupling, "Negative control: break every table on purpose");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*amis) {
      const auto g = mcip::io::parse_graph(mcip::io::read_file(resolve(graph_file)));
      const auto sets = mcip::enumerate_maximal_independent_sets(g);
      if (as_json) emit(json{{"amis", sets}});
      else std::cout << mcip::io::format_families(sets);
      return kExitOk;
    }

    if (*recon) {
      const auto families = mcip::io::parse_families(mcip::io::read_file(resolve(amis_file)));
      const auto g = mcip::reconstruct_from_amis(families);
      if (as_json) emit(mcip::io::graph_to_json(g));
      else std::cout << mcip::io::format_graph(g);
      return kExitOk;
    }

    if (*rel) {
      const auto g = mcip::io::parse_graph(mcip::io::read_file(resolve(graph_file)));
      std::vector<std::string> lines;
      if (kind == "mcip") {
        for (const auto& m : mcip::mcip_relations(g)) lines.push_back(m.to_string());
        std::size_t singletons = 0;
        for (const auto& s : mcip::enumerate_maximal_independent_sets(g)) singletons += s.size() == 1;
        if (singletons)
          std::cerr << "note: " << singletons << " singleton maximal independent set(s) carry no mutual statement\n";
      } else {
        const auto set = kind == "pairwise" ? mcip::pairwise_relations(g)
                         : kind == "local"  ? mcip::local_relations(g)
                                            : mcip::pairwise_from_mcip(g);
        for (const auto& s : set) lines.push_back(s.to_string());
      }
      if (as_json) emit(statements_json(lines));
      else
        for (const auto& l : lines) std::cout << l << '\n';
      return kExitOk;
    }

    if (*fit) {
      const auto t = mcip::io::parse_table_csv(mcip::io::read_file(resolve(table_file)));
      mcip::FitResult r = [&] {
        if (model == "mcip") {
          if (blocks_arg.empty()) throw mcip::InputError("--model mcip needs --blocks");
          std::vector<mcip::VertexSet> blocks;
          for (const auto& b : split_list(blocks_arg)) blocks.push_back(split_list(b, '+'));
          return mcip::fit_mcip(t, blocks, split_list(given_arg));
        }
        if (model == "decomposable") {
          if (fit_graph.empty()) throw mcip::InputError("--model decomposable needs --graph");
          return mcip::fit_decomposable(t, mcip::io::parse_graph(mcip::io::read_file(resolve(fit_graph))));
        }
        std::vector<mcip::VertexSet> gens;
        if (!generators_arg.empty()) {
          for (const auto& g : split_list(generators_arg, ';')) gens.push_back(split_list(g));
        } else if (!fit_graph.empty()) {
          gens = mcip::enumerate_maximal_cliques(mcip::io::parse_graph(mcip::io::read_file(resolve(fit_graph))));
        } else {
          throw mcip::InputError("--model ipf needs --graph or --generators");
        }
        return mcip::fit_ipf(t, gens, {tol, max_iter});
      }();
      if (as_json) emit(fit_json(model, r, show_fitted));
      else print_fit(model, r, show_fitted);
      if (!r.converged) {
        std::cerr << "error: IPF did not converge within " << r.iterations << " cycles\n";
        return kExitNumeric;
      }
      return kExitOk;
    }

    if (*citest) {
      const auto d = load_data(data_file);
      const auto pair = split_list(pair_arg);
      if (pair.size() != 2) throw mcip::InputError("--pair needs exactly two variables");
      const auto given = split_list(given_arg);
      const auto r = mcip::ci_test_gaussian(d, pair[0], pair[1], given);
      if (as_json) emit(citest_json(pair[0], pair[1], given, r));
      else print_citest(pair[0], pair[1], given, r);
      return kExitOk;
    }

    if (*mcheck) {
      const auto d = load_data(data_file);
      const auto rep = mcip::mcip_gaussian_check(d, split_list(blocks_arg), split_list(given_arg), alpha);
      if (as_json) {
        json tests = json::array();
        for (const auto& t : rep.tests) tests.push_back(citest_json(t.u, t.v, rep.given, t.result));
        emit(json{{"blocks", rep.blocks},
                  {"given", rep.given},
                  {"alpha", rep.alpha},
                  {"tests", tests},
                  {"mcip_consistent", rep.mcip_consistent},
                  {"rationale", rep.rationale}});
      } else {
        for (const auto& t : rep.tests) print_citest(t.u, t.v, rep.given, t.result);
        std::cout << "verdict: " << (rep.mcip_consistent ? "MCIP-consistent" : "not MCIP-consistent") << '\n'
                  << "reason: " << rep.rationale << '\n';
      }
      return kExitOk;
    }

    if (*oracle) {
      const auto rep = mcip::verify_markov_ensemble(ov);
      auto tally = [](const mcip::CheckTally& t) { return json{{"checked", t.checked}, {"failed", t.failed}}; };
      if (as_json) {
        emit(json{{"graphs", rep.graphs},
                  {"mcip", tally(rep.mcip)},
                  {"weak_union", tally(rep.weak_union)},
                  {"pairwise", tally(rep.pairwise)},
                  {"local", tally(rep.local)},
                  {"global", tally(rep.global)},
                  {"failures", rep.failures},
                  {"passed", rep.passed()}});
      } else {
        auto line = [](const char* name, const mcip::CheckTally& t) {
          std::cout << name << ": " << t.checked - t.failed << "/" << t.checked << " hold\n";
        };
        std::cout << "graphs: " << rep.graphs << '\n';
        line("mcip", rep.mcip);
        line("weak-union", rep.weak_union);
        line("pairwise", rep.pairwise);
        line("local", rep.local);
        line("global", rep.global);
        const std::size_t shown = std::min<std::size_t>(rep.failures.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) std::cout << "FAIL " << rep.failures[i] << '\n';
        if (rep.failures.size() > shown) std::cout << "... " << rep.failures.size() - shown << " more failures\n";
        std::cout << (rep.passed() ? "result: PASS" : "result: FAIL") << '\n';
      }
      return rep.passed() ? kExitOk : kExitNumeric;
    }
  } catch (const mcip::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const mcip::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitInput;
}
