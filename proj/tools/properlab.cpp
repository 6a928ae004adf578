// properlab: solve, certify and stress finite distribution-fixed learning
// problems from the command line.
//
// Exit codes: 0 ok / 1 parse / 2 invariant / 3 solver or failed property /
// 4 problem-solution mismatch.

#include "properlab/corpus.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitSolver = 3;
constexpr int kExitMismatch = 4;

std::int64_t default_cap() {
  if (const char* env = std::getenv("PROPERLAB_CAP")) {
    try {
      return std::stoll(env);
    } catch (...) {
      std::cerr << "warning: ignoring unparsable PROPERLAB_CAP\n";
    }
  }
  return properlab::kDefaultEnumerationCap;
}

int run_validate(const std::string& path) {
  properlab::ProblemFile file = properlab::load_problem(path);
  std::cout << "ok " << file.hash << " (|X|=" << file.problem.num_points()
            << " |Y|=" << file.problem.num_labels() << " |H|=" << file.problem.num_hypotheses()
            << " marginals=" << file.marginals.size() << ")\n";
  return kExitOk;
}

const properlab::Marginal& pick_marginal(const properlab::ProblemFile& file,
                                         const std::string& name) {
  auto it = file.marginals.find(name);
  if (it == file.marginals.end())
    throw properlab::ParseError("problem file has no marginal named '" + name + "'");
  return it->second;
}

int run_solve(const std::string& problem_path, const std::string& marginal_name, int n,
              const std::string& method, double tol, std::int64_t cap,
              const std::string& out_path) {
  properlab::ProblemFile file = properlab::load_problem(problem_path);
  const properlab::Marginal& marg = pick_marginal(file, marginal_name);

  properlab::SolverConfig cfg;
  cfg.method = method == "mw" ? properlab::SolveMethod::MultiplicativeWeights
                              : properlab::SolveMethod::ExactLp;
  cfg.tolerance = tol;
  cfg.enumeration_cap = cap;

  properlab::GameSolution sol = properlab::solve_game(file.problem, marg, n, cfg);
  sol.marginal_name = marginal_name;
  properlab::save_solution({sol, file.hash}, out_path);
  std::cout << "value " << properlab::format_rational(sol.value) << " gap "
            << properlab::format_rational(sol.duality_gap) << " -> " << out_path << "\n";
  if (!sol.converged) {
    std::cerr << "solver did not reach the requested gap\n";
    return kExitSolver;
  }
  return kExitOk;
}

int run_certify(const std::string& problem_path, const std::string& solution_path,
                const std::string& out_path, std::uint64_t seed, std::int64_t cap,
                long learner_budget, long search_budget) {
  properlab::ProblemFile file = properlab::load_problem(problem_path);
  properlab::SolutionFile sol_file = properlab::load_solution(solution_path);
  if (sol_file.problem_hash != file.hash)
    throw properlab::HashMismatch(file.hash, sol_file.problem_hash);
  const properlab::Marginal& marg = pick_marginal(file, sol_file.solution.marginal_name);

  properlab::CertifyOptions opts;
  opts.seed = seed;
  opts.solver.enumeration_cap = cap;
  opts.oracle_budget.max_learners = learner_budget;
  opts.oracle_budget.max_samples = cap;
  opts.search_budget = search_budget;

  properlab::CertifyResult result = properlab::certify_instance(
      "certify", file.problem, marg, sol_file.solution.n, sol_file.solution, opts);

  if (out_path.empty()) {
    std::cout << properlab::csv_header() << "\n";
    for (const auto& row : result.rows) std::cout << properlab::to_csv_line(row) << "\n";
  } else {
    properlab::write_csv(result.rows, out_path);
    std::cout << (result.mandatory_pass ? "pass" : "FAIL") << " -> " << out_path << "\n";
  }
  return result.mandatory_pass ? kExitOk : kExitSolver;
}

int run_corpus(std::uint64_t seed, int count, const std::string& out_dir, int jobs,
               std::int64_t cap, long learner_budget) {
  properlab::CorpusSpec spec;
  spec.seed = seed;
  spec.count = count;

  properlab::CertifyOptions opts;
  opts.seed = seed;
  opts.solver.enumeration_cap = cap;
  opts.oracle_budget.max_learners = learner_budget;
  opts.oracle_budget.max_samples = cap;

  properlab::CorpusSummary summary = properlab::run_corpus(spec, out_dir, opts, jobs);
  std::cout << "instances " << summary.instances << " failures " << summary.mandatory_failures
            << " max_factor2_ratio " << properlab::format_rational(summary.max_factor2_ratio)
            << " max_factor_e_ratio " << summary.max_factor_e_ratio << "\n";
  return summary.mandatory_failures == 0 ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimax-optimal distribution-fixed learners for finite problems"};
  app.require_subcommand(1);

  std::string problem_path, solution_path, marginal_name = "uniform", method = "exact";
  std::string out_path;
  int n = 1, count = 50, jobs = 1;
  double tol = 1e-6;
  std::uint64_t seed = 7;
  std::int64_t cap = default_cap();
  long learner_budget = 1'000'000, search_budget = 150;

  auto* validate = app.add_subcommand("validate", "check a problem file against all invariants");
  validate->add_option("problem", problem_path, "problem JSON file")->required();

  auto* solve = app.add_subcommand("solve", "solve the zero-sum learning game");
  solve->add_option("problem", problem_path)->required();
  solve->add_option("--marginal", marginal_name, "named marginal to fix");
  solve->add_option("--n", n, "training sample size");
  solve->add_option("--method", method)->check(CLI::IsMember({"exact", "mw"}));
  solve->add_option("--tol", tol, "gap tolerance for the iterative method");
  solve->add_option("--cap", cap, "enumeration cap");
  solve->add_option("--out", out_path, "solution output path")->required();

  auto* certify = app.add_subcommand("certify", "re-derive and check every certified property");
  certify->add_option("problem", problem_path)->required();
  certify->add_option("solution", solution_path)->required();
  certify->add_option("--out", out_path, "report CSV path (default: stdout)");
  certify->add_option("--seed", seed);
  certify->add_option("--cap", cap);
  certify->add_option("--budget", learner_budget, "oracle learner budget");
  certify->add_option("--search-budget", search_budget, "prior search evaluations");

  auto* corpus = app.add_subcommand("corpus", "generate, solve and certify a random corpus");
  corpus->add_option("--seed", seed);
  corpus->add_option("--count", count);
  corpus->add_option("--out", out_path, "output directory")->required();
  corpus->add_option("--jobs", jobs, "parallel instance workers");
  corpus->add_option("--cap", cap);
  corpus->add_option("--budget", learner_budget, "oracle learner budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(problem_path);
    if (solve->parsed()) return run_solve(problem_path, marginal_name, n, method, tol, cap, out_path);
    if (certify->parsed())
      return run_certify(problem_path, solution_path, out_path, seed, cap, learner_budget,
                         search_budget);
    if (corpus->parsed()) return run_corpus(seed, count, out_path, jobs, cap, learner_budget);
  } catch (const properlab::HashMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const properlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const properlab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
