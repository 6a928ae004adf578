#pragma once

#include "properlab/io.hpp"
#include "properlab/reductions.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace properlab {

struct CorpusSpec {
  int count = 50;
  std::uint64_t seed = 7;
  int min_points = 2, max_points = 4;
  int min_labels = 2, max_labels = 3;
  int min_hypotheses = 2, max_hypotheses = 6;
  int min_n = 1, max_n = 3;
  bool random_marginals = true;  // otherwise uniform only
};

struct GeneratedInstance {
  std::string id;
  ProblemFile file;
  std::string marginal_name;
  int n = 1;
};

// Deterministic in (seed, index); every generated problem passes validation.
inline GeneratedInstance generate_instance(const CorpusSpec& spec, int index) {
  Rng rng = derived_rng(spec.seed, 0x636f7270ull + static_cast<std::uint64_t>(index));
  auto draw = [&](int lo, int hi) { return lo + static_cast<int>(rng.below(hi - lo + 1)); };

  GeneratedInstance inst;
  char buf[16];
  std::snprintf(buf, sizeof buf, "inst_%03d", index);
  inst.id = buf;

  FiniteProblem& p = inst.file.problem;
  const int nx = draw(spec.min_points, spec.max_points);
  const int ny = draw(spec.min_labels, spec.max_labels);
  for (int x = 0; x < nx; ++x) p.domain.push_back("x" + std::to_string(x + 1));
  for (int y = 0; y < ny; ++y) p.labels.push_back(std::to_string(y));

  int table_size = 1;
  for (int x = 0; x < nx; ++x) table_size *= ny;
  const int max_h = std::min(spec.max_hypotheses, table_size);
  const int nh = draw(std::min(spec.min_hypotheses, max_h), max_h);
  std::set<std::vector<int>> seen;
  while (static_cast<int>(p.hypotheses.size()) < nh) {
    std::vector<int> row(nx);
    for (int x = 0; x < nx; ++x) row[x] = static_cast<int>(rng.below(ny));
    if (seen.insert(row).second) p.hypotheses.push_back(std::move(row));
  }

  if (rng.below(2) == 0) {
    p.loss = FiniteProblem::zero_one_loss(ny);
  } else {
    // Random rational metric, denominators <= 20, rejection on the triangle
    // inequality (vacuous for two labels).
    for (;;) {
      p.loss.assign(ny, std::vector<Rat>(ny, Rat(0)));
      for (int a = 0; a < ny; ++a)
        for (int b = a + 1; b < ny; ++b) {
          Rat d(static_cast<long>(rng.below(20)) + 1, 20);
          p.loss[a][b] = d;
          p.loss[b][a] = d;
        }
      bool metric = true;
      for (int a = 0; a < ny && metric; ++a)
        for (int b = 0; b < ny && metric; ++b)
          for (int c = 0; c < ny && metric; ++c)
            if (p.loss[a][c] > p.loss[a][b] + p.loss[b][c]) metric = false;
      if (metric) break;
    }
  }

  Marginal marg;
  if (spec.random_marginals && rng.below(2) == 0) {
    // Twenty unit lumps dropped on the points: weights k/20.
    std::vector<int> lumps(nx, 0);
    for (int i = 0; i < 20; ++i) ++lumps[rng.below(nx)];
    marg.weights.resize(nx);
    for (int x = 0; x < nx; ++x) marg.weights[x] = Rat(lumps[x], 20);
  } else {
    marg = Marginal::uniform(nx);
  }
  inst.marginal_name = "train";
  inst.file.marginals["train"] = marg;
  inst.n = draw(spec.min_n, spec.max_n);

  validate_problem(p);
  validate_marginal(marg, p);
  inst.file.hash = problem_hash(p);
  return inst;
}

struct CertifyOptions {
  OracleBudget oracle_budget;
  SolverConfig solver;
  long search_budget = 150;
  std::uint64_t seed = 1;
  int numeric_srm_pairs = 10;
  bool with_mw = true;
  bool with_monotonicity = true;
};

struct CertifyResult {
  std::vector<CsvRow> rows;
  bool mandatory_pass = true;
  bool oracle_feasible = false;
  Rat factor2_best;
  Rat game_value;
  double factor_e_max_ratio = 0.0;  // B error / (e * expected error), 0/0 -> 0
};

namespace detail {

inline std::string verdict(bool ok) { return ok ? "pass" : "fail"; }

inline std::string rat_str(const Rat& r) { return format_rational(r); }

inline std::string dbl_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline RandomizedHypothesis random_interior_prior(Rng& rng, int nh) {
  RandomizedHypothesis q{std::vector<Rat>(nh)};
  Rat total = 0;
  for (int h = 0; h < nh; ++h) {
    q.weights[h] = Rat(static_cast<long>(rng.below(499)) + 1);
    total += q.weights[h];
  }
  for (int h = 0; h < nh; ++h) q.weights[h] /= total;
  return q;
}

}  // namespace detail

// Certifies one solved instance against every recomputable claim. Gating
// rows decide mandatory_pass; mixture and monotonicity rows are reported
// observations and never gate.
inline CertifyResult certify_instance(const std::string& id, const FiniteProblem& p,
                                      const Marginal& marg, int n, const GameSolution& sol,
                                      const CertifyOptions& opts = {}) {
  CertifyResult out;
  out.game_value = sol.value;
  auto gate = [&](CsvRow row, bool ok) {
    row.verdict = detail::verdict(ok);
    out.rows.push_back(std::move(row));
    if (!ok) out.mandatory_pass = false;
  };
  auto observe = [&](CsvRow row) { out.rows.push_back(std::move(row)); };

  const int nh = p.num_hypotheses();
  SampleSpace space = SampleSpace::build(p, marg, n, opts.solver.enumeration_cap);

  // --- game value sanity and best-response consistency ------------------
  gate({id, "value_in_unit_interval", detail::rat_str(sol.value), "[0,1]", "", ""},
       sol.value >= 0 && sol.value <= 1);
  const Rat prior_value = best_response_value(sol.adversary_prior, space, marg, p);
  gate({id, "prior_attains_value", detail::rat_str(prior_value), detail::rat_str(sol.value), "",
        ""},
       prior_value == sol.value);

  // --- oracle cross-check (when the learner space is enumerable) --------
  Int learners = count_deterministic_learners(space, p);
  out.oracle_feasible = learners <= opts.oracle_budget.max_learners;
  if (out.oracle_feasible) {
    CrossCheckReport cc = cross_check(p, marg, n, opts.oracle_budget, opts.solver);
    gate({id, "oracle_value_match", detail::rat_str(cc.solver_value),
          detail::rat_str(cc.oracle_value), "", ""},
         cc.value_matches && cc.solver_value == sol.value);
    gate({id, "oracle_no_learner_below_value", detail::rat_str(cc.deterministic_minimax),
          detail::rat_str(cc.oracle_value), "", ""},
         cc.no_learner_below_value);
    gate({id, "oracle_lp_duality", detail::rat_str(cc.oracle_value),
          detail::rat_str(cc.oracle_value), "", ""},
         cc.duality_holds);
  } else {
    observe({id, "oracle_value_match", learners.str(),
             opts.oracle_budget.max_learners.str(), "", "infeasible"});
  }

  // --- iterative solver agreement ---------------------------------------
  if (opts.with_mw) {
    SolverConfig mw_cfg = opts.solver;
    mw_cfg.method = SolveMethod::MultiplicativeWeights;
    GameSolution mw = solve_game_mw(p, marg, n, mw_cfg);
    Rat diff = abs(mw.value - sol.value);
    bool ok = mw.converged && diff <= Rat(1, 1000000);
    gate({id, "mw_value_agreement", detail::dbl_str(to_double(mw.value)),
          detail::rat_str(sol.value), detail::dbl_str(to_double(diff)), ""},
         ok);
  }

  // --- factor 2: a proper Bayesian within twice the game value ----------
  const Rat bound = 2 * sol.value + Rat(1, 1000000000);
  std::optional<Rat> bayes_wc;
  try {
    bayes_wc = evaluate_worstcase(build_proper_learner(sol), marg, n, p,
                                  opts.solver.enumeration_cap)
                   .max_error;
  } catch (const ZeroEvidence&) {
    // adversary prior missing support on some truth; fall back to search
  }
  std::string witness = "bayes_adversary_prior";
  std::optional<Rat> best = bayes_wc;
  if (!best || *best > bound) {
    PriorSearchResult search = search_proper_prior(p, marg, n, opts.search_budget, opts.seed,
                                                   opts.solver.enumeration_cap, &sol.value);
    if (!best || search.worst_case < *best) {
      best = search.worst_case;
      witness = "prior_search";
    }
  }
  out.factor2_best = *best;
  {
    CsvRow row{id, "factor2_proper_bayesian", detail::rat_str(*best),
               detail::rat_str(2 * sol.value), "", ""};
    if (sol.value != 0)
      row.ratio = detail::rat_str(*best / sol.value);
    else
      row.ratio = (*best == 0) ? "1" : "inf";
    gate(std::move(row), *best <= bound);
    observe({id, "factor2_witness", witness, "", "", "info"});
  }

  // --- properization: pointwise factor 2 --------------------------------
  {
    ProperizationReport rep = properization_bound_check(
        LearnerSpec::bayesian(RandomizedHypothesis::uniform(nh)), marg, n, p,
        opts.solver.enumeration_cap);
    gate({id, "properization_pointwise_factor2", detail::rat_str(rep.max_ratio), "2", "", ""},
         rep.holds);
  }

  // --- leave-one-out identity and transductive bound --------------------
  {
    bool identity = true, bounded = true;
    for (int truth = 0; truth < nh; ++truth) {
      LooReport rep = loo_bound_check(LearnerSpec::bayesian(RandomizedHypothesis::uniform(nh)),
                                      marg, truth, n, p, opts.solver.enumeration_cap);
      identity = identity && rep.identity_holds;
      bounded = bounded && rep.bound_holds;
    }
    gate({id, "loo_identity_exact", "", "", "", ""}, identity);
    gate({id, "loo_transductive_bound", "", "", "", ""}, bounded);
  }

  // --- factor e: the transductive learner built from the DF learner -----
  {
    LearnerSpec df = LearnerSpec::bayesian(RandomizedHypothesis::uniform(nh));
    const int m = n + 1;
    std::vector<int> support = marg.support();
    bool holds = true;
    double max_ratio = 0.0;
    // Both sides are symmetric in the point order, so multiset
    // representatives (nondecreasing sequences) cover every instance.
    std::vector<int> pts;
    auto visit = [&](auto&& self, std::size_t from) -> void {
      if (static_cast<int>(pts.size()) == m) {
        Marginal unif_sx{std::vector<Rat>(p.num_points(), Rat(0))};
        for (int x : pts) unif_sx.weights[x] += Rat(1, m);
        for (int truth = 0; truth < nh; ++truth) {
          Rat lhs = df_transductive_error_exact(df, {pts, truth}, p);
          Rat rhs = expected_error_exact(df, unif_sx, truth, m - 1, p,
                                         opts.solver.enumeration_cap);
          double l = to_double(lhs), r = std::numbers::e * to_double(rhs);
          if (l > r + 1e-12) holds = false;
          if (r > 0) max_ratio = std::max(max_ratio, l / r);
        }
        return;
      }
      for (std::size_t k = from; k < support.size(); ++k) {
        pts.push_back(support[k]);
        self(self, k);
        pts.pop_back();
      }
    };
    visit(visit, 0);
    out.factor_e_max_ratio = max_ratio;
    gate({id, "factor_e_transductive", detail::dbl_str(max_ratio), "1", "", ""}, holds);
  }

  // --- distributional SRM: closed form vs posterior, numeric mode -------
  {
    Rng rng = derived_rng(opts.seed, 0x73726dull);
    bool closed_ok = true;
    for (const auto& s : space.samples) {
      for (int rep = 0; rep < 2; ++rep) {
        RandomizedHypothesis prior = detail::random_interior_prior(rng, nh);
        if (distributional_srm(prior, s.labeled, p) != posterior(prior, s.labeled, p))
          closed_ok = false;
      }
    }
    gate({id, "srm_closed_form_is_posterior", "", "", "", ""}, closed_ok);

    double max_tv = 0.0;
    for (int rep = 0; rep < opts.numeric_srm_pairs; ++rep) {
      const auto& s = space.samples[rng.below(space.samples.size())];
      RandomizedHypothesis prior = detail::random_interior_prior(rng, nh);
      std::vector<double> numeric = distributional_srm_numeric(prior, s.labeled, p);
      RandomizedHypothesis exact = posterior(prior, s.labeled, p);
      double tv = 0.0;
      for (int h = 0; h < nh; ++h) tv += std::abs(numeric[h] - to_double(exact.weights[h]));
      max_tv = std::max(max_tv, tv / 2.0);
    }
    gate({id, "srm_numeric_total_variation", detail::dbl_str(max_tv), "1e-08", "", ""},
         max_tv <= 1e-8);
  }

  // --- mixtures of Bayesians --------------------------------------------
  {
    Rng rng = derived_rng(opts.seed, 0x6d6978ull);
    // A sample whose consistent set is a proper nonempty subset, if any.
    const SampleSpace::Sample* pick = nullptr;
    for (const auto& s : space.samples)
      if (static_cast<int>(space.groups[s.group].hset.size()) < nh) {
        pick = &s;
        break;
      }
    if (pick != nullptr) {
      bool equal_evidence_ok = true;
      std::string observed = "equal";
      for (int rep = 0; rep < 3; ++rep) {
        RandomizedHypothesis q1 = detail::random_interior_prior(rng, nh);
        RandomizedHypothesis q2 = detail::random_interior_prior(rng, nh);
        // Rescale q2 on and off the consistent set so both components put
        // the same mass on it; the mixture identity must then hold exactly.
        std::vector<int> cons = space.groups[pick->group].hset;
        Rat m1 = 0, m2 = 0;
        for (int h : cons) m1 += q1.weights[h];
        for (int h : cons) m2 += q2.weights[h];
        RandomizedHypothesis q2eq = q2;
        std::vector<char> in_cons(nh, 0);
        for (int h : cons) in_cons[h] = 1;
        for (int h = 0; h < nh; ++h)
          q2eq.weights[h] = in_cons[h] ? Rat(q2.weights[h] * m1 / m2)
                                       : Rat(q2.weights[h] * (1 - m1) / (1 - m2));
        auto eq = mix_bayesians_compare({q1, q2eq}, {Rat(1, 2), Rat(1, 2)}, pick->labeled, p);
        if (!eq.equal) equal_evidence_ok = false;
        auto raw = mix_bayesians_compare({q1, q2}, {Rat(1, 2), Rat(1, 2)}, pick->labeled, p);
        if (!raw.equal) observed = "unequal";
      }
      gate({id, "mixture_equal_evidence_identity", "", "", "", ""}, equal_evidence_ok);
      observe({id, "mixture_general_priors", observed, "", "", "observation"});
    }
  }

  // --- DF sample complexity vs the grid lower bound ----------------------
  {
    const int n_max = std::max(n, 3);
    auto value_sweep = [&](const Marginal& m) {
      std::vector<Rat> values;
      for (int i = 1; i <= n_max; ++i)
        values.push_back(i == n && &m == &marg ? sol.value
                                               : solve_game_exact(p, m, i, opts.solver).value);
      return values;
    };
    auto window_threshold = [&](const std::vector<Rat>& values,
                                const Rat& eps) -> std::optional<int> {
      int found = -1;
      for (int i = n_max; i >= 1; --i) {
        if (values[i - 1] <= eps)
          found = i;
        else
          break;
      }
      return found > 0 ? std::optional<int>(found) : std::nullopt;
    };

    std::vector<Rat> train_values = value_sweep(marg);
    std::optional<int> df = window_threshold(train_values, sol.value);
    Marginal unif = Marginal::uniform(p.num_points());
    std::optional<int> lower = df;
    if (marg.weights != unif.weights) {
      std::optional<int> df_unif = window_threshold(value_sweep(unif), sol.value);
      if (df && df_unif)
        lower = std::max(*df, *df_unif);
      else
        lower = std::nullopt;
    }
    // A classic learner must handle every grid marginal, so the grid maximum
    // lower-bounds the classic complexity and DF can never exceed it.
    bool violated = df.has_value() && lower.has_value() && *df > *lower;
    gate({id, "df_within_classic_grid_lower", df ? std::to_string(*df) : "NotFound",
          lower ? std::to_string(*lower) : "NotFound", "", ""},
         !violated);

    if (opts.with_monotonicity) {
      Rat next = solve_game_exact(p, marg, n + 1, opts.solver).value;
      observe({id, "value_monotone_in_n", detail::rat_str(next), detail::rat_str(sol.value), "",
               next <= sol.value ? "nonincreasing" : "increased"});
    }
  }

  return out;
}

struct CorpusSummary {
  int instances = 0;
  int mandatory_failures = 0;
  Rat max_factor2_ratio;  // over instances with positive value
  double max_factor_e_ratio = 0.0;
  std::vector<CsvRow> aggregate;
};

// Generates, solves and certifies `spec.count` instances under `out_dir`,
// one directory per instance, then writes an aggregate CSV. Instances are
// independent; `jobs` > 1 fans them out and the aggregate is assembled in
// index order, so outputs are byte-identical regardless of scheduling.
inline CorpusSummary run_corpus(const CorpusSpec& spec, const std::string& out_dir,
                                const CertifyOptions& opts = {}, int jobs = 1) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  struct PerInstance {
    GeneratedInstance inst;
    GameSolution sol;
    CertifyResult cert;
  };

  auto process = [&](int index) {
    PerInstance r;
    r.inst = generate_instance(spec, index);
    const FiniteProblem& p = r.inst.file.problem;
    const Marginal& marg = r.inst.file.marginals.at(r.inst.marginal_name);

    fs::path dir = fs::path(out_dir) / r.inst.id;
    fs::create_directories(dir);
    save_problem(r.inst.file, (dir / "problem.json").string());

    r.sol = solve_game_exact(p, marg, r.inst.n, opts.solver);
    r.sol.marginal_name = r.inst.marginal_name;
    save_solution({r.sol, r.inst.file.hash}, (dir / "solution.json").string());

    r.cert = certify_instance(r.inst.id, p, marg, r.inst.n, r.sol, opts);
    write_csv(r.cert.rows, (dir / "certify.csv").string());
    return r;
  };

  std::vector<PerInstance> results(spec.count);
  if (jobs <= 1) {
    for (int i = 0; i < spec.count; ++i) results[i] = process(i);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= spec.count) return;
        results[i] = process(i);
      }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CorpusSummary summary;
  summary.instances = spec.count;
  summary.max_factor2_ratio = 0;
  for (const auto& r : results) {
    if (!r.cert.mandatory_pass) ++summary.mandatory_failures;
    if (r.cert.game_value != 0) {
      Rat ratio = r.cert.factor2_best / r.cert.game_value;
      if (ratio > summary.max_factor2_ratio) summary.max_factor2_ratio = ratio;
    }
    summary.max_factor_e_ratio = std::max(summary.max_factor_e_ratio, r.cert.factor_e_max_ratio);
    const FiniteProblem& p = r.inst.file.problem;
    summary.aggregate.push_back(
        {r.inst.id, "instance",
         std::to_string(p.num_points()) + "x" + std::to_string(p.num_labels()) + "x" +
             std::to_string(p.num_hypotheses()) + "/n=" + std::to_string(r.inst.n),
         detail::rat_str(r.sol.value), "", r.cert.mandatory_pass ? "pass" : "fail"});
  }
  summary.aggregate.push_back({"corpus", "max_factor2_ratio",
                               detail::rat_str(summary.max_factor2_ratio), "2", "",
                               summary.max_factor2_ratio <= 2 ? "pass" : "fail"});
  summary.aggregate.push_back({"corpus", "max_factor_e_ratio",
                               detail::dbl_str(summary.max_factor_e_ratio), "1", "",
                               summary.max_factor_e_ratio <= 1.0 ? "pass" : "fail"});
  summary.aggregate.push_back({"corpus", "mandatory_failures",
                               std::to_string(summary.mandatory_failures), "0", "",
                               summary.mandatory_failures == 0 ? "pass" : "fail"});
  write_csv(summary.aggregate, (fs::path(out_dir) / "aggregate.csv").string());
  return summary;
}

}  // namespace properlab
