#pragma once

#include "properlab/evaluation.hpp"
#include "properlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace properlab {

// Realizable sample machinery for a fixed (problem, marginal, n).
//
// Samples sharing a consistent set contribute proportional terms to every
// prior's payoff, so they are pooled: each group carries the total sequence
// weight of its samples, and only (group, point) cells whose hypotheses
// disagree at the point can contribute a positive loss term.
struct SampleSpace {
  struct Sample {
    LabeledSample labeled;
    Rat weight;  // prod_i D(x_i)
    int group;
  };
  struct Group {
    std::vector<int> hset;  // consistent set, sorted
    Rat mass;               // total sequence weight of the group's samples
  };
  struct Cell {
    int group;
    int x;
  };

  int n = 0;
  std::vector<int> support;
  std::vector<Sample> samples;  // sorted by labeled sample, lexicographic
  std::vector<Group> groups;
  std::vector<Cell> cells;  // (group, x) with disagreement, D(x) > 0

  static SampleSpace build(const FiniteProblem& p, const Marginal& marg, int n,
                           std::int64_t cap = kDefaultEnumerationCap) {
    check_enumeration_cap(marg, n, cap);
    SampleSpace space;
    space.n = n;
    space.support = marg.support();

    std::map<std::vector<int>, int> group_index;
    struct Raw {
      LabeledSample labeled;
      Rat weight;
      std::vector<int> hset;
    };
    std::vector<Raw> raw;

    std::vector<int> seq;
    auto visit = [&](auto&& self) -> void {
      if (static_cast<int>(seq.size()) == n) {
        Rat w = 1;
        for (int x : seq) w *= marg.weights[x];
        // Partition H by its restriction to the sequence; each block is one
        // realizable sample whose consistent set is the block itself.
        std::map<std::vector<int>, std::vector<int>> blocks;
        for (int h = 0; h < p.num_hypotheses(); ++h) {
          std::vector<int> labeling(seq.size());
          for (std::size_t i = 0; i < seq.size(); ++i) labeling[i] = p.label_of(h, seq[i]);
          blocks[labeling].push_back(h);
        }
        for (auto& [labeling, hset] : blocks) {
          LabeledSample s;
          for (std::size_t i = 0; i < seq.size(); ++i) s.pairs.emplace_back(seq[i], labeling[i]);
          raw.push_back({std::move(s), w, hset});
        }
        return;
      }
      for (int x : space.support) {
        seq.push_back(x);
        self(self);
        seq.pop_back();
      }
    };
    visit(visit);

    std::sort(raw.begin(), raw.end(),
              [](const Raw& a, const Raw& b) { return a.labeled < b.labeled; });
    for (auto& r : raw) {
      auto [it, inserted] = group_index.try_emplace(r.hset, static_cast<int>(space.groups.size()));
      if (inserted) space.groups.push_back({r.hset, Rat(0)});
      space.groups[it->second].mass += r.weight;
      space.samples.push_back({std::move(r.labeled), std::move(r.weight), it->second});
    }

    for (int g = 0; g < static_cast<int>(space.groups.size()); ++g) {
      for (int x : space.support) {
        const auto& hs = space.groups[g].hset;
        bool disagree = false;
        for (std::size_t i = 1; i < hs.size(); ++i)
          if (p.label_of(hs[i], x) != p.label_of(hs[0], x)) {
            disagree = true;
            break;
          }
        if (disagree) space.cells.push_back({g, x});
      }
    }
    return space;
  }
};

enum class SolveMethod { ExactLp, MultiplicativeWeights };

inline const char* method_name(SolveMethod m) {
  return m == SolveMethod::ExactLp ? "exact_lp" : "multiplicative_weights";
}

struct SolverConfig {
  SolveMethod method = SolveMethod::ExactLp;
  double tolerance = 1e-6;          // primal-dual gap target, iterative mode
  long iteration_cap = 2'000'000;   // iterative mode
  std::int64_t enumeration_cap = kDefaultEnumerationCap;
};

struct GameSolution {
  Rat value;
  RandomizedHypothesis adversary_prior;
  SolveMethod method = SolveMethod::ExactLp;
  Rat duality_gap;  // exactly 0 in exact_lp mode
  bool converged = true;
  bool degenerate = false;
  int n = 0;
  std::string marginal_name;
};

namespace detail {

// Best-response prediction at (consistent set, point): the label minimizing
// sum_{h in C} lambda_h * loss(h(x), y), ties to the lowest label index.
inline int argmin_label(const std::vector<int>& hset, int x, const std::vector<Rat>& lambda,
                        const FiniteProblem& p) {
  int best = 0;
  Rat best_val;
  for (int y = 0; y < p.num_labels(); ++y) {
    Rat val = 0;
    for (int h : hset)
      if (lambda[h] != 0) val += lambda[h] * p.loss_at(p.label_of(h, x), y);
    if (y == 0 || val < best_val) {
      best = y;
      best_val = val;
    }
  }
  return best;
}

}  // namespace detail

// Exact value of the learner's best response to the prior:
//   sum over realizable S, x of D(x) * min_y E_{h ~ posterior} loss(h(x), y)
// weighted by the sample probability under the prior.
inline Rat best_response_value(const RandomizedHypothesis& prior, const SampleSpace& space,
                               const Marginal& marg, const FiniteProblem& p) {
  Rat total = 0;
  for (const auto& cell : space.cells) {
    const auto& group = space.groups[cell.group];
    Rat best;
    bool first = true;
    for (int y = 0; y < p.num_labels(); ++y) {
      Rat val = 0;
      for (int h : group.hset)
        if (prior.weights[h] != 0) val += prior.weights[h] * p.loss_at(p.label_of(h, cell.x), y);
      if (first || val < best) {
        best = val;
        first = false;
      }
    }
    if (best != 0) total += group.mass * marg.weights[cell.x] * best;
  }
  return total;
}

// Value plus the arg-min Table learner over all realizable samples.
inline std::pair<Rat, LearnerSpec> best_response(const RandomizedHypothesis& prior,
                                                 const Marginal& marg, int n,
                                                 const FiniteProblem& p,
                                                 std::int64_t cap = kDefaultEnumerationCap) {
  SampleSpace space = SampleSpace::build(p, marg, n, cap);
  Rat value = best_response_value(prior, space, marg, p);

  // Per group, the arg-min label at every point; samples in a group share it.
  std::vector<std::vector<int>> labels_per_group(space.groups.size(),
                                                 std::vector<int>(p.num_points()));
  for (std::size_t g = 0; g < space.groups.size(); ++g)
    for (int x = 0; x < p.num_points(); ++x)
      labels_per_group[g][x] = detail::argmin_label(space.groups[g].hset, x, prior.weights, p);

  std::map<LabeledSample, Predictor> table;
  for (const auto& s : space.samples)
    table.emplace(s.labeled,
                  Predictor::deterministic(labels_per_group[s.group], p.num_labels()));
  return {value, LearnerSpec::table_learner(std::move(table))};
}

// Maximizes the concave piecewise-linear best-response value over the prior
// simplex as an exact LP: variables lambda_h and one t per (group, point)
// cell, t <= sum_h lambda_h * mass * D(x) * loss(h(x), y) for every label y.
inline GameSolution solve_game_exact(const FiniteProblem& p, const Marginal& marg, int n,
                                     const SolverConfig& cfg) {
  SampleSpace space = SampleSpace::build(p, marg, n, cfg.enumeration_cap);
  const int nh = p.num_hypotheses();
  const int nc = static_cast<int>(space.cells.size());
  const int nvars = nh + nc;

  std::vector<lp::Constraint<Rat>> rows;
  for (int c = 0; c < nc; ++c) {
    const auto& cell = space.cells[c];
    const auto& group = space.groups[cell.group];
    const Rat scale = group.mass * marg.weights[cell.x];
    for (int y = 0; y < p.num_labels(); ++y) {
      lp::Constraint<Rat> row;
      row.coeffs.assign(nvars, Rat(0));
      row.coeffs[nh + c] = 1;
      for (int h : group.hset) row.coeffs[h] -= scale * p.loss_at(p.label_of(h, cell.x), y);
      row.sense = lp::Sense::LessEq;
      row.rhs = 0;
      rows.push_back(std::move(row));
    }
  }
  lp::Constraint<Rat> simplex_row;
  simplex_row.coeffs.assign(nvars, Rat(0));
  for (int h = 0; h < nh; ++h) simplex_row.coeffs[h] = 1;
  simplex_row.sense = lp::Sense::Eq;
  simplex_row.rhs = 1;
  rows.push_back(std::move(simplex_row));

  std::vector<Rat> objective(nvars, Rat(0));
  for (int c = 0; c < nc; ++c) objective[nh + c] = 1;

  lp::Result<Rat> lp_result = lp::maximize(objective, rows);
  if (lp_result.status != lp::Status::Optimal)
    throw std::logic_error("game LP must be feasible and bounded");

  GameSolution sol;
  sol.method = SolveMethod::ExactLp;
  sol.n = n;
  sol.value = lp_result.objective;
  sol.duality_gap = 0;
  sol.converged = true;
  sol.degenerate = lp_result.degenerate;
  sol.adversary_prior.weights.assign(lp_result.x.begin(), lp_result.x.begin() + nh);

  if (best_response_value(sol.adversary_prior, space, marg, p) != sol.value)
    throw std::logic_error("LP prior does not reproduce the LP value");
  return sol;
}

// No-regret (optimistic multiplicative weights) ascent over the prior
// simplex against exact best-response payoff vectors, with a certified
// primal-dual bracket: every iterate's best-response value lower-bounds the
// game value, and every window-averaged learner upper-bounds it.
inline GameSolution solve_game_mw(const FiniteProblem& p, const Marginal& marg, int n,
                                  const SolverConfig& cfg) {
  SampleSpace space = SampleSpace::build(p, marg, n, cfg.enumeration_cap);
  const int nh = p.num_hypotheses();

  struct CellData {
    std::vector<int> hs;
    std::vector<std::vector<double>> g;  // [y][member] = mass * D(x) * loss
  };
  std::vector<CellData> cells;
  for (const auto& cell : space.cells) {
    const auto& group = space.groups[cell.group];
    CellData cd;
    cd.hs = group.hset;
    double scale = to_double(group.mass * marg.weights[cell.x]);
    cd.g.assign(p.num_labels(), std::vector<double>(cd.hs.size()));
    for (int y = 0; y < p.num_labels(); ++y)
      for (std::size_t k = 0; k < cd.hs.size(); ++k)
        cd.g[y][k] = scale * to_double(p.loss_at(p.label_of(cd.hs[k], cell.x), y));
    cells.push_back(std::move(cd));
  }

  std::vector<double> lam(nh, 1.0 / nh);
  std::vector<double> prev_u(nh, 0.0), window_sum(nh, 0.0);
  std::vector<double> best_lam = lam;
  double best_lower = 0.0, best_upper = 1.0;
  long window_len = 0, next_restart = 16;
  const double eta = 1.5;

  long it = 0;
  for (; it < cfg.iteration_cap; ++it) {
    // One sweep: best-response value at lam and its supergradient u.
    std::vector<double> u(nh, 0.0);
    double lower = 0.0;
    for (const auto& cd : cells) {
      int best_y = 0;
      double best_val = 0.0;
      for (int y = 0; y < static_cast<int>(cd.g.size()); ++y) {
        double val = 0.0;
        for (std::size_t k = 0; k < cd.hs.size(); ++k) val += lam[cd.hs[k]] * cd.g[y][k];
        if (y == 0 || val < best_val) {
          best_val = val;
          best_y = y;
        }
      }
      lower += best_val;
      for (std::size_t k = 0; k < cd.hs.size(); ++k) u[cd.hs[k]] += cd.g[best_y][k];
    }
    if (lower > best_lower) {
      best_lower = lower;
      best_lam = lam;
    }

    for (int h = 0; h < nh; ++h) window_sum[h] += u[h];
    ++window_len;
    double upper = 0.0;
    for (int h = 0; h < nh; ++h) upper = std::max(upper, window_sum[h] / window_len);
    best_upper = std::min(best_upper, upper);
    if (best_upper - best_lower <= cfg.tolerance) {
      ++it;
      break;
    }
    if (window_len >= next_restart) {
      window_sum.assign(nh, 0.0);
      window_len = 0;
      next_restart *= 2;
    }

    double norm = 0.0;
    for (int h = 0; h < nh; ++h) {
      lam[h] *= std::exp(eta * (2.0 * u[h] - prev_u[h]));
      norm += lam[h];
    }
    for (int h = 0; h < nh; ++h) lam[h] /= norm;
    prev_u = u;
  }

  GameSolution sol;
  sol.method = SolveMethod::MultiplicativeWeights;
  sol.n = n;
  sol.converged = best_upper - best_lower <= cfg.tolerance;
  sol.value = rat_from_double(0.5 * (best_lower + best_upper));
  sol.duality_gap = rat_from_double(best_upper - best_lower);
  sol.adversary_prior.weights.resize(nh);
  double tail = 1.0;
  for (int h = 0; h + 1 < nh; ++h) {
    sol.adversary_prior.weights[h] = rat_from_double(best_lam[h]);
    tail -= best_lam[h];
  }
  sol.adversary_prior.weights[nh - 1] = rat_from_double(tail);
  Rat fix = 1;
  for (int h = 0; h + 1 < nh; ++h) fix -= sol.adversary_prior.weights[h];
  if (fix >= 0) {
    sol.adversary_prior.weights[nh - 1] = fix;  // exact simplex membership
  } else {
    sol.adversary_prior.weights[nh - 1] = 0;
    auto largest = std::max_element(sol.adversary_prior.weights.begin(),
                                    sol.adversary_prior.weights.end());
    *largest += fix;
  }
  return sol;
}

inline GameSolution solve_game(const FiniteProblem& p, const Marginal& marg, int n,
                               const SolverConfig& cfg = {}) {
  return cfg.method == SolveMethod::ExactLp ? solve_game_exact(p, marg, n, cfg)
                                            : solve_game_mw(p, marg, n, cfg);
}

// The randomized proper learner of the factor-2 lemma: Bayesian with the
// adversary-optimal prior.
inline LearnerSpec build_proper_learner(const GameSolution& sol) {
  return LearnerSpec::bayesian(sol.adversary_prior);
}

struct WorstCaseReport {
  std::vector<Rat> per_truth;
  Rat max_error;
  std::optional<Rat> ratio;  // max / game value; 0/0 defined as 1
};

inline WorstCaseReport evaluate_worstcase(const LearnerSpec& learner, const Marginal& marg,
                                          int n, const FiniteProblem& p,
                                          std::int64_t cap = kDefaultEnumerationCap,
                                          const Rat* game_value = nullptr) {
  WorstCaseReport report;
  report.max_error = 0;
  for (int truth = 0; truth < p.num_hypotheses(); ++truth) {
    Rat err = expected_error_exact(learner, marg, truth, n, p, cap);
    if (err > report.max_error) report.max_error = err;
    report.per_truth.push_back(std::move(err));
  }
  if (game_value != nullptr) {
    if (*game_value != 0)
      report.ratio = report.max_error / *game_value;
    else if (report.max_error == 0)
      report.ratio = 1;
  }
  return report;
}

struct PriorSearchResult {
  RandomizedHypothesis prior;
  Rat worst_case;
  std::optional<Rat> ratio;
  long evaluations = 0;
};

// Derivative-free minimization of the Bayesian worst case over the prior
// simplex: seeded interior multi-starts plus greedy vertex-mixing moves.
// Deterministic given the seed; always returns the best prior probed.
inline PriorSearchResult search_proper_prior(const FiniteProblem& p, const Marginal& marg, int n,
                                             long budget, std::uint64_t seed,
                                             std::int64_t cap = kDefaultEnumerationCap,
                                             const Rat* game_value = nullptr) {
  const int nh = p.num_hypotheses();
  PriorSearchResult result;
  long used = 0;

  auto probe = [&](const RandomizedHypothesis& q, Rat& out) -> bool {
    if (used >= budget) return false;
    ++used;
    try {
      out = evaluate_worstcase(LearnerSpec::bayesian(q), marg, n, p, cap).max_error;
      return true;
    } catch (const ZeroEvidence&) {
      return false;  // priors missing support on some truth's samples
    }
  };

  auto consider = [&](const RandomizedHypothesis& q) {
    Rat wc;
    if (!probe(q, wc)) return;
    if (result.prior.weights.empty() || wc < result.worst_case) {
      result.prior = q;
      result.worst_case = wc;
    }
  };

  consider(RandomizedHypothesis::uniform(nh));

  Rng rng(seed);
  while (used < budget / 2) {
    RandomizedHypothesis q{std::vector<Rat>(nh)};
    Rat total = 0;
    for (int h = 0; h < nh; ++h) {
      q.weights[h] = Rat(static_cast<long>(rng.below(997)) + 1);
      total += q.weights[h];
    }
    for (int h = 0; h < nh; ++h) q.weights[h] /= total;
    consider(q);
  }

  // Local refinement: mix the incumbent toward each vertex and the uniform
  // prior with shrinking step sizes, keeping strict improvements.
  const Rat steps[] = {Rat(1, 2), Rat(1, 4), Rat(1, 8), Rat(1, 16), Rat(1, 32), Rat(1, 64)};
  for (const Rat& delta : steps) {
    bool improved = true;
    while (improved && used < budget) {
      improved = false;
      for (int h = 0; h <= nh && used < budget; ++h) {
        RandomizedHypothesis q{std::vector<Rat>(nh)};
        for (int j = 0; j < nh; ++j) {
          Rat target = (h < nh) ? Rat(j == h ? 1 : 0) : Rat(1, nh);
          q.weights[j] = (1 - delta) * result.prior.weights[j] + delta * target;
        }
        Rat wc;
        if (probe(q, wc) && wc < result.worst_case) {
          result.prior = q;
          result.worst_case = wc;
          improved = true;
        }
      }
    }
  }

  result.evaluations = used;
  if (game_value != nullptr) {
    if (*game_value != 0)
      result.ratio = result.worst_case / *game_value;
    else if (result.worst_case == 0)
      result.ratio = 1;
  }
  return result;
}

}  // namespace properlab
