#pragma once

#include "properlab/game.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace properlab {

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(Int required, const Int& budget)
      : std::runtime_error("BudgetExceeded: need " + required.str() + " learners, budget " +
                           budget.str()),
        required_(std::move(required)) {}
  const Int& required() const { return required_; }

 private:
  Int required_;
};

struct OracleBudget {
  Int max_learners = 1'000'000;
  std::int64_t max_samples = kDefaultEnumerationCap;
};

// |Y|^|X|: deterministic predictors, indexed row-major by point.
inline int num_deterministic_predictors(const FiniteProblem& p) {
  int count = 1;
  for (int x = 0; x < p.num_points(); ++x) count *= p.num_labels();
  return count;
}

inline Predictor predictor_by_index(int index, const FiniteProblem& p) {
  std::vector<int> labels(p.num_points());
  for (int x = p.num_points() - 1; x >= 0; --x) {
    labels[x] = index % p.num_labels();
    index /= p.num_labels();
  }
  return Predictor::deterministic(labels, p.num_labels());
}

// |Y^X| ^ (#realizable samples): the row player's pure strategy count.
inline Int count_deterministic_learners(const SampleSpace& space, const FiniteProblem& p) {
  Int total = 1;
  const Int per = num_deterministic_predictors(p);
  for (std::size_t i = 0; i < space.samples.size(); ++i) total *= per;
  return total;
}

// Streams every map from realizable samples to deterministic predictors in
// lexicographic order (first sample = most significant digit). Constant
// memory: only the current digit vector is materialized.
class DeterministicLearnerIterator {
 public:
  DeterministicLearnerIterator(const SampleSpace& space, const FiniteProblem& p,
                               const OracleBudget& budget = {})
      : space_(space), radix_(num_deterministic_predictors(p)) {
    Int required = count_deterministic_learners(space, p);
    if (required > budget.max_learners) throw BudgetExceeded(std::move(required), budget.max_learners);
    digits_.assign(space.samples.size(), 0);
  }

  bool done() const { return done_; }
  const std::vector<int>& digits() const { return digits_; }

  // Advances to the next learner; returns the most significant changed digit
  // position (every later digit resets to 0), or -1 once exhausted.
  int advance() {
    for (int pos = static_cast<int>(digits_.size()) - 1; pos >= 0; --pos) {
      if (++digits_[pos] < radix_) return pos;
      digits_[pos] = 0;
    }
    done_ = true;
    return -1;
  }

  LearnerSpec as_table(const FiniteProblem& p) const {
    std::map<LabeledSample, Predictor> table;
    for (std::size_t i = 0; i < digits_.size(); ++i)
      table.emplace(space_.samples[i].labeled, predictor_by_index(digits_[i], p));
    return LearnerSpec::table_learner(std::move(table));
  }

 private:
  const SampleSpace& space_;
  int radix_;
  std::vector<int> digits_;
  bool done_ = false;
};

namespace detail {

// pay[s][d][h]: contribution of choosing predictor d on sample s to the
// truth-h expected error, i.e. w_h(s) * L_{D_h}(predictor d). Computed from
// problem-core primitives only, independently of the game decomposition.
struct PayoffTable {
  std::vector<std::vector<std::vector<Rat>>> pay;
  int num_truths = 0;

  PayoffTable(const SampleSpace& space, const Marginal& marg, const FiniteProblem& p) {
    num_truths = p.num_hypotheses();
    const int np = num_deterministic_predictors(p);
    std::vector<std::vector<Rat>> te(np, std::vector<Rat>(num_truths));
    for (int d = 0; d < np; ++d) {
      Predictor pred = predictor_by_index(d, p);
      for (int h = 0; h < num_truths; ++h) te[d][h] = true_error(pred, marg, h, p);
    }
    pay.resize(space.samples.size());
    for (std::size_t s = 0; s < space.samples.size(); ++s) {
      pay[s].assign(np, std::vector<Rat>(num_truths, Rat(0)));
      for (int d = 0; d < np; ++d)
        for (int h : space.groups[space.samples[s].group].hset)
          pay[s][d][h] = space.samples[s].weight * te[d][h];
    }
  }
};

// Full enumeration with payoff vectors maintained incrementally along the
// lexicographic order via per-position prefix sums.
template <class Visit>
void scan_learners(const SampleSpace& space, const FiniteProblem& p, const OracleBudget& budget,
                   const PayoffTable& table, Visit&& visit) {
  DeterministicLearnerIterator it(space, p, budget);
  const std::size_t ns = space.samples.size();
  const int nh = table.num_truths;

  // prefix[s][h] = payoff of digits [0, s) under truth h.
  std::vector<std::vector<Rat>> prefix(ns + 1, std::vector<Rat>(nh, Rat(0)));
  auto recompute_from = [&](std::size_t pos) {
    for (std::size_t s = pos; s < ns; ++s)
      for (int h = 0; h < nh; ++h)
        prefix[s + 1][h] = prefix[s][h] + table.pay[s][it.digits()[s]][h];
  };
  recompute_from(0);

  for (;;) {
    visit(it.digits(), prefix[ns]);
    int changed = it.advance();
    if (changed < 0) break;
    recompute_from(static_cast<std::size_t>(changed));
  }
}

}  // namespace detail

struct MatrixGameResult {
  Rat value;
  std::vector<Rat> adversary;   // optimal mixed strategy over truths
  Rat learner_side_value;       // restricted dual LP optimum; equals value
  long columns_generated = 0;
  Int learner_count;
};

// Ground-truth game value: builds the |H| x (#learners) payoff matrix from
// expected errors of enumerated Table learners and solves the matrix game by
// exact-rational LP. Columns enter lazily: the restricted LP alternates with
// an exhaustive separation scan until no learner improves on the incumbent,
// which certifies optimality over the full matrix.
inline MatrixGameResult matrix_game_value(const FiniteProblem& p, const Marginal& marg, int n,
                                          const OracleBudget& budget = {}) {
  SampleSpace space = SampleSpace::build(p, marg, n, budget.max_samples);
  detail::PayoffTable table(space, marg, p);
  const int nh = p.num_hypotheses();

  MatrixGameResult result;
  result.learner_count = count_deterministic_learners(space, p);

  std::vector<std::vector<Rat>> columns;  // payoff vectors of active learners
  columns.push_back([&] {
    std::vector<Rat> first(nh, Rat(0));
    for (std::size_t s = 0; s < space.samples.size(); ++s)
      for (int h = 0; h < nh; ++h) first[h] += table.pay[s][0][h];
    return first;
  }());

  for (;;) {
    // Adversary side, restricted to the active columns:
    // max v s.t. sum_h lambda_h * col[h] >= v for each column, simplex(lambda).
    const int nvars = nh + 1;
    std::vector<lp::Constraint<Rat>> rows;
    for (const auto& col : columns) {
      lp::Constraint<Rat> row;
      row.coeffs.assign(nvars, Rat(0));
      for (int h = 0; h < nh; ++h) row.coeffs[h] = col[h];
      row.coeffs[nh] = -1;
      row.sense = lp::Sense::GreaterEq;
      row.rhs = 0;
      rows.push_back(std::move(row));
    }
    lp::Constraint<Rat> simplex_row;
    simplex_row.coeffs.assign(nvars, Rat(0));
    for (int h = 0; h < nh; ++h) simplex_row.coeffs[h] = 1;
    simplex_row.sense = lp::Sense::Eq;
    simplex_row.rhs = 1;
    rows.push_back(std::move(simplex_row));
    std::vector<Rat> objective(nvars, Rat(0));
    objective[nh] = 1;

    lp::Result<Rat> lp_result = lp::maximize(objective, rows);
    if (lp_result.status != lp::Status::Optimal)
      throw std::logic_error("restricted matrix game LP must solve");
    std::vector<Rat> lambda(lp_result.x.begin(), lp_result.x.begin() + nh);
    const Rat v_restricted = lp_result.objective;

    // Exhaustive separation: the learner minimizing lambda' payoff.
    bool have_min = false;
    Rat min_payoff;
    std::vector<Rat> min_column;
    detail::scan_learners(space, p, budget, table,
                          [&](const std::vector<int>&, const std::vector<Rat>& payoff) {
                            Rat dot = 0;
                            for (int h = 0; h < nh; ++h)
                              if (lambda[h] != 0) dot += lambda[h] * payoff[h];
                            if (!have_min || dot < min_payoff) {
                              have_min = true;
                              min_payoff = dot;
                              min_column = payoff;
                            }
                          });

    if (min_payoff >= v_restricted) {
      result.value = v_restricted;
      result.adversary = std::move(lambda);
      result.columns_generated = static_cast<long>(columns.size());

      // Learner-side LP over the final columns; exact duality certificate.
      const int ncols = static_cast<int>(columns.size());
      std::vector<lp::Constraint<Rat>> dual_rows;
      for (int h = 0; h < nh; ++h) {
        lp::Constraint<Rat> row;
        row.coeffs.assign(ncols + 1, Rat(0));
        for (int c = 0; c < ncols; ++c) row.coeffs[c] = columns[c][h];
        row.coeffs[ncols] = -1;
        row.sense = lp::Sense::LessEq;
        row.rhs = 0;
        dual_rows.push_back(std::move(row));
      }
      lp::Constraint<Rat> mix_row;
      mix_row.coeffs.assign(ncols + 1, Rat(0));
      for (int c = 0; c < ncols; ++c) mix_row.coeffs[c] = 1;
      mix_row.sense = lp::Sense::Eq;
      mix_row.rhs = 1;
      dual_rows.push_back(std::move(mix_row));
      std::vector<Rat> dual_obj(ncols + 1, Rat(0));
      dual_obj[ncols] = -1;  // minimize u
      lp::Result<Rat> dual = lp::maximize(dual_obj, dual_rows);
      if (dual.status != lp::Status::Optimal)
        throw std::logic_error("learner-side matrix game LP must solve");
      result.learner_side_value = -dual.objective;
      return result;
    }
    columns.push_back(std::move(min_column));
  }
}

struct CrossCheckReport {
  Rat solver_value;
  Rat oracle_value;
  Rat deterministic_minimax;
  bool value_matches = false;
  bool no_learner_below_value = false;
  bool duality_holds = false;
  bool pass = false;
  Int learner_count;
};

// Certifies solve_game against the brute-force oracle on one instance.
inline CrossCheckReport cross_check(const FiniteProblem& p, const Marginal& marg, int n,
                                    const OracleBudget& budget = {},
                                    const SolverConfig& cfg = {}) {
  CrossCheckReport report;
  GameSolution sol = solve_game_exact(p, marg, n, cfg);
  MatrixGameResult oracle = matrix_game_value(p, marg, n, budget);
  report.solver_value = sol.value;
  report.oracle_value = oracle.value;
  report.learner_count = oracle.learner_count;
  report.value_matches = sol.value == oracle.value;
  report.duality_holds = oracle.learner_side_value == oracle.value;

  SampleSpace space = SampleSpace::build(p, marg, n, budget.max_samples);
  detail::PayoffTable table(space, marg, p);
  bool have = false;
  Rat det_minimax;
  detail::scan_learners(space, p, budget, table,
                        [&](const std::vector<int>&, const std::vector<Rat>& payoff) {
                          Rat worst = 0;
                          for (const Rat& v : payoff)
                            if (v > worst) worst = v;
                          if (!have || worst < det_minimax) {
                            have = true;
                            det_minimax = worst;
                          }
                        });
  report.deterministic_minimax = det_minimax;
  report.no_learner_below_value = det_minimax >= oracle.value;
  report.pass = report.value_matches && report.no_learner_below_value && report.duality_holds;
  return report;
}

}  // namespace properlab
