#pragma once

#include "properlab/game.hpp"
#include "properlab/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace properlab {

// Unlabeled point sequence plus the ground truth labeling it; the
// leave-one-out evaluation object of the transductive model.
struct TransductiveInstance {
  std::vector<int> points;  // length m >= 2, duplicates allowed
  int truth = 0;
};

struct SampleComplexityQuery {
  Rat epsilon;
  Rat delta = Rat(1, 20);  // unused by expected-error queries
  int n_max = 3;
};

struct ProperizationReport {
  Rat max_ratio;       // properized error / inner error, 0/0 counted as 1
  bool holds = true;   // properized <= 2 * inner pointwise, exact
  long samples_checked = 0;
};

// Pointwise factor-2 check: for every truth and realizable sample, the
// properized learner's true error is at most twice the inner learner's.
inline ProperizationReport properization_bound_check(const LearnerSpec& inner,
                                                     const Marginal& marg, int n,
                                                     const FiniteProblem& p,
                                                     std::int64_t cap = kDefaultEnumerationCap) {
  ProperizationReport report;
  report.max_ratio = 0;
  LearnerSpec wrapped = LearnerSpec::properized(inner);
  for (int truth = 0; truth < p.num_hypotheses(); ++truth) {
    for (const auto& ws : enumerate_weighted_samples(marg, truth, n, p, cap)) {
      if (ws.prob == 0) continue;
      Rat inner_err = true_error(evaluate_learner(inner, ws.sample, marg, p), marg, truth, p);
      Rat prop_err = true_error(evaluate_learner(wrapped, ws.sample, marg, p), marg, truth, p);
      if (prop_err > 2 * inner_err) report.holds = false;
      Rat ratio = inner_err == 0 ? (prop_err == 0 ? Rat(1) : Rat(1000)) : prop_err / inner_err;
      if (ratio > report.max_ratio) report.max_ratio = ratio;
      ++report.samples_checked;
    }
  }
  return report;
}

// (1/m) sum_i E loss(A(S_{-i})(x_i), h*(x_i)) with S_{-i} the truth-labeled
// sample omitting position i. Randomized outputs integrated analytically.
inline Rat transductive_error(const LearnerSpec& learner, const TransductiveInstance& inst,
                              const FiniteProblem& p, const Marginal& eval_marg) {
  const int m = static_cast<int>(inst.points.size());
  Rat total = 0;
  for (int i = 0; i < m; ++i) {
    std::vector<int> rest;
    for (int j = 0; j < m; ++j)
      if (j != i) rest.push_back(inst.points[j]);
    LabeledSample train = label_points(rest, inst.truth, p);
    Predictor pred = evaluate_learner(learner, train, eval_marg, p);
    total += row_loss(pred.rows[inst.points[i]], p.label_of(inst.truth, inst.points[i]), p);
  }
  return total / m;
}

inline Rat transductive_error(const LearnerSpec& learner, const TransductiveInstance& inst,
                              const FiniteProblem& p) {
  return transductive_error(learner, inst, p, Marginal::uniform(p.num_points()));
}

struct LooReport {
  Rat expected_error;        // E_{S~D^m} L_D(A(S))
  Rat loo_identity_value;    // E_{S~D^{m+1}} E_i loss(A(S_{-i})(x_i), y_i)
  Rat transductive_max;      // over instances of size m+1 supported on supp(D)
  bool identity_holds = false;
  bool bound_holds = false;
};

// The leave-one-out chain, both sides enumerated exactly: the intermediate
// equality E_{S~D^{m+1}} E_i loss(...) = E_{S~D^m} L_D(A(S)) and the bound
// by the worst transductive instance of size m+1.
inline LooReport loo_bound_check(const LearnerSpec& learner, const Marginal& marg, int truth,
                                 int m, const FiniteProblem& p,
                                 std::int64_t cap = kDefaultEnumerationCap) {
  LooReport report;
  report.expected_error = expected_error_exact(learner, marg, truth, m, p, cap);

  check_enumeration_cap(marg, m + 1, cap);
  std::vector<int> support = marg.support();
  Rat identity = 0;
  Rat trans_max = 0;
  std::vector<int> seq;
  auto visit = [&](auto&& self) -> void {
    if (static_cast<int>(seq.size()) == m + 1) {
      Rat w = 1;
      for (int x : seq) w *= marg.weights[x];
      TransductiveInstance inst{seq, truth};
      Rat t = transductive_error(learner, inst, p, marg);
      identity += w * t;
      if (t > trans_max) trans_max = t;
      return;
    }
    for (int x : support) {
      seq.push_back(x);
      self(self);
      seq.pop_back();
    }
  };
  visit(visit);

  report.loo_identity_value = identity;
  report.transductive_max = trans_max;
  report.identity_holds = identity == report.expected_error;
  report.bound_holds = report.expected_error <= trans_max;
  return report;
}

// The transductive learner built from a distribution-fixed learner: on a
// held-out point that reoccurs in the training part it echoes the observed
// label; otherwise it averages the learner's prediction over training sets
// T ~ Unif(S_{-i})^{m-1}, handing the learner the marginal Unif(S_X).
inline Rat df_transductive_error_exact(const LearnerSpec& df_learner,
                                       const TransductiveInstance& inst, const FiniteProblem& p,
                                       std::int64_t cap = kDefaultEnumerationCap) {
  const int m = static_cast<int>(inst.points.size());
  Int required = 1;
  for (int i = 0; i + 1 < m; ++i) required *= (m - 1);
  required *= m;
  if (required > cap) throw EnumerationCapExceeded(required, cap);

  Marginal unif_sx{std::vector<Rat>(p.num_points(), Rat(0))};
  for (int x : inst.points) unif_sx.weights[x] += Rat(1, m);

  Rat total = 0;
  for (int i = 0; i < m; ++i) {
    const int xi = inst.points[i];
    bool duplicated = false;
    std::vector<int> rest;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      rest.push_back(inst.points[j]);
      if (inst.points[j] == xi) duplicated = true;
    }
    if (duplicated) continue;  // B returns the observed label: zero loss

    // Average over all (m-1)^(m-1) index sequences into S_{-i}.
    Rat acc = 0;
    std::vector<int> pick(m - 1, 0);
    long count = 0;
    for (;;) {
      std::vector<int> train_points(m - 1);
      for (int k = 0; k < m - 1; ++k) train_points[k] = rest[pick[k]];
      LabeledSample train = label_points(train_points, inst.truth, p);
      Predictor pred = evaluate_learner(df_learner, train, unif_sx, p);
      acc += row_loss(pred.rows[xi], p.label_of(inst.truth, xi), p);
      ++count;
      int pos = m - 2;
      while (pos >= 0 && ++pick[pos] == m - 1) pick[pos--] = 0;
      if (pos < 0) break;
    }
    total += acc / count;
  }
  return total / m;
}

// Seeded Monte-Carlo variant of the same quantity.
inline McEstimate df_transductive_error_mc(const LearnerSpec& df_learner,
                                           const TransductiveInstance& inst,
                                           const FiniteProblem& p, long trials,
                                           std::uint64_t seed) {
  const int m = static_cast<int>(inst.points.size());
  Marginal unif_sx{std::vector<Rat>(p.num_points(), Rat(0))};
  for (int x : inst.points) unif_sx.weights[x] += Rat(1, m);

  double sum = 0, sum_sq = 0;
  for (long t = 0; t < trials; ++t) {
    Rng rng = derived_rng(seed, static_cast<std::uint64_t>(t));
    Rat per_instance = 0;
    for (int i = 0; i < m; ++i) {
      const int xi = inst.points[i];
      std::vector<int> rest;
      bool duplicated = false;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        rest.push_back(inst.points[j]);
        if (inst.points[j] == xi) duplicated = true;
      }
      if (duplicated) continue;
      std::vector<int> train_points(m - 1);
      for (int k = 0; k < m - 1; ++k)
        train_points[k] = rest[rng.below(static_cast<std::uint64_t>(m - 1))];
      LabeledSample train = label_points(train_points, inst.truth, p);
      Predictor pred = evaluate_learner(df_learner, train, unif_sx, p);
      per_instance += row_loss(pred.rows[xi], p.label_of(inst.truth, xi), p);
    }
    double v = to_double(per_instance / m);
    sum += v;
    sum_sq += v * v;
  }
  McEstimate est;
  est.trials = trials;
  est.estimate = sum / static_cast<double>(trials);
  if (trials > 1) {
    double var = (sum_sq - sum * sum / static_cast<double>(trials)) / static_cast<double>(trials - 1);
    if (var < 0) var = 0;
    est.half_width = 1.96 * std::sqrt(var / static_cast<double>(trials));
  }
  return est;
}

// f(m) = (1 - 1/m)^(m-1): the chance that a uniform resample of m-1 points
// from an m-point set misses a designated point. Exact rational; numerator
// and denominator are coprime powers, assigned without re-canonicalization.
inline Rat avoidance_probability(unsigned long m) {
  if (m < 2) throw std::invalid_argument("avoidance_probability needs m >= 2");
  Int num = boost::multiprecision::pow(Int(m - 1), static_cast<unsigned>(m - 1));
  Int den = boost::multiprecision::pow(Int(m), static_cast<unsigned>(m - 1));
  Rat f;
  mpz_set(mpq_numref(f.backend().data()), num.backend().data());
  mpz_set(mpq_denref(f.backend().data()), den.backend().data());
  return f;
}

struct BoostReport {
  long failures = 0;
  long trials = 0;
  double failure_rate = 0;
};

// Repetition boost: train k independent copies, keep the one with lowest
// empirical risk on a fresh validation sample (ties and v = 0 select the
// first copy), and record how often the kept copy's true error reaches eps.
inline BoostReport confidence_boost(const LearnerSpec& base, int k, int v, const Marginal& marg,
                                    int truth, int n, const Rat& epsilon, long trials,
                                    std::uint64_t seed, const FiniteProblem& p) {
  BoostReport report;
  report.trials = trials;
  for (long t = 0; t < trials; ++t) {
    Rng rng = derived_rng(seed, static_cast<std::uint64_t>(t));
    int selected = 0;
    Rat best_risk;
    std::vector<Predictor> outputs;
    outputs.reserve(k);
    for (int copy = 0; copy < k; ++copy) {
      std::vector<int> points(n);
      for (int i = 0; i < n; ++i) points[i] = sample_categorical(rng, marg.weights);
      outputs.push_back(evaluate_learner(base, label_points(points, truth, p), marg, p));
    }
    if (v > 0) {
      std::vector<int> val_points(v);
      for (int i = 0; i < v; ++i) val_points[i] = sample_categorical(rng, marg.weights);
      LabeledSample validation = label_points(val_points, truth, p);
      for (int copy = 0; copy < k; ++copy) {
        Rat risk = empirical_risk(outputs[copy], validation, p);
        if (copy == 0 || risk < best_risk) {
          best_risk = risk;
          selected = copy;
        }
      }
    }
    if (true_error(outputs[selected], marg, truth, p) >= epsilon) ++report.failures;
  }
  report.failure_rate = static_cast<double>(report.failures) / static_cast<double>(trials);
  return report;
}

struct ComplexityResult {
  std::optional<int> n;       // smallest verified threshold, or nullopt
  std::vector<Rat> values;    // game values at n = 1..n_max
};

// Smallest n such that the game value stays <= eps on the whole window
// [n, n_max]; conservative against possible non-monotonicity in n.
inline ComplexityResult sample_complexity_df(const FiniteProblem& p, const Marginal& marg,
                                             const SampleComplexityQuery& q,
                                             const SolverConfig& cfg = {}) {
  ComplexityResult result;
  for (int n = 1; n <= q.n_max; ++n)
    result.values.push_back(solve_game_exact(p, marg, n, cfg).value);
  int threshold = -1;
  for (int n = q.n_max; n >= 1; --n) {
    if (result.values[n - 1] <= q.epsilon)
      threshold = n;
    else
      break;
  }
  if (threshold > 0) result.n = threshold;
  return result;
}

struct ClassicBracket {
  std::vector<std::optional<int>> df_per_marginal;  // at eps
  std::optional<int> lower;                         // max over the grid
  std::optional<int> upper_witness;                 // max over grid at eps', eps' <= eps/e
  Rat witness_epsilon;
  std::string note;
};

// Grid bracket for the classic expected-error complexity. The lower bound is
// sound (a classic learner must handle every grid marginal); the witness uses
// a rational eps' <= eps/e, and is only an upper bound relative to the grid.
inline ClassicBracket classic_bracket(const FiniteProblem& p, const std::vector<Marginal>& grid,
                                      const SampleComplexityQuery& q, const SolverConfig& cfg = {}) {
  ClassicBracket bracket;
  bracket.note = "upper witness is relative to the grid; the classic complexity "
                 "maximizes over all marginals";
  // 367879441/10^9 < 1/e, so eps * c <= eps / e and the witness is conservative.
  bracket.witness_epsilon = q.epsilon * Rat(367879441, 1000000000);

  bool lower_found_all = true;
  int lower = 0;
  for (const auto& marg : grid) {
    auto r = sample_complexity_df(p, marg, q, cfg);
    bracket.df_per_marginal.push_back(r.n);
    if (!r.n)
      lower_found_all = false;
    else
      lower = std::max(lower, *r.n);
  }
  if (lower_found_all) bracket.lower = lower;

  bool upper_found_all = true;
  int upper = 0;
  for (const auto& marg : grid) {
    SampleComplexityQuery qe = q;
    qe.epsilon = bracket.witness_epsilon;
    auto r = sample_complexity_df(p, marg, qe, cfg);
    if (!r.n)
      upper_found_all = false;
    else
      upper = std::max(upper, *r.n);
  }
  if (upper_found_all) bracket.upper_witness = upper;
  return bracket;
}

}  // namespace properlab
