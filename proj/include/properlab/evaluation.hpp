#pragma once

#include "properlab/learner.hpp"
#include "properlab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace properlab {

inline constexpr std::int64_t kDefaultEnumerationCap = 2'000'000;

class EnumerationCapExceeded : public std::runtime_error {
 public:
  EnumerationCapExceeded(Int required, std::int64_t cap)
      : std::runtime_error("EnumerationCapExceeded: need " + required.str() + " entries, cap " +
                           std::to_string(cap)),
        required_(std::move(required)) {}
  const Int& required() const { return required_; }

 private:
  Int required_;
};

struct WeightedSample {
  LabeledSample sample;
  Rat prob;
};

// Number of x-sequences the exact enumeration must visit: |supp(D)|^n.
inline Int enumeration_size(const Marginal& marg, int n) {
  Int count = 1;
  const Int s = static_cast<long>(marg.support().size());
  for (int i = 0; i < n; ++i) count *= s;
  return count;
}

inline void check_enumeration_cap(const Marginal& marg, int n, std::int64_t cap) {
  Int required = enumeration_size(marg, n);
  if (required > cap) throw EnumerationCapExceeded(required, cap);
}

// All samples of size n drawn from supp(D) and labeled by the truth.
// Sequence semantics by default: one entry per x-sequence with probability
// prod_i D(x_i); probabilities sum to exactly 1. With collapse_multisets the
// entries are sorted representatives carrying multinomial weights, which
// must yield identical downstream expectations.
inline std::vector<WeightedSample> enumerate_weighted_samples(
    const Marginal& marg, int truth, int n, const FiniteProblem& p,
    std::int64_t cap = kDefaultEnumerationCap, bool collapse_multisets = false) {
  check_enumeration_cap(marg, n, cap);
  std::vector<int> support = marg.support();
  std::vector<WeightedSample> out;

  if (!collapse_multisets) {
    std::vector<int> seq;
    Rat prob = 1;
    auto rec = [&](auto&& self, int depth) -> void {
      if (depth == n) {
        out.push_back({label_points(seq, truth, p), prob});
        return;
      }
      for (int x : support) {
        seq.push_back(x);
        Rat saved = prob;
        prob *= marg.weights[x];
        self(self, depth + 1);
        prob = saved;
        seq.pop_back();
      }
    };
    rec(rec, 0);
    return out;
  }

  // Nondecreasing representatives; weight = n! / prod(c_x!) * prod D(x)^c_x.
  std::vector<int> counts(support.size(), 0);
  auto rec = [&](auto&& self, std::size_t idx, int left) -> void {
    if (idx + 1 == support.size()) {
      counts[idx] = left;
      Int multinomial = 1;
      for (int i = 2; i <= n; ++i) multinomial *= i;
      Rat prob = multinomial;
      std::vector<int> seq;
      for (std::size_t k = 0; k < support.size(); ++k) {
        Int fact = 1;
        for (int i = 2; i <= counts[k]; ++i) fact *= i;
        prob /= fact;
        prob *= rat_pow(marg.weights[support[k]], counts[k]);
        seq.insert(seq.end(), counts[k], support[k]);
      }
      out.push_back({label_points(seq, truth, p), prob});
      counts[idx] = 0;
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[idx] = c;
      self(self, idx + 1, left - c);
      counts[idx] = 0;
    }
  };
  if (support.size() == 1) {
    std::vector<int> seq(n, support[0]);
    out.push_back({label_points(seq, truth, p), Rat(1)});
  } else {
    rec(rec, 0, n);
  }
  return out;
}

// E_{S ~ D_{h*}^n} L_{D_{h*}}(A(S)), summed exactly over the enumeration.
// Randomized learner outputs are integrated analytically, never sampled.
inline Rat expected_error_exact(const LearnerSpec& learner, const Marginal& marg, int truth,
                                int n, const FiniteProblem& p,
                                std::int64_t cap = kDefaultEnumerationCap) {
  Rat total = 0;
  for (const auto& ws : enumerate_weighted_samples(marg, truth, n, p, cap)) {
    if (ws.prob == 0) continue;
    total += ws.prob * true_error(evaluate_learner(learner, ws.sample, marg, p), marg, truth, p);
  }
  return total;
}

struct McEstimate {
  double estimate = 0;
  double half_width = 0;  // 95% normal approximation
  long trials = 0;
};

// Seeded Monte-Carlo estimate of the same expectation. Per-trial sample
// draws use exact categorical sampling, so results are bit-reproducible
// for a fixed (seed, trials) pair regardless of platform.
inline McEstimate expected_error_mc(const LearnerSpec& learner, const Marginal& marg, int truth,
                                    int n, long trials, std::uint64_t seed,
                                    const FiniteProblem& p) {
  double sum = 0, sum_sq = 0;
  for (long t = 0; t < trials; ++t) {
    Rng rng = derived_rng(seed, static_cast<std::uint64_t>(t));
    std::vector<int> points(n);
    for (int i = 0; i < n; ++i) points[i] = sample_categorical(rng, marg.weights);
    LabeledSample s = label_points(points, truth, p);
    double err = to_double(true_error(evaluate_learner(learner, s, marg, p), marg, truth, p));
    sum += err;
    sum_sq += err * err;
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

}  // namespace properlab
