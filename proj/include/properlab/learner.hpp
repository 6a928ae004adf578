#pragma once

#include "properlab/bayes.hpp"
#include "properlab/problem.hpp"
#include "properlab/properize.hpp"

#include <map>
#include <memory>
#include <string>
#include <utility>

namespace properlab {

struct TableIncomplete : std::runtime_error {
  TableIncomplete() : std::runtime_error("Table learner evaluated on a sample it does not map") {}
};

// A finitely-described learner. Bayesian outputs are randomized hypotheses
// integrated analytically into a predictor; the other variants are
// deterministic given their data.
struct LearnerSpec {
  enum class Kind { Bayesian, Constant, Table, Properized };

  Kind kind = Kind::Constant;
  RandomizedHypothesis prior;                 // Bayesian
  int hypothesis = 0;                         // Constant
  std::map<LabeledSample, Predictor> table;   // Table
  std::shared_ptr<const LearnerSpec> inner;   // Properized

  static LearnerSpec bayesian(RandomizedHypothesis q) {
    LearnerSpec l;
    l.kind = Kind::Bayesian;
    l.prior = std::move(q);
    return l;
  }
  static LearnerSpec constant(int h) {
    LearnerSpec l;
    l.kind = Kind::Constant;
    l.hypothesis = h;
    return l;
  }
  static LearnerSpec table_learner(std::map<LabeledSample, Predictor> t) {
    LearnerSpec l;
    l.kind = Kind::Table;
    l.table = std::move(t);
    return l;
  }
  static LearnerSpec properized(LearnerSpec base) {
    LearnerSpec l;
    l.kind = Kind::Properized;
    l.inner = std::make_shared<const LearnerSpec>(std::move(base));
    return l;
  }

  const char* kind_name() const {
    switch (kind) {
      case Kind::Bayesian: return "bayesian";
      case Kind::Constant: return "constant";
      case Kind::Table: return "table";
      case Kind::Properized: return "properized";
    }
    return "?";
  }
};

// Pushforward of a randomized hypothesis through evaluation at each point.
inline Predictor predictor_from_randomized(const RandomizedHypothesis& r,
                                           const FiniteProblem& p) {
  Predictor out;
  out.rows.assign(p.num_points(), std::vector<Rat>(p.num_labels(), Rat(0)));
  for (int h = 0; h < p.num_hypotheses(); ++h)
    if (r.weights[h] != 0)
      for (int x = 0; x < p.num_points(); ++x) out.rows[x][p.label_of(h, x)] += r.weights[h];
  return out;
}

// Trains the learner on one sample. The marginal is consulted only by the
// Properized wrapper (nearest-hypothesis rounding is distance-under-D).
inline Predictor evaluate_learner(const LearnerSpec& learner, const LabeledSample& sample,
                                  const Marginal& marg, const FiniteProblem& p) {
  switch (learner.kind) {
    case LearnerSpec::Kind::Bayesian:
      return predictor_from_randomized(posterior(learner.prior, sample, p), p);
    case LearnerSpec::Kind::Constant:
      return Predictor::from_hypothesis(p, learner.hypothesis);
    case LearnerSpec::Kind::Table: {
      auto it = learner.table.find(sample);
      if (it == learner.table.end()) throw TableIncomplete();
      return it->second;
    }
    case LearnerSpec::Kind::Properized: {
      Predictor raw = evaluate_learner(*learner.inner, sample, marg, p);
      return Predictor::from_hypothesis(p, properize(raw, marg, p));
    }
  }
  throw std::logic_error("unreachable learner kind");
}

}  // namespace properlab
