#pragma once

#include "properlab/problem.hpp"

namespace properlab {

// dist_D(f, g) = E_{x~D} E_{y^~f(x), y'~g(x)} loss(y^, y'). A metric on
// (randomized) predictors because the label loss is one.
inline Rat dist_between(const Predictor& f, const Predictor& g, const Marginal& marg,
                        const FiniteProblem& p) {
  Rat out = 0;
  for (int x = 0; x < p.num_points(); ++x) {
    if (marg.weights[x] == 0) continue;
    Rat point = 0;
    for (int a = 0; a < p.num_labels(); ++a) {
      if (f.rows[x][a] == 0) continue;
      for (int b = 0; b < p.num_labels(); ++b)
        if (g.rows[x][b] != 0) point += f.rows[x][a] * g.rows[x][b] * p.loss_at(a, b);
    }
    out += marg.weights[x] * point;
  }
  return out;
}

// Nearest hypothesis under dist_D; ties broken by lowest hypothesis index.
inline int properize(const Predictor& pred, const Marginal& marg, const FiniteProblem& p) {
  int best = 0;
  Rat best_dist = dist_between(Predictor::from_hypothesis(p, 0), pred, marg, p);
  for (int h = 1; h < p.num_hypotheses(); ++h) {
    Rat d = dist_between(Predictor::from_hypothesis(p, h), pred, marg, p);
    if (d < best_dist) {
      best = h;
      best_dist = d;
    }
  }
  return best;
}

}  // namespace properlab
