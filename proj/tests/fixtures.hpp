#pragma once

#include "properlab/problem.hpp"

// Shared toy problems. "p1" is the two-point, two-hypothesis classification
// problem whose game value at n=1 under the uniform marginal is 1/8.
namespace fixtures {

inline properlab::FiniteProblem p1() {
  properlab::FiniteProblem p;
  p.domain = {"x1", "x2"};
  p.labels = {"0", "1"};
  p.hypotheses = {{0, 0}, {0, 1}};
  p.loss = properlab::FiniteProblem::zero_one_loss(2);
  return p;
}

inline properlab::Marginal p1_uniform() { return properlab::Marginal::uniform(2); }

inline properlab::Marginal p1_skew() {
  return properlab::Marginal{{properlab::Rat(4, 5), properlab::Rat(1, 5)}};
}

// Three hypotheses over two points; the sample ((x1,0)) keeps {h1, h2}.
inline properlab::FiniteProblem p3() {
  properlab::FiniteProblem p;
  p.domain = {"x1", "x2"};
  p.labels = {"0", "1"};
  p.hypotheses = {{0, 0}, {0, 1}, {1, 1}};
  p.loss = properlab::FiniteProblem::zero_one_loss(2);
  return p;
}

inline properlab::FiniteProblem singleton() {
  properlab::FiniteProblem p;
  p.domain = {"x1", "x2"};
  p.labels = {"0", "1"};
  p.hypotheses = {{0, 1}};
  p.loss = properlab::FiniteProblem::zero_one_loss(2);
  return p;
}

inline properlab::LabeledSample sample(std::initializer_list<std::pair<int, int>> pairs) {
  properlab::LabeledSample s;
  for (const auto& pr : pairs) s.pairs.push_back(pr);
  return s;
}

}  // namespace fixtures
