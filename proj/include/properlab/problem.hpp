#pragma once

#include "properlab/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace properlab {

enum class Fault {
  NonMetricLoss,
  DuplicateHypothesis,
  EmptyClass,
  OutOfRangeEntry,
  BadMarginal,
};

inline const char* fault_name(Fault f) {
  switch (f) {
    case Fault::NonMetricLoss: return "NonMetricLoss";
    case Fault::DuplicateHypothesis: return "DuplicateHypothesis";
    case Fault::EmptyClass: return "EmptyClass";
    case Fault::OutOfRangeEntry: return "OutOfRangeEntry";
    case Fault::BadMarginal: return "BadMarginal";
  }
  return "?";
}

class ValidationError : public std::runtime_error {
 public:
  ValidationError(Fault fault, std::string detail)
      : std::runtime_error(std::string(fault_name(fault)) + ": " + detail), fault_(fault) {}
  Fault fault() const { return fault_; }

 private:
  Fault fault_;
};

struct EmptySample : std::runtime_error {
  EmptySample() : std::runtime_error("EmptySample: empirical risk needs n >= 1") {}
};

// A finite supervised learning problem: domain X, label set Y, a hypothesis
// table (one total map X -> Y per row) and a loss matrix that must be a
// metric on Y with values in [0, 1].
struct FiniteProblem {
  std::vector<std::string> domain;
  std::vector<std::string> labels;
  std::vector<std::vector<int>> hypotheses;  // |H| rows of |X| label indices
  std::vector<std::vector<Rat>> loss;        // |Y| x |Y|

  int num_points() const { return static_cast<int>(domain.size()); }
  int num_labels() const { return static_cast<int>(labels.size()); }
  int num_hypotheses() const { return static_cast<int>(hypotheses.size()); }

  int label_of(int h, int x) const { return hypotheses[h][x]; }
  const Rat& loss_at(int y, int yp) const { return loss[y][yp]; }

  static std::vector<std::vector<Rat>> zero_one_loss(int num_labels) {
    std::vector<std::vector<Rat>> m(num_labels, std::vector<Rat>(num_labels, Rat(0)));
    for (int a = 0; a < num_labels; ++a)
      for (int b = 0; b < num_labels; ++b)
        if (a != b) m[a][b] = 1;
    return m;
  }
};

// Probability vector over X. Exact rational weights summing to 1.
struct Marginal {
  std::vector<Rat> weights;

  std::vector<int> support() const {
    std::vector<int> s;
    for (std::size_t x = 0; x < weights.size(); ++x)
      if (weights[x] > 0) s.push_back(static_cast<int>(x));
    return s;
  }

  static Marginal uniform(int num_points) {
    return Marginal{std::vector<Rat>(num_points, Rat(1, num_points))};
  }
};

// Ordered (x, y) index pairs; duplicates allowed (i.i.d. sequences).
struct LabeledSample {
  std::vector<std::pair<int, int>> pairs;

  int size() const { return static_cast<int>(pairs.size()); }
  bool empty() const { return pairs.empty(); }
  auto operator<=>(const LabeledSample&) const = default;
};

// Row-stochastic |X| x |Y| matrix; deterministic predictors are 0/1 rows.
struct Predictor {
  std::vector<std::vector<Rat>> rows;

  static Predictor deterministic(const std::vector<int>& labels_per_point, int num_labels) {
    Predictor p;
    p.rows.assign(labels_per_point.size(), std::vector<Rat>(num_labels, Rat(0)));
    for (std::size_t x = 0; x < labels_per_point.size(); ++x) p.rows[x][labels_per_point[x]] = 1;
    return p;
  }

  static Predictor from_hypothesis(const FiniteProblem& problem, int h) {
    return deterministic(problem.hypotheses[h], problem.num_labels());
  }

  bool operator==(const Predictor&) const = default;
};

// Probability vector over H (priors Q, mixed strategies, SRM outputs).
struct RandomizedHypothesis {
  std::vector<Rat> weights;

  static RandomizedHypothesis uniform(int num_hypotheses) {
    return RandomizedHypothesis{std::vector<Rat>(num_hypotheses, Rat(1, num_hypotheses))};
  }
  static RandomizedHypothesis point_mass(int h, int num_hypotheses) {
    RandomizedHypothesis r{std::vector<Rat>(num_hypotheses, Rat(0))};
    r.weights[h] = 1;
    return r;
  }

  bool operator==(const RandomizedHypothesis&) const = default;
};

// Checks every FiniteProblem invariant, reporting the first violation.
// Metric axioms are checked exhaustively over all label triples.
inline void validate_problem(const FiniteProblem& p) {
  const int ny = p.num_labels();
  if (ny == 0) throw ValidationError(Fault::OutOfRangeEntry, "label set is empty");
  if (p.domain.empty()) throw ValidationError(Fault::OutOfRangeEntry, "domain is empty");
  if (static_cast<int>(p.loss.size()) != ny)
    throw ValidationError(Fault::OutOfRangeEntry, "loss matrix is not |Y| x |Y|");
  for (const auto& row : p.loss)
    if (static_cast<int>(row.size()) != ny)
      throw ValidationError(Fault::OutOfRangeEntry, "loss matrix is not |Y| x |Y|");

  for (int a = 0; a < ny; ++a)
    for (int b = 0; b < ny; ++b)
      if (p.loss[a][b] < 0 || p.loss[a][b] > 1)
        throw ValidationError(Fault::OutOfRangeEntry,
                              "loss(" + p.labels[a] + "," + p.labels[b] + ") outside [0,1]");

  for (int a = 0; a < ny; ++a)
    if (p.loss[a][a] != 0)
      throw ValidationError(Fault::NonMetricLoss, "loss(" + p.labels[a] + "," + p.labels[a] + ") != 0");
  for (int a = 0; a < ny; ++a)
    for (int b = 0; b < ny; ++b) {
      if (a != b && p.loss[a][b] <= 0)
        throw ValidationError(Fault::NonMetricLoss,
                              "loss(" + p.labels[a] + "," + p.labels[b] + ") not positive");
      if (p.loss[a][b] != p.loss[b][a])
        throw ValidationError(Fault::NonMetricLoss,
                              "loss(" + p.labels[a] + "," + p.labels[b] + ") breaks symmetry");
    }
  for (int a = 0; a < ny; ++a)
    for (int b = 0; b < ny; ++b)
      for (int c = 0; c < ny; ++c)
        if (p.loss[a][c] > p.loss[a][b] + p.loss[b][c])
          throw ValidationError(Fault::NonMetricLoss,
                                "triangle inequality fails on triple (" + p.labels[a] + "," +
                                    p.labels[b] + "," + p.labels[c] + ")");

  if (p.hypotheses.empty()) throw ValidationError(Fault::EmptyClass, "hypothesis class is empty");
  for (const auto& h : p.hypotheses) {
    if (static_cast<int>(h.size()) != p.num_points())
      throw ValidationError(Fault::OutOfRangeEntry, "hypothesis row is not total on X");
    for (int y : h)
      if (y < 0 || y >= ny)
        throw ValidationError(Fault::OutOfRangeEntry, "hypothesis output outside Y");
  }
  for (std::size_t i = 0; i < p.hypotheses.size(); ++i)
    for (std::size_t j = i + 1; j < p.hypotheses.size(); ++j)
      if (p.hypotheses[i] == p.hypotheses[j])
        throw ValidationError(Fault::DuplicateHypothesis,
                              "rows " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

inline void validate_marginal(const Marginal& m, const FiniteProblem& p) {
  if (static_cast<int>(m.weights.size()) != p.num_points())
    throw ValidationError(Fault::BadMarginal, "marginal length != |X|");
  Rat total = 0;
  for (const Rat& w : m.weights) {
    if (w < 0) throw ValidationError(Fault::BadMarginal, "negative weight");
    total += w;
  }
  if (total != 1) throw ValidationError(Fault::BadMarginal, "weights sum to " + format_rational(total));
  if (m.support().empty()) throw ValidationError(Fault::BadMarginal, "empty support");
}

inline void validate_simplex(const RandomizedHypothesis& q, const FiniteProblem& p) {
  if (static_cast<int>(q.weights.size()) != p.num_hypotheses())
    throw ValidationError(Fault::BadMarginal, "prior length != |H|");
  Rat total = 0;
  for (const Rat& w : q.weights) {
    if (w < 0) throw ValidationError(Fault::BadMarginal, "negative prior weight");
    total += w;
  }
  if (total != 1) throw ValidationError(Fault::BadMarginal, "prior sums to " + format_rational(total));
}

// Expected loss of a predictor row against a fixed true label.
inline Rat row_loss(const std::vector<Rat>& row, int truth_label, const FiniteProblem& p) {
  Rat out = 0;
  for (int y = 0; y < p.num_labels(); ++y)
    if (row[y] != 0) out += row[y] * p.loss_at(y, truth_label);
  return out;
}

// (1/n) sum_i E_{y^ ~ pred(x_i)} loss(y^, y_i). Exact.
inline Rat empirical_risk(const Predictor& pred, const LabeledSample& sample,
                          const FiniteProblem& p) {
  if (sample.empty()) throw EmptySample();
  Rat total = 0;
  for (const auto& [x, y] : sample.pairs) total += row_loss(pred.rows[x], y, p);
  return total / sample.size();
}

// sum_x D(x) E_{y^ ~ pred(x)} loss(y^, h*(x)). Exact.
inline Rat true_error(const Predictor& pred, const Marginal& marg, int truth,
                      const FiniteProblem& p) {
  Rat total = 0;
  for (int x = 0; x < p.num_points(); ++x)
    if (marg.weights[x] != 0) total += marg.weights[x] * row_loss(pred.rows[x], p.label_of(truth, x), p);
  return total;
}

// Indices of hypotheses agreeing with every labeled pair. Because the loss
// is a metric this is exactly { h : L_S(h) = 0 }. Empty sample -> all of H.
inline std::vector<int> consistent_set(const LabeledSample& sample, const FiniteProblem& p) {
  std::vector<int> out;
  for (int h = 0; h < p.num_hypotheses(); ++h) {
    bool ok = true;
    for (const auto& [x, y] : sample.pairs)
      if (p.label_of(h, x) != y) {
        ok = false;
        break;
      }
    if (ok) out.push_back(h);
  }
  return out;
}

inline LabeledSample label_points(const std::vector<int>& points, int truth,
                                  const FiniteProblem& p) {
  LabeledSample s;
  s.pairs.reserve(points.size());
  for (int x : points) s.pairs.emplace_back(x, p.label_of(truth, x));
  return s;
}

}  // namespace properlab
