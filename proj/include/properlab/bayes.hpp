#pragma once

#include "properlab/problem.hpp"
#include "properlab/rng.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace properlab {

struct ZeroEvidence : std::runtime_error {
  ZeroEvidence() : std::runtime_error("ZeroEvidence: prior mass 0 on the consistent set") {}
};

class ComponentZeroEvidence : public std::runtime_error {
 public:
  explicit ComponentZeroEvidence(std::vector<int> components)
      : std::runtime_error("ComponentZeroEvidence: " + std::to_string(components.size()) +
                           " mixture component(s) with zero evidence"),
        components_(std::move(components)) {}
  const std::vector<int>& components() const { return components_; }

 private:
  std::vector<int> components_;
};

class NumericNonconvergence : public std::runtime_error {
 public:
  explicit NumericNonconvergence(double gradient_norm)
      : std::runtime_error("NumericNonconvergence: final gradient norm " +
                           std::to_string(gradient_norm)),
        gradient_norm_(gradient_norm) {}
  double gradient_norm() const { return gradient_norm_; }

 private:
  double gradient_norm_;
};

// Prior mass of the sample-consistent set.
inline Rat evidence_mass(const RandomizedHypothesis& prior, const LabeledSample& sample,
                         const FiniteProblem& p) {
  Rat mass = 0;
  for (int h : consistent_set(sample, p)) mass += prior.weights[h];
  return mass;
}

// Restriction of the prior to the consistent set, renormalized exactly.
// The empty sample leaves the prior unchanged.
inline RandomizedHypothesis posterior(const RandomizedHypothesis& prior,
                                      const LabeledSample& sample, const FiniteProblem& p) {
  if (sample.empty()) return prior;
  std::vector<int> consistent = consistent_set(sample, p);
  Rat mass = 0;
  for (int h : consistent) mass += prior.weights[h];
  if (mass == 0) throw ZeroEvidence();
  RandomizedHypothesis out{std::vector<Rat>(prior.weights.size(), Rat(0))};
  for (int h : consistent) out.weights[h] = prior.weights[h] / mass;
  return out;
}

// sum_h p(h) log(p(h)/q(h)), conventions 0 log(0/q) = 0 and p>0, q=0 -> +inf.
inline double kl_divergence(std::span<const Rat> p, std::span<const Rat> q) {
  double out = 0;
  for (std::size_t h = 0; h < p.size(); ++h) {
    if (p[h] == 0) continue;
    if (q[h] == 0) return std::numeric_limits<double>::infinity();
    out += to_double(p[h]) * std::log(to_double(p[h] / q[h]));
  }
  return out;
}

inline double kl_divergence(const RandomizedHypothesis& p, const RandomizedHypothesis& q) {
  return kl_divergence(std::span<const Rat>(p.weights), std::span<const Rat>(q.weights));
}

// Minimizer of KL(P || prior) over distributions supported on the consistent
// set: closed form, equal to the Bayesian posterior.
inline RandomizedHypothesis distributional_srm(const RandomizedHypothesis& prior,
                                               const LabeledSample& sample,
                                               const FiniteProblem& p) {
  return posterior(prior, sample, p);
}

struct NumericSrmOptions {
  long iteration_cap = 10000;
  double step = 0.5;             // geometric interpolation rate toward the prior
  double threshold = 1e-10;      // L1 change between successive iterates
};

// Mirror-descent multiplicative updates on the consistent-support simplex.
// Must land within 1e-8 total variation of the closed form.
inline std::vector<double> distributional_srm_numeric(const RandomizedHypothesis& prior,
                                                      const LabeledSample& sample,
                                                      const FiniteProblem& p,
                                                      const NumericSrmOptions& opts = {}) {
  std::vector<int> consistent = sample.empty()
                                    ? [&] {
                                        std::vector<int> all(p.num_hypotheses());
                                        for (int h = 0; h < p.num_hypotheses(); ++h) all[h] = h;
                                        return all;
                                      }()
                                    : consistent_set(sample, p);
  Rat mass = 0;
  for (int h : consistent) mass += prior.weights[h];
  if (mass == 0) throw ZeroEvidence();

  std::vector<int> support;
  for (int h : consistent)
    if (prior.weights[h] > 0) support.push_back(h);

  std::vector<double> q(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) q[i] = to_double(prior.weights[support[i]]);

  std::vector<double> cur(support.size(), 1.0 / static_cast<double>(support.size()));
  double change = 0;
  for (long it = 0; it < opts.iteration_cap; ++it) {
    // p <- normalize(p^(1-step) * q^step), the entropic-mirror step for
    // grad KL(p||q) = log(p/q) + 1 restricted to the support simplex.
    std::vector<double> next(cur.size());
    double total = 0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[i] = std::pow(cur[i], 1.0 - opts.step) * std::pow(q[i], opts.step);
      total += next[i];
    }
    change = 0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[i] /= total;
      change += std::abs(next[i] - cur[i]);
    }
    cur = std::move(next);
    if (change < opts.threshold) {
      std::vector<double> out(p.num_hypotheses(), 0.0);
      for (std::size_t i = 0; i < support.size(); ++i) out[support[i]] = cur[i];
      return out;
    }
  }
  double grad_norm = 0;
  for (std::size_t i = 0; i < cur.size(); ++i) grad_norm += std::abs(std::log(cur[i] / q[i]) + 1.0);
  throw NumericNonconvergence(grad_norm);
}

// Pushforward of the posterior through h -> h(x): the label distribution the
// proper Bayesian learner samples from at a test point.
inline std::vector<Rat> bayes_predictive(const RandomizedHypothesis& prior,
                                         const LabeledSample& sample, int x,
                                         const FiniteProblem& p) {
  RandomizedHypothesis post = posterior(prior, sample, p);
  std::vector<Rat> dist(p.num_labels(), Rat(0));
  for (int h = 0; h < p.num_hypotheses(); ++h)
    if (post.weights[h] != 0) dist[p.label_of(h, x)] += post.weights[h];
  return dist;
}

inline Rat total_variation(std::span<const Rat> a, std::span<const Rat> b) {
  Rat out = 0;
  for (std::size_t i = 0; i < a.size(); ++i) out += abs(a[i] - b[i]);
  return out / 2;
}

struct MixtureComparison {
  std::vector<Rat> mixture_of_posteriors;
  std::vector<Rat> posterior_of_mixture;
  std::vector<Rat> evidence_masses;  // Q_i(consistent set), per component
  Rat tv_distance;
  bool equal;
};

// Compares sum_i p_i * posterior(Q_i, S) against posterior(sum_i p_i Q_i, S).
// No verdict is presumed: the two sides can differ when the components put
// different total mass on the consistent set, and the report says which.
inline MixtureComparison mix_bayesians_compare(const std::vector<RandomizedHypothesis>& priors,
                                               const std::vector<Rat>& mix_weights,
                                               const LabeledSample& sample,
                                               const FiniteProblem& p) {
  std::vector<int> bad;
  for (std::size_t i = 0; i < priors.size(); ++i)
    if (!sample.empty() && evidence_mass(priors[i], sample, p) == 0)
      bad.push_back(static_cast<int>(i));
  if (!bad.empty()) throw ComponentZeroEvidence(bad);

  MixtureComparison cmp;
  cmp.mixture_of_posteriors.assign(p.num_hypotheses(), Rat(0));
  RandomizedHypothesis mixed_prior{std::vector<Rat>(p.num_hypotheses(), Rat(0))};
  for (std::size_t i = 0; i < priors.size(); ++i) {
    RandomizedHypothesis post = posterior(priors[i], sample, p);
    for (int h = 0; h < p.num_hypotheses(); ++h) {
      cmp.mixture_of_posteriors[h] += mix_weights[i] * post.weights[h];
      mixed_prior.weights[h] += mix_weights[i] * priors[i].weights[h];
    }
    cmp.evidence_masses.push_back(sample.empty() ? Rat(1) : evidence_mass(priors[i], sample, p));
  }
  cmp.posterior_of_mixture = posterior(mixed_prior, sample, p).weights;
  cmp.tv_distance = total_variation(cmp.mixture_of_posteriors, cmp.posterior_of_mixture);
  cmp.equal = cmp.tv_distance == 0;
  return cmp;
}

}  // namespace properlab
