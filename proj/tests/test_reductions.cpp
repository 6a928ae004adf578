#include "properlab/reductions.hpp"

#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

using namespace properlab;

TEST_CASE("dist_between") {
  FiniteProblem p = fixtures::p1();
  Marginal u = fixtures::p1_uniform();
  Predictor h1 = Predictor::from_hypothesis(p, 0);
  Predictor h2 = Predictor::from_hypothesis(p, 1);
  Predictor ones = Predictor::deterministic({1, 1}, 2);

  CHECK(dist_between(h1, h1, u, p) == 0);
  CHECK(dist_between(h1, h2, u, p) == Rat(1, 2));
  CHECK(dist_between(h2, h1, u, p) == dist_between(h1, h2, u, p));
  CHECK(dist_between(ones, h2, u, p) == Rat(1, 2));
}

TEST_CASE("properize") {
  FiniteProblem p = fixtures::p1();
  Marginal u = fixtures::p1_uniform();

  CHECK(properize(Predictor::from_hypothesis(p, 1), u, p) == 1);
  CHECK(properize(Predictor::deterministic({1, 1}, 2), u, p) == 1);
  // Under D = (1, 0) both hypotheses agree with (0, 1) on the support; the
  // tie breaks to the lowest index.
  CHECK(properize(Predictor::deterministic({0, 1}, 2), Marginal{{Rat(1), Rat(0)}}, p) == 0);
}

TEST_CASE("properization pointwise factor 2") {
  FiniteProblem p = fixtures::p1();
  Marginal u = fixtures::p1_uniform();

  SECTION("constant truth: both sides zero, ratio 1") {
    auto rep = properization_bound_check(LearnerSpec::constant(1), u, 1, p);
    CHECK(rep.holds);
  }
  SECTION("improper inner learner is repaired, never more than doubled") {
    std::map<LabeledSample, Predictor> t;
    for (const auto& ws : enumerate_weighted_samples(u, 0, 1, p))
      t.emplace(ws.sample, Predictor::deterministic({1, 1}, 2));
    for (const auto& ws : enumerate_weighted_samples(u, 1, 1, p))
      t.emplace(ws.sample, Predictor::deterministic({1, 1}, 2));
    auto rep = properization_bound_check(LearnerSpec::table_learner(std::move(t)), u, 1, p);
    CHECK(rep.holds);
    CHECK(rep.max_ratio <= 2);
  }
  SECTION("Bayesian inner learner across both marginals") {
    for (const Marginal& m : {fixtures::p1_uniform(), fixtures::p1_skew()}) {
      auto rep = properization_bound_check(
          LearnerSpec::bayesian(RandomizedHypothesis::uniform(2)), m, 2, p);
      CHECK(rep.holds);
    }
  }
}

TEST_CASE("transductive error fixtures") {
  FiniteProblem p = fixtures::p1();
  TransductiveInstance inst{{0, 1}, 1};  // points (x1, x2), truth h2

  SECTION("constant truth learner is perfect") {
    CHECK(transductive_error(LearnerSpec::constant(1), inst, p) == 0);
  }
  SECTION("table learner correct at x1, wrong at x2") {
    std::map<LabeledSample, Predictor> t;
    t.emplace(fixtures::sample({{1, 1}}), Predictor::from_hypothesis(p, 1));
    t.emplace(fixtures::sample({{0, 0}}), Predictor::from_hypothesis(p, 0));
    CHECK(transductive_error(LearnerSpec::table_learner(std::move(t)), inst, p) == Rat(1, 2));
  }
  SECTION("uniform Bayesian averages to 1/4") {
    CHECK(transductive_error(LearnerSpec::bayesian(RandomizedHypothesis::uniform(2)), inst, p) ==
          Rat(1, 4));
  }
}

TEST_CASE("leave-one-out identity and bound") {
  FiniteProblem p = fixtures::p1();
  Marginal u = fixtures::p1_uniform();
  LearnerSpec bayes = LearnerSpec::bayesian(RandomizedHypothesis::uniform(2));

  SECTION("constant truth: both sides zero") {
    LooReport rep = loo_bound_check(LearnerSpec::constant(0), u, 0, 1, p);
    CHECK(rep.expected_error == 0);
    CHECK(rep.transductive_max == 0);
    CHECK(rep.identity_holds);
    CHECK(rep.bound_holds);
  }
  SECTION("p1 fixture: left side 1/8, max transductive 1/4") {
    for (int truth : {0, 1}) {
      LooReport rep = loo_bound_check(bayes, u, truth, 1, p);
      CHECK(rep.expected_error == Rat(1, 8));
      CHECK(rep.loo_identity_value == Rat(1, 8));
      CHECK(rep.transductive_max == Rat(1, 4));
      CHECK(rep.identity_holds);
      CHECK(rep.bound_holds);
    }
  }
  SECTION("identity holds exactly across sizes and marginals") {
    for (const Marginal& m : {fixtures::p1_uniform(), fixtures::p1_skew()})
      for (int mm : {1, 2}) {
        LooReport rep = loo_bound_check(bayes, m, 1, mm, p);
        CHECK(rep.identity_holds);
        CHECK(rep.bound_holds);
      }
  }
}

TEST_CASE("distribution-fixed learner in the transductive model") {
  FiniteProblem p = fixtures::p1();
  LearnerSpec bayes = LearnerSpec::bayesian(RandomizedHypothesis::uniform(2));
  TransductiveInstance inst{{0, 1}, 1};

  SECTION("constant truth is perfect") {
    CHECK(df_transductive_error_exact(LearnerSpec::constant(1), inst, p) == 0);
  }
  SECTION("exact fixture: 1/4") {
    CHECK(df_transductive_error_exact(bayes, inst, p) == Rat(1, 4));
  }
  SECTION("factor-e bound on the fixture, both sides exact") {
    Rat lhs = df_transductive_error_exact(bayes, inst, p);
    Marginal unif_sx{{Rat(1, 2), Rat(1, 2)}};
    Rat rhs = expected_error_exact(bayes, unif_sx, 1, 1, p);
    CHECK(rhs == Rat(1, 8));
    CHECK(to_double(lhs) <= std::numbers::e * to_double(rhs) + 1e-12);
  }
  SECTION("duplicated held-out point echoes the observed label") {
    TransductiveInstance dup{{0, 0, 1}, 1};
    Rat err = df_transductive_error_exact(bayes, dup, p);
    // Holding out either x1 leaves the other x1 in training: zero loss there.
    CHECK(err <= Rat(1, 3));
  }
  SECTION("Monte Carlo mode approximates and reproduces") {
    McEstimate a = df_transductive_error_mc(bayes, inst, p, 20000, 5);
    McEstimate b = df_transductive_error_mc(bayes, inst, p, 20000, 5);
    CHECK(a.estimate == b.estimate);
    CHECK(std::abs(a.estimate - 0.25) <= 3 * a.half_width + 1e-9);
  }
}

TEST_CASE("avoidance probability") {
  CHECK(avoidance_probability(2) == Rat(1, 2));
  CHECK(avoidance_probability(3) == Rat(4, 9));
  CHECK(avoidance_probability(10) == rat_pow(Rat(9, 10), 9));

  SECTION("approaches 1/e from above") {
    Rat f = avoidance_probability(1000000);
    CHECK(std::abs(to_double(f) - 1.0 / std::numbers::e) <= 1e-6);
    CHECK(to_double(f) >= 1.0 / std::numbers::e);
  }
  SECTION("weakly decreasing at the small end, exactly") {
    Rat prev = avoidance_probability(2);
    for (unsigned long m = 3; m <= 200; ++m) {
      Rat cur = avoidance_probability(m);
      CHECK(cur <= prev);
      // 367879442/10^9 >= 1/e, so staying above it certifies f(m) >= 1/e.
      CHECK(cur >= Rat(367879442, 1000000000));
      prev = cur;
    }
  }
}

TEST_CASE("confidence boost") {
  FiniteProblem p = fixtures::p1();
  Marginal u = fixtures::p1_uniform();
  LearnerSpec bayes = LearnerSpec::bayesian(RandomizedHypothesis::uniform(2));

  SECTION("constant truth never fails") {
    BoostReport rep = confidence_boost(LearnerSpec::constant(1), 3, 5, u, 1, 1, Rat(1, 100),
                                       2000, 11, p);
    CHECK(rep.failures == 0);
  }
  SECTION("boosting beats the single copy") {
    BoostReport single = confidence_boost(bayes, 1, 20, u, 1, 1, Rat(1, 4), 10000, 11, p);
    BoostReport boosted = confidence_boost(bayes, 5, 20, u, 1, 1, Rat(1, 4), 10000, 11, p);
    // Single copy fails iff the sample leaves the posterior split: rate ~ 1/2.
    CHECK(single.failure_rate > 0.4);
    CHECK(boosted.failure_rate < single.failure_rate);
  }
  SECTION("k=1 with v=0 selects the single copy deterministically") {
    BoostReport a = confidence_boost(bayes, 1, 0, u, 1, 1, Rat(1, 4), 5000, 3, p);
    BoostReport b = confidence_boost(bayes, 1, 0, u, 1, 1, Rat(1, 4), 5000, 3, p);
    CHECK(a.failures == b.failures);
    CHECK(std::abs(a.failure_rate - 0.5) < 0.05);
  }
}

TEST_CASE("distribution-fixed sample complexity") {
  FiniteProblem p = fixtures::p1();
  Marginal u = fixtures::p1_uniform();

  SECTION("singleton class learns at the minimum legal size") {
    SampleComplexityQuery q{Rat(1, 100), Rat(1, 20), 3};
    auto r = sample_complexity_df(fixtures::singleton(), Marginal::uniform(2), q);
    REQUIRE(r.n.has_value());
    CHECK(*r.n == 1);
    for (const Rat& v : r.values) CHECK(v == 0);
  }
  SECTION("p1 at epsilon 1/8 needs exactly one sample") {
    SampleComplexityQuery q{Rat(1, 8), Rat(1, 20), 3};
    auto r = sample_complexity_df(p, u, q);
    REQUIRE(r.n.has_value());
    CHECK(*r.n == 1);
    CHECK(r.values[0] == Rat(1, 8));
    CHECK(r.values[1] == Rat(1, 16));
    CHECK(r.values[2] == Rat(1, 32));
  }
  SECTION("p1 at epsilon 1/100 is out of reach by n=3") {
    SampleComplexityQuery q{Rat(1, 100), Rat(1, 20), 3};
    auto r = sample_complexity_df(p, u, q);
    CHECK_FALSE(r.n.has_value());
  }
}

TEST_CASE("classic bracket over a marginal grid") {
  FiniteProblem p = fixtures::p1();
  std::vector<Marginal> grid = {fixtures::p1_uniform(), fixtures::p1_skew()};

  SECTION("single-marginal grid: lower equals that complexity") {
    SampleComplexityQuery q{Rat(1, 8), Rat(1, 20), 3};
    auto b = classic_bracket(p, {fixtures::p1_uniform()}, q);
    REQUIRE(b.lower.has_value());
    CHECK(*b.lower == 1);
  }
  SECTION("p1 grid at epsilon 1/8") {
    SampleComplexityQuery q{Rat(1, 8), Rat(1, 20), 3};
    auto b = classic_bracket(p, grid, q);
    REQUIRE(b.lower.has_value());
    CHECK(*b.lower == 1);
    CHECK(b.witness_epsilon < q.epsilon);
    // Each grid marginal's DF complexity sits at or below the lower bound.
    for (const auto& df : b.df_per_marginal) {
      REQUIRE(df.has_value());
      CHECK(*df <= *b.lower);
    }
    if (b.upper_witness.has_value()) CHECK(*b.lower <= *b.upper_witness);
  }
}
