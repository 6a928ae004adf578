#include "properlab/evaluation.hpp"

#include "fixtures.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace properlab;

TEST_CASE("rational parsing") {
  CHECK(parse_rational("1/8") == Rat(1, 8));
  CHECK(parse_rational("-3/6") == Rat(-1, 2));
  CHECK(parse_rational("7") == Rat(7));
  CHECK(parse_rational("0.25") == Rat(1, 4));
  CHECK(parse_rational(" 4/5 ") == Rat(4, 5));
  CHECK(format_rational(Rat(1, 8)) == "1/8");
  CHECK(format_rational(Rat(0)) == "0");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("a/2"), ParseError);
  CHECK_THROWS_AS(parse_rational("1.2.3"), ParseError);
  CHECK_THROWS_AS(parse_rational(""), ParseError);
}

TEST_CASE("validation accepts metrics and rejects violations") {
  FiniteProblem p = fixtures::p1();
  CHECK_NOTHROW(validate_problem(p));

  SECTION("zero-one on three labels") {
    p.labels = {"a", "b", "c"};
    p.loss = FiniteProblem::zero_one_loss(3);
    p.hypotheses = {{0, 1}, {2, 0}};
    CHECK_NOTHROW(validate_problem(p));
  }
  SECTION("slack triangle accepted: 1.0 <= 0.9 + 0.9") {
    p.labels = {"a", "b", "c"};
    p.hypotheses = {{0, 1}, {2, 0}};
    p.loss = {{Rat(0), Rat(9, 10), Rat(1)},
              {Rat(9, 10), Rat(0), Rat(9, 10)},
              {Rat(1), Rat(9, 10), Rat(0)}};
    CHECK_NOTHROW(validate_problem(p));
  }
  SECTION("broken triangle names the triple: 0.5 > 0.1 + 0.1") {
    p.labels = {"a", "b", "c"};
    p.hypotheses = {{0, 1}, {2, 0}};
    p.loss = {{Rat(0), Rat(1, 10), Rat(1, 2)},
              {Rat(1, 10), Rat(0), Rat(1, 10)},
              {Rat(1, 2), Rat(1, 10), Rat(0)}};
    try {
      validate_problem(p);
      FAIL("expected NonMetricLoss");
    } catch (const ValidationError& e) {
      CHECK(e.fault() == Fault::NonMetricLoss);
      CHECK(std::string(e.what()).find("(a,b,c)") != std::string::npos);
    }
  }
  SECTION("duplicate hypotheses rejected") {
    p.hypotheses = {{0, 1}, {0, 1}};
    try {
      validate_problem(p);
      FAIL("expected DuplicateHypothesis");
    } catch (const ValidationError& e) {
      CHECK(e.fault() == Fault::DuplicateHypothesis);
    }
  }
  SECTION("empty class rejected") {
    p.hypotheses = {};
    try {
      validate_problem(p);
      FAIL("expected EmptyClass");
    } catch (const ValidationError& e) {
      CHECK(e.fault() == Fault::EmptyClass);
    }
  }
  SECTION("loss entries outside [0,1] rejected") {
    p.loss[0][1] = Rat(3, 2);
    p.loss[1][0] = Rat(3, 2);
    try {
      validate_problem(p);
      FAIL("expected OutOfRangeEntry");
    } catch (const ValidationError& e) {
      CHECK(e.fault() == Fault::OutOfRangeEntry);
    }
  }
  SECTION("nonzero diagonal rejected") {
    p.loss[0][0] = Rat(1, 10);
    CHECK_THROWS_AS(validate_problem(p), ValidationError);
  }
  SECTION("marginals must sum to one") {
    Marginal bad{{Rat(1, 2), Rat(1, 3)}};
    CHECK_THROWS_AS(validate_marginal(bad, p), ValidationError);
    CHECK_THROWS_AS(validate_marginal(Marginal{{Rat(0), Rat(0)}}, p), ValidationError);
  }
}

TEST_CASE("empirical risk") {
  FiniteProblem p = fixtures::p1();
  LabeledSample s = fixtures::sample({{0, 0}, {1, 1}});

  CHECK(empirical_risk(Predictor::from_hypothesis(p, 1), s, p) == 0);
  CHECK(empirical_risk(Predictor::from_hypothesis(p, 0), s, p) == Rat(1, 2));

  Predictor coin;
  coin.rows = {{Rat(1, 2), Rat(1, 2)}, {Rat(1, 2), Rat(1, 2)}};
  CHECK(empirical_risk(coin, s, p) == Rat(1, 2));
  CHECK(empirical_risk(coin, fixtures::sample({{0, 1}}), p) == Rat(1, 2));

  CHECK_THROWS_AS(empirical_risk(coin, LabeledSample{}, p), EmptySample);
}

TEST_CASE("true error") {
  FiniteProblem p = fixtures::p1();
  CHECK(true_error(Predictor::from_hypothesis(p, 1), fixtures::p1_uniform(), 1, p) == 0);
  CHECK(true_error(Predictor::from_hypothesis(p, 0), fixtures::p1_uniform(), 1, p) == Rat(1, 2));
  CHECK(true_error(Predictor::from_hypothesis(p, 0), fixtures::p1_skew(), 1, p) == Rat(1, 5));
}

TEST_CASE("consistent set") {
  FiniteProblem p = fixtures::p1();
  CHECK(consistent_set(LabeledSample{}, p) == std::vector<int>{0, 1});
  CHECK(consistent_set(fixtures::sample({{0, 0}}), p) == std::vector<int>{0, 1});
  CHECK(consistent_set(fixtures::sample({{1, 1}}), p) == std::vector<int>{1});
  CHECK(consistent_set(fixtures::sample({{1, 0}}), p) == std::vector<int>{0});
}

TEST_CASE("sample enumeration") {
  FiniteProblem p = fixtures::p1();

  SECTION("n=0 gives the single empty sample") {
    auto ws = enumerate_weighted_samples(fixtures::p1_uniform(), 0, 0, p);
    REQUIRE(ws.size() == 1);
    CHECK(ws[0].sample.empty());
    CHECK(ws[0].prob == 1);
  }
  SECTION("uniform support 2, n=2: four sequences of probability 1/4") {
    auto ws = enumerate_weighted_samples(fixtures::p1_uniform(), 0, 2, p);
    REQUIRE(ws.size() == 4);
    for (const auto& w : ws) CHECK(w.prob == Rat(1, 4));
  }
  SECTION("skewed marginal, n=1") {
    auto ws = enumerate_weighted_samples(fixtures::p1_skew(), 0, 1, p);
    REQUIRE(ws.size() == 2);
    CHECK(ws[0].prob == Rat(4, 5));
    CHECK(ws[1].prob == Rat(1, 5));
  }
  SECTION("probability conservation, sequence and multiset forms") {
    Marginal m{{Rat(3, 10), Rat(1, 2), Rat(1, 5)}};
    FiniteProblem p3;
    p3.domain = {"x1", "x2", "x3"};
    p3.labels = {"0", "1"};
    p3.hypotheses = {{0, 1, 0}};
    p3.loss = FiniteProblem::zero_one_loss(2);
    for (int n = 0; n <= 4; ++n) {
      for (bool collapse : {false, true}) {
        Rat total = 0;
        for (const auto& w : enumerate_weighted_samples(m, 0, n, p3, kDefaultEnumerationCap,
                                                        collapse))
          total += w.prob;
        CHECK(total == 1);
      }
    }
  }
  SECTION("cap exceeded reports the required count") {
    Marginal m = Marginal::uniform(2);
    try {
      enumerate_weighted_samples(m, 0, 4, p, 10);
      FAIL("expected EnumerationCapExceeded");
    } catch (const EnumerationCapExceeded& e) {
      CHECK(e.required() == 16);
    }
  }
}

TEST_CASE("expected error, exact") {
  FiniteProblem p = fixtures::p1();
  Marginal u = fixtures::p1_uniform();
  LearnerSpec bayes = LearnerSpec::bayesian(RandomizedHypothesis::uniform(2));

  CHECK(expected_error_exact(LearnerSpec::constant(0), u, 0, 3, p) == 0);
  CHECK(expected_error_exact(bayes, u, 0, 1, p) == Rat(1, 8));
  CHECK(expected_error_exact(bayes, u, 1, 1, p) == Rat(1, 8));

  SECTION("multiset collapse yields identical expectations") {
    // Same expectation computed from collapsed enumeration, by hand.
    for (int truth : {0, 1}) {
      Rat direct = expected_error_exact(bayes, u, truth, 2, p);
      Rat collapsed = 0;
      for (const auto& ws :
           enumerate_weighted_samples(u, truth, 2, p, kDefaultEnumerationCap, true))
        collapsed += ws.prob * true_error(evaluate_learner(bayes, ws.sample, u, p), u, truth, p);
      CHECK(direct == collapsed);
    }
  }
}

TEST_CASE("expected error, Monte Carlo") {
  FiniteProblem p = fixtures::p1();
  Marginal u = fixtures::p1_uniform();
  LearnerSpec bayes = LearnerSpec::bayesian(RandomizedHypothesis::uniform(2));

  SECTION("constant truth gives zero with zero width") {
    McEstimate est = expected_error_mc(LearnerSpec::constant(1), u, 1, 2, 100, 42, p);
    CHECK(est.estimate == 0.0);
    CHECK(est.half_width == 0.0);
  }
  SECTION("estimates the exact value") {
    McEstimate est = expected_error_mc(bayes, u, 0, 1, 100000, 7, p);
    CHECK(std::abs(est.estimate - 0.125) < 0.01);
    CHECK(std::abs(est.estimate - 0.125) <= 3 * est.half_width);
  }
  SECTION("same seed, same bits") {
    McEstimate a = expected_error_mc(bayes, u, 0, 1, 5000, 99, p);
    McEstimate b = expected_error_mc(bayes, u, 0, 1, 5000, 99, p);
    CHECK(a.estimate == b.estimate);
    CHECK(a.half_width == b.half_width);
  }
}

TEST_CASE("estimator consistency over a randomized corpus") {
  // 200 random (problem, truth, n) draws: the MC estimate must sit within
  // three half-widths of the exact value in at least 99% of cases.
  Rng rng(2024);
  int ok = 0, total = 0;
  for (int i = 0; i < 200; ++i) {
    FiniteProblem p;
    int nx = 2 + static_cast<int>(rng.below(2));
    int ny = 2;
    for (int x = 0; x < nx; ++x) p.domain.push_back("x" + std::to_string(x));
    p.labels = {"0", "1"};
    p.loss = FiniteProblem::zero_one_loss(ny);
    std::set<std::vector<int>> rows;
    int nh = 2 + static_cast<int>(rng.below(2));
    while (static_cast<int>(rows.size()) < nh) {
      std::vector<int> row(nx);
      for (int x = 0; x < nx; ++x) row[x] = static_cast<int>(rng.below(ny));
      rows.insert(row);
    }
    p.hypotheses.assign(rows.begin(), rows.end());

    Marginal m = Marginal::uniform(nx);
    int truth = static_cast<int>(rng.below(p.num_hypotheses()));
    int n = 1 + static_cast<int>(rng.below(2));
    LearnerSpec bayes = LearnerSpec::bayesian(RandomizedHypothesis::uniform(p.num_hypotheses()));

    Rat exact = expected_error_exact(bayes, m, truth, n, p);
    McEstimate est = expected_error_mc(bayes, m, truth, n, 2000, 1000 + i, p);
    ++total;
    if (std::abs(est.estimate - to_double(exact)) <= 3 * est.half_width + 1e-12) ++ok;
  }
  CHECK(ok >= total * 99 / 100);
}
