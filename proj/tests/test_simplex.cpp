#include "properlab/simplex.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace properlab;
using lp::Constraint;
using lp::Sense;
using lp::Status;

namespace {

Constraint<Rat> row(std::vector<Rat> coeffs, Sense sense, Rat rhs) {
  return {std::move(coeffs), sense, std::move(rhs)};
}

}  // namespace

TEST_CASE("basic maximization") {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6 -> x = 4, y = 0, obj 12
  auto result = lp::maximize<Rat>({Rat(3), Rat(2)},
                                  {row({Rat(1), Rat(1)}, Sense::LessEq, Rat(4)),
                                   row({Rat(1), Rat(3)}, Sense::LessEq, Rat(6))});
  REQUIRE(result.status == Status::Optimal);
  CHECK(result.objective == 12);
  CHECK(result.x == std::vector<Rat>{Rat(4), Rat(0)});
}

TEST_CASE("equality constraints via two-phase start") {
  // max x + y s.t. x + 2y = 4, 3x + 2y <= 6 -> x = 1, y = 3/2, obj 5/2
  auto result = lp::maximize<Rat>({Rat(1), Rat(1)},
                                  {row({Rat(1), Rat(2)}, Sense::Eq, Rat(4)),
                                   row({Rat(3), Rat(2)}, Sense::LessEq, Rat(6))});
  REQUIRE(result.status == Status::Optimal);
  CHECK(result.objective == Rat(5, 2));
  CHECK(result.x == std::vector<Rat>{Rat(1), Rat(3, 2)});
}

TEST_CASE("greater-equal rows") {
  // min x + y s.t. x + 2y >= 3, 2x + y >= 3 (as max of the negation)
  auto result = lp::maximize<Rat>({Rat(-1), Rat(-1)},
                                  {row({Rat(1), Rat(2)}, Sense::GreaterEq, Rat(3)),
                                   row({Rat(2), Rat(1)}, Sense::GreaterEq, Rat(3))});
  REQUIRE(result.status == Status::Optimal);
  CHECK(result.objective == -2);
  CHECK(result.x == std::vector<Rat>{Rat(1), Rat(1)});
}

TEST_CASE("infeasible and unbounded are reported") {
  auto infeasible = lp::maximize<Rat>(
      {Rat(1)}, {row({Rat(1)}, Sense::LessEq, Rat(1)), row({Rat(1)}, Sense::GreaterEq, Rat(2))});
  CHECK(infeasible.status == Status::Infeasible);

  auto unbounded = lp::maximize<Rat>({Rat(1), Rat(0)},
                                     {row({Rat(0), Rat(1)}, Sense::LessEq, Rat(1))});
  CHECK(unbounded.status == Status::Unbounded);
}

TEST_CASE("degenerate vertex solves without cycling") {
  // Classic degeneracy: three planes through one vertex.
  auto result = lp::maximize<Rat>({Rat(2), Rat(3)},
                                  {row({Rat(1), Rat(1)}, Sense::LessEq, Rat(2)),
                                   row({Rat(1), Rat(2)}, Sense::LessEq, Rat(3)),
                                   row({Rat(0), Rat(1)}, Sense::LessEq, Rat(1))});
  REQUIRE(result.status == Status::Optimal);
  CHECK(result.objective == 5);
  CHECK(result.degenerate);
}

TEST_CASE("matching pennies as an LP") {
  // Payoffs shifted to [0,1]: value of the symmetric 2x2 game is 1/2.
  // max v s.t. for each column c: sum_r lambda_r M[r][c] >= v, sum lambda = 1.
  std::vector<std::vector<Rat>> m = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  std::vector<Constraint<Rat>> rows;
  for (int c = 0; c < 2; ++c)
    rows.push_back(row({m[0][c], m[1][c], Rat(-1)}, Sense::GreaterEq, Rat(0)));
  rows.push_back(row({Rat(1), Rat(1), Rat(0)}, Sense::Eq, Rat(1)));
  auto result = lp::maximize<Rat>({Rat(0), Rat(0), Rat(1)}, rows);
  REQUIRE(result.status == Status::Optimal);
  CHECK(result.objective == Rat(1, 2));
  CHECK(result.x[0] == Rat(1, 2));
  CHECK(result.x[1] == Rat(1, 2));
}

TEST_CASE("random LPs match a rational brute-force vertex scan") {
  // Small random instances with 2 variables: enumerate all constraint-pair
  // intersections plus axis intersections as candidate vertices.
  Rat big(1000000);
  std::uint64_t state = 12345;
  auto next = [&] {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<long>((state >> 33) % 9) - 4;
  };
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Constraint<Rat>> rows;
    for (int i = 0; i < 4; ++i) {
      Rat a(next()), b(next());
      Rat c(static_cast<long>((state >> 20) % 7) + 1);
      rows.push_back(row({a, b}, Sense::LessEq, c));
    }
    std::vector<Rat> obj = {Rat(next()), Rat(next())};
    auto result = lp::maximize<Rat>(obj, rows);
    if (result.status != Status::Optimal) continue;

    // Feasibility of the reported point, exactly.
    for (const auto& r : rows)
      CHECK(r.coeffs[0] * result.x[0] + r.coeffs[1] * result.x[1] <= r.rhs);
    CHECK(result.x[0] >= 0);
    CHECK(result.x[1] >= 0);
    CHECK(obj[0] * result.x[0] + obj[1] * result.x[1] == result.objective);

    // No candidate vertex beats it.
    auto feasible = [&](const Rat& x, const Rat& y) {
      if (x < 0 || y < 0) return false;
      for (const auto& r : rows)
        if (r.coeffs[0] * x + r.coeffs[1] * y > r.rhs) return false;
      return true;
    };
    Rat best = result.objective;
    auto consider = [&](const Rat& x, const Rat& y) {
      if (feasible(x, y)) CHECK(obj[0] * x + obj[1] * y <= best);
    };
    consider(Rat(0), Rat(0));
    std::vector<std::pair<std::vector<Rat>, Rat>> lines;
    for (const auto& r : rows) lines.push_back({r.coeffs, r.rhs});
    lines.push_back({{Rat(1), Rat(0)}, Rat(0)});
    lines.push_back({{Rat(0), Rat(1)}, Rat(0)});
    for (std::size_t i = 0; i < lines.size(); ++i)
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        Rat det = lines[i].first[0] * lines[j].first[1] - lines[i].first[1] * lines[j].first[0];
        if (det == 0) continue;
        Rat x = (lines[i].second * lines[j].first[1] - lines[i].first[1] * lines[j].second) / det;
        Rat y = (lines[i].first[0] * lines[j].second - lines[i].second * lines[j].first[0]) / det;
        consider(x, y);
      }
  }
}
