#pragma once

#include "properlab/rational.hpp"

#include <cstddef>
#include <vector>

namespace properlab::lp {

enum class Sense { LessEq, Eq, GreaterEq };
enum class Status { Optimal, Infeasible, Unbounded };

template <class Field>
struct Constraint {
  std::vector<Field> coeffs;
  Sense sense = Sense::LessEq;
  Field rhs{};
};

template <class Field>
struct Result {
  Status status = Status::Optimal;
  Field objective{};
  std::vector<Field> x;
  long pivots = 0;
  bool degenerate = false;
};

// Dense two-phase primal simplex over an exact ordered field, maximizing
// c'x subject to mixed <=/= />= rows and x >= 0. Pivoting follows Bland's
// rule throughout, so termination is guaranteed without perturbation.
template <class Field>
class Simplex {
 public:
  Result<Field> maximize(const std::vector<Field>& objective,
                         const std::vector<Constraint<Field>>& constraints,
                         long pivot_cap = 500000) {
    n_struct_ = objective.size();
    const std::size_t m = constraints.size();

    // Column layout: structural | one slack per inequality | artificials.
    std::size_t num_slacks = 0;
    for (const auto& c : constraints)
      if (c.sense != Sense::Eq) ++num_slacks;
    n_total_ = n_struct_ + num_slacks;

    rows_.assign(m, {});
    basis_.assign(m, 0);
    active_.assign(m, true);
    std::vector<std::size_t> artificial_rows;

    std::size_t slack_at = n_struct_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& c = constraints[i];
      std::vector<Field> row(n_total_ + 1, Field(0));
      for (std::size_t j = 0; j < c.coeffs.size(); ++j) row[j] = c.coeffs[j];
      row[n_total_] = c.rhs;
      Field slack_sign(0);
      if (c.sense == Sense::LessEq) slack_sign = 1;
      if (c.sense == Sense::GreaterEq) slack_sign = -1;
      std::size_t slack_col = n_total_;  // sentinel: none
      if (c.sense != Sense::Eq) {
        slack_col = slack_at++;
        row[slack_col] = slack_sign;
      }
      if (row[n_total_] < 0)
        for (auto& v : row) v = -v;
      rows_[i] = std::move(row);
      // Slack usable as the initial basic variable only with coefficient +1.
      if (slack_col != n_total_ && rows_[i][slack_col] == Field(1)) {
        basis_[i] = slack_col;
      } else {
        basis_[i] = kNeedsArtificial;
        artificial_rows.push_back(i);
      }
    }

    // Append artificial columns where no slack could seed the basis.
    num_artificials_ = artificial_rows.size();
    const std::size_t width = n_total_ + num_artificials_ + 1;
    for (auto& row : rows_) {
      row.insert(row.end() - 1, num_artificials_, Field(0));
      row.resize(width, Field(0));
    }
    for (std::size_t k = 0; k < artificial_rows.size(); ++k) {
      std::size_t i = artificial_rows[k];
      std::size_t col = n_total_ + k;
      rows_[i][col] = 1;
      basis_[i] = col;
    }

    Result<Field> result;

    if (num_artificials_ > 0) {
      // Phase 1: maximize -sum(artificials).
      std::vector<Field> phase1(n_total_ + num_artificials_, Field(0));
      for (std::size_t k = 0; k < num_artificials_; ++k) phase1[n_total_ + k] = Field(-1);
      load_cost(phase1);
      if (!run(result, pivot_cap, /*allow_artificial=*/true)) return result;
      if (cost_value() != 0) {
        result.status = Status::Infeasible;
        return result;
      }
      expel_artificials(result);
    }

    std::vector<Field> phase2(n_total_ + num_artificials_, Field(0));
    for (std::size_t j = 0; j < n_struct_; ++j) phase2[j] = objective[j];
    load_cost(phase2);
    if (!run(result, pivot_cap, /*allow_artificial=*/false)) return result;

    result.status = Status::Optimal;
    result.objective = cost_value();
    result.x.assign(n_struct_, Field(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!active_[i]) continue;
      if (basis_[i] < n_struct_) result.x[basis_[i]] = rows_[i].back();
      if (rows_[i].back() == 0) result.degenerate = true;
    }
    // A zero reduced cost on a nonbasic real column marks an optimal face
    // with more than one vertex.
    std::vector<char> is_basic(n_total_ + num_artificials_, 0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (active_[i]) is_basic[basis_[i]] = 1;
    for (std::size_t j = 0; j < n_total_; ++j)
      if (!is_basic[j] && cost_[j] == 0) result.degenerate = true;
    return result;
  }

 private:
  static constexpr std::size_t kNeedsArtificial = static_cast<std::size_t>(-1);

  // cost_ holds z_j - c_j per column plus the objective value at the back.
  void load_cost(const std::vector<Field>& c) {
    objective_coeffs_ = c;
    cost_.assign(c.size() + 1, Field(0));
    for (std::size_t j = 0; j < c.size(); ++j) cost_[j] = -c[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!active_[i]) continue;
      const Field& cb = objective_coeffs_[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < cost_.size(); ++j) cost_[j] += cb * rows_[i][j];
    }
  }

  Field cost_value() const { return cost_.back(); }

  void pivot(std::size_t r, std::size_t col) {
    const Field inv = Field(1) / rows_[r][col];
    for (auto& v : rows_[r]) v *= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || !active_[i]) continue;
      const Field factor = rows_[i][col];
      if (factor == 0) continue;
      for (std::size_t j = 0; j < rows_[i].size(); ++j) rows_[i][j] -= factor * rows_[r][j];
      rows_[i][col] = 0;  // keep the unit column exact
    }
    const Field cfac = cost_[col];
    if (cfac != 0) {
      for (std::size_t j = 0; j < cost_.size(); ++j) cost_[j] -= cfac * rows_[r][j];
      cost_[col] = 0;
    }
    basis_[r] = col;
  }

  bool run(Result<Field>& result, long pivot_cap, bool allow_artificial) {
    const std::size_t cols = n_total_ + (allow_artificial ? num_artificials_ : 0);
    for (;;) {
      // Bland: entering column = smallest index with negative reduced cost.
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j)
        if (cost_[j] < 0) {
          enter = j;
          break;
        }
      if (enter == cols) return true;

      std::size_t leave = rows_.size();
      Field best_ratio(0);
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!active_[i] || rows_[i][enter] <= 0) continue;
        Field ratio = rows_[i].back() / rows_[i][enter];
        if (leave == rows_.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == rows_.size()) {
        result.status = Status::Unbounded;
        return false;
      }
      if (best_ratio == 0) result.degenerate = true;
      pivot(leave, enter);
      if (++result.pivots > pivot_cap)
        throw std::logic_error("simplex pivot cap exceeded; anti-cycling invariant broken");
    }
  }

  // After phase 1, swap still-basic artificials for real columns, or retire
  // rows that turned out redundant.
  void expel_artificials(Result<Field>& result) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!active_[i] || basis_[i] < n_total_) continue;
      std::size_t col = n_total_;
      for (std::size_t j = 0; j < n_total_; ++j)
        if (rows_[i][j] != 0) {
          col = j;
          break;
        }
      if (col == n_total_) {
        active_[i] = false;
        continue;
      }
      pivot(i, col);
      ++result.pivots;
    }
  }

  std::size_t n_struct_ = 0;
  std::size_t n_total_ = 0;
  std::size_t num_artificials_ = 0;
  std::vector<std::vector<Field>> rows_;
  std::vector<Field> cost_;
  std::vector<Field> objective_coeffs_;
  std::vector<std::size_t> basis_;
  std::vector<char> active_;
};

template <class Field>
Result<Field> maximize(const std::vector<Field>& objective,
                       const std::vector<Constraint<Field>>& constraints,
                       long pivot_cap = 500000) {
  Simplex<Field> s;
  return s.maximize(objective, constraints, pivot_cap);
}

}  // namespace properlab::lp
