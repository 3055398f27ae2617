#pragma once

#include <vector>

#include "mtra/errors.hpp"
#include "mtra/rational.hpp"

namespace mtra {

// Small dense LP over exact rationals. All variables are nonnegative;
// bounds other than x >= 0 are expressed as constraint rows.
struct LinearProgram {
  enum class Rel { le, ge, eq };
  struct Row {
    std::vector<Rat> coef;  // dense, size num_vars
    Rel rel;
    Rat rhs;
  };

  int num_vars = 0;
  std::vector<Rat> objective;  // maximized; empty means pure feasibility
  std::vector<Row> rows;

  void add_row(std::vector<Rat> coef, Rel rel, Rat rhs) {
    if (static_cast<int>(coef.size()) != num_vars) throw ShapeError("row width mismatch");
    rows.push_back({std::move(coef), rel, std::move(rhs)});
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rat value;               // exact objective at the returned point
  std::vector<Rat> point;  // size num_vars, satisfies every row exactly
};

namespace detail {

// Two-phase primal simplex on a dense rational tableau. Bland's rule for
// both the entering and the leaving choice, so cycling cannot occur.
class SimplexTableau {
 public:
  SimplexTableau(const LinearProgram& lp) : nvars_(lp.num_vars) {
    if (static_cast<int>(lp.objective.size()) != 0 &&
        static_cast<int>(lp.objective.size()) != lp.num_vars)
      throw ShapeError("objective width mismatch");
    m_ = static_cast<int>(lp.rows.size());
    // Column layout: structurals, then one slack/surplus per inequality,
    // then one artificial per >=/= row, then rhs.
    int nslack = 0, nart = 0;
    std::vector<LinearProgram::Row> rows = lp.rows;
    for (auto& r : rows) {
      if (r.rhs < 0) {  // normalize to rhs >= 0
        for (auto& c : r.coef) c = -c;
        r.rhs = -r.rhs;
        r.rel = r.rel == LinearProgram::Rel::le   ? LinearProgram::Rel::ge
                : r.rel == LinearProgram::Rel::ge ? LinearProgram::Rel::le
                                                  : LinearProgram::Rel::eq;
      }
      if (r.rel != LinearProgram::Rel::eq) ++nslack;
      if (r.rel != LinearProgram::Rel::le) ++nart;
    }
    slack0_ = nvars_;
    art0_ = nvars_ + nslack;
    ncols_ = art0_ + nart;
    t_.assign(m_ + 1, std::vector<Rat>(ncols_ + 1, Rat(0)));
    basis_.assign(m_, -1);
    int si = slack0_, ai = art0_;
    for (int i = 0; i < m_; ++i) {
      const auto& r = rows[i];
      for (int j = 0; j < nvars_; ++j) t_[i][j] = r.coef[j];
      t_[i][ncols_] = r.rhs;
      if (r.rel == LinearProgram::Rel::le) {
        t_[i][si] = 1;
        basis_[i] = si++;
      } else if (r.rel == LinearProgram::Rel::ge) {
        t_[i][si] = -1;
        ++si;
        t_[i][ai] = 1;
        basis_[i] = ai++;
      } else {
        t_[i][ai] = 1;
        basis_[i] = ai++;
      }
    }
  }

  LpResult solve(const LinearProgram& lp) {
    // Phase 1: minimize the sum of artificials.
    if (art0_ < ncols_) {
      std::vector<Rat> cost(ncols_, Rat(0));
      for (int j = art0_; j < ncols_; ++j) cost[j] = 1;
      load_cost(cost);
      if (!run(/*allow_art=*/true))
        throw InternalError("phase 1 is bounded below and cannot diverge");
      if (t_[m_][ncols_] != 0) return {LpStatus::infeasible, Rat(0), {}};
      evict_artificials();
    }
    // Phase 2: minimize the negated objective (we maximize).
    std::vector<Rat> cost(ncols_, Rat(0));
    for (int j = 0; j < nvars_ && j < static_cast<int>(lp.objective.size()); ++j)
      cost[j] = -lp.objective[j];
    load_cost(cost);
    if (!run(/*allow_art=*/false)) return {LpStatus::unbounded, Rat(0), {}};
    LpResult res;
    res.status = LpStatus::optimal;
    res.point.assign(nvars_, Rat(0));
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < nvars_) res.point[basis_[i]] = t_[i][ncols_];
    res.value = 0;
    for (int j = 0; j < static_cast<int>(lp.objective.size()); ++j)
      res.value += lp.objective[j] * res.point[j];
    return res;
  }

 private:
  // Resets row m_ to the reduced costs of `cost` under the current basis.
  // The rhs cell of the row then carries minus the current objective.
  void load_cost(const std::vector<Rat>& cost) {
    for (int j = 0; j <= ncols_; ++j) t_[m_][j] = j < ncols_ ? cost[j] : Rat(0);
    for (int i = 0; i < m_; ++i) {
      const Rat& cb = cost[basis_[i]];
      if (cb == 0) continue;
      for (int j = 0; j <= ncols_; ++j) t_[m_][j] -= cb * t_[i][j];
    }
  }

  // Returns false on unboundedness.
  bool run(bool allow_art) {
    for (;;) {
      int enter = -1;
      int limit = allow_art ? ncols_ : art0_;
      for (int j = 0; j < limit; ++j)
        if (t_[m_][j] < 0) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      Rat best;
      for (int i = 0; i < m_; ++i) {
        if (t_[i][enter] <= 0) continue;
        Rat ratio = t_[i][ncols_] / t_[i][enter];
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(int r, int j) {
    const Rat piv = t_[r][j];
    for (int k = 0; k <= ncols_; ++k) t_[r][k] /= piv;
    for (int i = 0; i <= m_; ++i) {
      if (i == r || t_[i][j] == 0) continue;
      const Rat f = t_[i][j];
      for (int k = 0; k <= ncols_; ++k) t_[i][k] -= f * t_[r][k];
    }
    basis_[r] = j;
  }

  // After phase 1 at value 0, pivot leftover artificials out of the basis
  // where possible; rows with no real coefficients are redundant and inert.
  void evict_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art0_) continue;
      for (int j = 0; j < art0_; ++j)
        if (t_[i][j] != 0) {
          pivot(i, j);
          break;
        }
    }
  }

  int nvars_, m_, ncols_, slack0_, art0_;
  std::vector<std::vector<Rat>> t_;
  std::vector<int> basis_;
};

}  // namespace detail

inline LpResult solve_lp(const LinearProgram& lp) {
  for (const auto& r : lp.rows)
    if (static_cast<int>(r.coef.size()) != lp.num_vars) throw ShapeError("row width mismatch");
  detail::SimplexTableau tab(lp);
  return tab.solve(lp);
}

}  // namespace mtra
