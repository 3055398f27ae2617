#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtra/analysis.hpp"
#include "mtra/assignment.hpp"
#include "mtra/lp.hpp"
#include "mtra/mechanisms.hpp"
#include "mtra/model.hpp"

namespace mtra {

// Enumeration limits. Exceeding one raises CapacityError; results are never
// silently truncated.
struct OracleCaps {
  long decomposition_enumeration = 600;  // discrete assignments, (n!)^p
  long all_linear_misreports = 24;       // |D|!
  long lex_misreports = 20000;           // p! * (n!)^p
  long lexi_efficiency_combos = 25000;   // (|D|+1)^n pivot combinations
  long leximin_components = 27;          // n * |D|

  void set_all(long v) {
    decomposition_enumeration = all_linear_misreports = lex_misreports = lexi_efficiency_combos =
        leximin_components = v;
  }
};

inline long checked_factorial(int k, long cap) {
  long f = 1;
  for (int i = 2; i <= k; ++i) {
    f *= i;
    if (f > cap) return cap + 1;
  }
  return f;
}

namespace detail {

// Unit row sums and unit item marginals for variables q_{j,b} laid out at
// var0 + j*cols + b.
inline void add_assignment_rows(LinearProgram& lp, const Instance& inst, int var0 = 0) {
  const int cols = inst.num_bundles();
  for (int j = 0; j < inst.n; ++j) {
    std::vector<Rat> row(lp.num_vars, Rat(0));
    for (int b = 0; b < cols; ++b) row[var0 + j * cols + b] = 1;
    lp.add_row(std::move(row), LinearProgram::Rel::eq, Rat(1));
  }
  for (int i = 0; i < inst.num_types(); ++i)
    for (int k = 0; k < inst.n; ++k) {
      std::vector<Rat> row(lp.num_vars, Rat(0));
      for (int j = 0; j < inst.n; ++j)
        for (int b = 0; b < cols; ++b)
          if (inst.bundle_contains(b, i, k)) row[var0 + j * cols + b] = 1;
      lp.add_row(std::move(row), LinearProgram::Rel::eq, Rat(1));
    }
}

inline FractionalAssignment assignment_from_point(const std::vector<Rat>& x, const Instance& inst,
                                                  int var0 = 0) {
  FractionalAssignment Q(inst.n, inst.num_bundles());
  for (int j = 0; j < inst.n; ++j)
    for (int b = 0; b < Q.cols; ++b) Q.at(j, b) = x[var0 + j * inst.num_bundles() + b];
  return Q;
}

}  // namespace detail

struct SdEfficiencyResult {
  bool efficient = true;
  std::optional<FractionalAssignment> dominating;  // a witness Q != P with Q >=sd P
};

// LP test: maximize the total upper-contour mass subject to dominating P
// everywhere. The optimum exceeds P's own total exactly when some valid
// Q != P dominates P (equal cumulatives along every ranking force Q = P).
inline SdEfficiencyResult is_sd_efficient(const FractionalAssignment& P, const Instance& inst,
                                          const Profile& profile) {
  const int cols = inst.num_bundles();
  LinearProgram lp;
  lp.num_vars = inst.n * cols;
  lp.objective.assign(lp.num_vars, Rat(0));
  Rat base(0);
  for (int j = 0; j < inst.n; ++j) {
    const auto& pref = profile.agents[j].linear;
    for (int b = 0; b < cols; ++b)
      lp.objective[j * cols + b] = cols - pref.rank_of[b];
    Rat cum(0);
    for (BundleId b : pref.ranking) {
      cum += P.at(j, b);
      base += cum;
    }
  }
  detail::add_assignment_rows(lp, inst);
  for (int j = 0; j < inst.n; ++j) {
    const auto& pref = profile.agents[j].linear;
    Rat cum(0);
    std::vector<Rat> row(lp.num_vars, Rat(0));
    for (BundleId b : pref.ranking) {
      cum += P.at(j, b);
      row[j * cols + b] = 1;
      lp.add_row(row, LinearProgram::Rel::ge, cum);
    }
  }
  LpResult res = solve_lp(lp);
  if (res.status != LpStatus::optimal) throw InternalError("sd-efficiency LP must be solvable");
  if (res.value == base) return {};
  return {false, detail::assignment_from_point(res.point, inst)};
}

struct LexiEfficiencyResult {
  bool efficient = true;
  std::optional<FractionalAssignment> dominating;
};

// Searches for Q where every agent's row either equals her row in P or
// strictly lexi-dominates it, via one LP per choice of pivot bundles.
inline LexiEfficiencyResult is_lexi_efficient(const FractionalAssignment& P, const Instance& inst,
                                              const Profile& profile,
                                              const OracleCaps& caps = {}) {
  const int cols = inst.num_bundles();
  long combos = 1;
  for (int j = 0; j < inst.n; ++j) {
    combos *= cols + 1;
    if (combos > caps.lexi_efficiency_combos)
      throw CapacityError("lexi-efficiency enumeration needs " + std::to_string(combos) +
                          " pivot combinations, cap is " +
                          std::to_string(caps.lexi_efficiency_combos));
  }
  // choice[j] = -1 keeps agent j's row equal; otherwise the pivot bundle.
  std::vector<int> choice(inst.n, -1);
  for (long code = 1; code < combos; ++code) {
    long c = code;
    for (int j = 0; j < inst.n; ++j) {
      choice[j] = static_cast<int>(c % (cols + 1)) - 1;
      c /= cols + 1;
    }
    LinearProgram lp;
    lp.num_vars = inst.n * cols + 1;
    const int tvar = inst.n * cols;
    lp.objective.assign(lp.num_vars, Rat(0));
    lp.objective[tvar] = 1;
    detail::add_assignment_rows(lp, inst);
    for (int j = 0; j < inst.n; ++j) {
      const auto& pref = profile.agents[j].linear;
      if (choice[j] < 0) {
        for (int b = 0; b < cols; ++b) {
          std::vector<Rat> row(lp.num_vars, Rat(0));
          row[j * cols + b] = 1;
          lp.add_row(std::move(row), LinearProgram::Rel::eq, P.at(j, b));
        }
      } else {
        const BundleId pivot = pref.ranking[choice[j]];
        for (int r = 0; r < choice[j]; ++r) {
          std::vector<Rat> row(lp.num_vars, Rat(0));
          row[j * cols + pref.ranking[r]] = 1;
          lp.add_row(std::move(row), LinearProgram::Rel::ge, P.at(j, pref.ranking[r]));
        }
        std::vector<Rat> row(lp.num_vars, Rat(0));
        row[j * cols + pivot] = 1;
        row[tvar] = -1;
        lp.add_row(std::move(row), LinearProgram::Rel::ge, P.at(j, pivot));
      }
    }
    LpResult res = solve_lp(lp);
    if (res.status == LpStatus::optimal && res.value > 0)
      return {false, detail::assignment_from_point(res.point, inst)};
  }
  return {};
}

struct WeakEfficiencyResult {
  bool efficient = true;
  std::optional<std::pair<int, int>> pair;
  std::optional<FractionalAssignment> dominating;
};

// Pairwise sd-efficiency: all rows but two are frozen; true iff no pair can
// trade into a mutual sd-improvement that changes something.
inline WeakEfficiencyResult is_sd_weak_efficient(const FractionalAssignment& P,
                                                 const Instance& inst, const Profile& profile) {
  const int cols = inst.num_bundles();
  for (int j = 0; j < inst.n; ++j)
    for (int k = j + 1; k < inst.n; ++k) {
      LinearProgram lp;
      lp.num_vars = 2 * cols;  // rows for j (offset 0) and k (offset cols)
      lp.objective.assign(lp.num_vars, Rat(0));
      Rat base(0);
      const int agents[2] = {j, k};
      for (int a = 0; a < 2; ++a) {
        const auto& pref = profile.agents[agents[a]].linear;
        for (int b = 0; b < cols; ++b) lp.objective[a * cols + b] = cols - pref.rank_of[b];
        Rat cum(0);
        for (BundleId b : pref.ranking) {
          cum += P.at(agents[a], b);
          base += cum;
        }
      }
      for (int a = 0; a < 2; ++a) {
        std::vector<Rat> row(lp.num_vars, Rat(0));
        for (int b = 0; b < cols; ++b) row[a * cols + b] = 1;
        lp.add_row(std::move(row), LinearProgram::Rel::eq, Rat(1));
      }
      for (int i = 0; i < inst.num_types(); ++i)
        for (int it = 0; it < inst.n; ++it) {
          std::vector<Rat> row(lp.num_vars, Rat(0));
          Rat rhs(1);
          for (int other = 0; other < inst.n; ++other) {
            if (other == j || other == k) continue;
            for (int b = 0; b < cols; ++b)
              if (inst.bundle_contains(b, i, it)) rhs -= P.at(other, b);
          }
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < cols; ++b)
              if (inst.bundle_contains(b, i, it)) row[a * cols + b] = 1;
          lp.add_row(std::move(row), LinearProgram::Rel::eq, rhs);
        }
      for (int a = 0; a < 2; ++a) {
        const auto& pref = profile.agents[agents[a]].linear;
        Rat cum(0);
        std::vector<Rat> row(lp.num_vars, Rat(0));
        for (BundleId b : pref.ranking) {
          cum += P.at(agents[a], b);
          row[a * cols + b] = 1;
          lp.add_row(row, LinearProgram::Rel::ge, cum);
        }
      }
      LpResult res = solve_lp(lp);
      if (res.status != LpStatus::optimal)
        throw InternalError("weak-efficiency LP must be solvable");
      if (res.value > base) {
        FractionalAssignment Q = P;
        for (int b = 0; b < cols; ++b) {
          Q.at(j, b) = res.point[b];
          Q.at(k, b) = res.point[cols + b];
        }
        return {false, std::make_pair(j, k), std::move(Q)};
      }
    }
  return {};
}

struct WeakEnvyResult {
  bool envy_free = true;
  std::optional<std::pair<int, int>> pair;  // (envious agent, envied agent)
};

// Weak sd-envy-freeness: another agent's allocation may only sd-dominate
// yours if it equals yours.
inline WeakEnvyResult is_sd_weak_envy_free(const FractionalAssignment& P, const Instance& inst,
                                           const Profile& profile) {
  for (int j = 0; j < inst.n; ++j)
    for (int k = 0; k < inst.n; ++k) {
      if (j == k) continue;
      if (P.row(j) != P.row(k) &&
          sd_dominates(P.row(k), P.row(j), profile.agents[j].linear))
        return {false, std::make_pair(j, k)};
    }
  return {};
}

// Convex combination of discrete assignments, weights summing to one.
struct Decomposition {
  struct Term {
    Rat weight;
    DiscreteAssignment assignment;
  };
  std::vector<Term> terms;
};

inline FractionalAssignment recompose(const Decomposition& d, const Instance& inst) {
  FractionalAssignment P(inst.n, inst.num_bundles());
  for (const auto& t : d.terms)
    for (int j = 0; j < inst.n; ++j) P.at(j, t.assignment.bundle_of[j]) += t.weight;
  return P;
}

namespace detail {

inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::vector<std::vector<int>> out;
  do out.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Every discrete assignment is a choice of one permutation (agent -> item)
// per type, enumerated type-major in lexicographic permutation order.
inline std::vector<DiscreteAssignment> all_discrete_assignments(const Instance& inst) {
  const int p = inst.num_types();
  auto perms = all_permutations(inst.n);
  std::vector<DiscreteAssignment> out;
  std::vector<int> pick(p, 0);
  for (;;) {
    DiscreteAssignment d;
    d.bundle_of.resize(inst.n);
    for (int j = 0; j < inst.n; ++j) {
      std::vector<int> items(p);
      for (int i = 0; i < p; ++i) items[i] = perms[pick[i]][j];
      d.bundle_of[j] = inst.bundle_of(items);
    }
    out.push_back(std::move(d));
    int i = p - 1;
    while (i >= 0 && pick[i] + 1 == static_cast<int>(perms.size())) pick[i--] = 0;
    if (i < 0) break;
    ++pick[i];
  }
  return out;
}

}  // namespace detail

// Exact feasibility test for P = sum alpha_k A_k over all discrete
// assignments; the simplex returns a vertex, so at most n|D|+1 terms.
inline std::optional<Decomposition> is_decomposable(const FractionalAssignment& P,
                                                    const Instance& inst,
                                                    const OracleCaps& caps = {}) {
  long count = 1;
  long nfact = checked_factorial(inst.n, caps.decomposition_enumeration);
  for (int i = 0; i < inst.num_types(); ++i) {
    count *= nfact;
    if (count > caps.decomposition_enumeration)
      throw CapacityError("decomposability needs (n!)^p = " + std::to_string(count) +
                          "+ discrete assignments, cap is " +
                          std::to_string(caps.decomposition_enumeration));
  }
  auto all = detail::all_discrete_assignments(inst);
  // Discrete assignments touching a zero share of P can never carry weight.
  std::vector<const DiscreteAssignment*> live;
  for (const auto& d : all) {
    bool ok = true;
    for (int j = 0; j < inst.n && ok; ++j) ok = P.at(j, d.bundle_of[j]) > 0;
    if (ok) live.push_back(&d);
  }
  LinearProgram lp;
  lp.num_vars = static_cast<int>(live.size());
  {
    std::vector<Rat> row(lp.num_vars, Rat(1));
    lp.add_row(std::move(row), LinearProgram::Rel::eq, Rat(1));
  }
  for (int j = 0; j < inst.n; ++j)
    for (int b = 0; b < P.cols; ++b) {
      if (P.at(j, b) == 0) continue;
      std::vector<Rat> row(lp.num_vars, Rat(0));
      for (int k = 0; k < lp.num_vars; ++k)
        if (live[k]->bundle_of[j] == b) row[k] = 1;
      lp.add_row(std::move(row), LinearProgram::Rel::eq, P.at(j, b));
    }
  LpResult res = solve_lp(lp);
  if (res.status != LpStatus::optimal) return std::nullopt;
  Decomposition dec;
  for (int k = 0; k < lp.num_vars; ++k)
    if (res.point[k] > 0) dec.terms.push_back({res.point[k], *live[k]});
  std::sort(dec.terms.begin(), dec.terms.end(),
            [](const auto& a, const auto& b) { return a.assignment < b.assignment; });
  return dec;
}

// Birkhoff decomposition of one doubly stochastic matrix.
struct SingleTypeDecomposition {
  struct Term {
    Rat weight;
    std::vector<int> item_of_agent;  // a permutation
  };
  std::vector<Term> terms;
};

namespace detail {

inline bool kuhn_augment(int agent, const std::vector<std::vector<int>>& adj,
                         std::vector<int>& item_match, std::vector<bool>& used) {
  for (int o : adj[agent]) {
    if (used[o]) continue;
    used[o] = true;
    if (item_match[o] < 0 || kuhn_augment(item_match[o], adj, item_match, used)) {
      item_match[o] = agent;
      return true;
    }
  }
  return false;
}

}  // namespace detail

inline SingleTypeDecomposition birkhoff_decompose(const SingleTypeAssignment& M) {
  const int n = M.n;
  for (int j = 0; j < n; ++j) {
    Rat rs(0), cs(0);
    for (int o = 0; o < n; ++o) {
      if (M.at(j, o) < 0) throw PreconditionError("matrix has a negative entry");
      rs += M.at(j, o);
      cs += M.at(o, j);
    }
    if (rs != 1 || cs != 1) throw PreconditionError("matrix is not doubly stochastic");
  }
  SingleTypeAssignment work = M;
  SingleTypeDecomposition dec;
  Rat remaining(1);
  while (remaining > 0) {
    std::vector<std::vector<int>> adj(n);
    for (int j = 0; j < n; ++j)
      for (int o = 0; o < n; ++o)
        if (work.at(j, o) > 0) adj[j].push_back(o);
    std::vector<int> item_match(n, -1);
    for (int j = 0; j < n; ++j) {
      std::vector<bool> used(n, false);
      if (!detail::kuhn_augment(j, adj, item_match, used))
        throw InternalError("doubly stochastic matrix lost its perfect matching");
    }
    std::vector<int> perm(n);
    for (int o = 0; o < n; ++o)
      if (item_match[o] >= 0) perm[item_match[o]] = o;
    Rat w = work.at(0, perm[0]);
    for (int j = 1; j < n; ++j) {
      const Rat& e = work.at(j, perm[j]);
      if (e < w) w = e;
    }
    for (int j = 0; j < n; ++j) work.at(j, perm[j]) -= w;
    dec.terms.push_back({w, std::move(perm)});
    remaining -= w;
  }
  return dec;
}

// Product measure over per-type decompositions; recomposes exactly to the
// product composition of the per-type matrices.
inline Decomposition product_decomposition(const std::vector<SingleTypeDecomposition>& per_type,
                                           const Instance& inst) {
  const int p = inst.num_types();
  if (static_cast<int>(per_type.size()) != p) throw ShapeError("need one decomposition per type");
  std::map<DiscreteAssignment, Rat> acc;
  std::vector<std::size_t> pick(p, 0);
  for (;;) {
    Rat w(1);
    DiscreteAssignment d;
    d.bundle_of.resize(inst.n);
    for (int j = 0; j < inst.n; ++j) {
      std::vector<int> items(p);
      for (int i = 0; i < p; ++i) items[i] = per_type[i].terms[pick[i]].item_of_agent[j];
      d.bundle_of[j] = inst.bundle_of(items);
    }
    for (int i = 0; i < p; ++i) w *= per_type[i].terms[pick[i]].weight;
    if (w > 0) acc[d] += w;
    int i = p - 1;
    while (i >= 0 && pick[i] + 1 == per_type[i].terms.size()) pick[i--] = 0;
    if (i < 0) break;
    ++pick[i];
  }
  Decomposition dec;
  for (auto& [d, w] : acc) dec.terms.push_back({w, d});
  return dec;
}

// Iterative exact maximin over the cumulative-share vector: maximize the
// smallest unfixed component, pin every component whose individual maximum
// equals that level, repeat.
inline FractionalAssignment leximin_optimal_assignment(const Instance& inst,
                                                       const Profile& profile,
                                                       const OracleCaps& caps = {}) {
  const int cols = inst.num_bundles();
  const long components = static_cast<long>(inst.n) * cols;
  if (components > caps.leximin_components)
    throw CapacityError("leximin needs " + std::to_string(components) +
                        " cumulative components, cap is " +
                        std::to_string(caps.leximin_components));
  // component id = j*cols + rank r; constraint row = cumulative up to rank r
  std::vector<std::optional<Rat>> fixed(components);
  auto cum_row = [&](int nvars, int j, int r) {
    std::vector<Rat> row(nvars, Rat(0));
    const auto& pref = profile.agents[j].linear;
    for (int rr = 0; rr <= r; ++rr) row[j * cols + pref.ranking[rr]] = 1;
    return row;
  };
  int unfixed = static_cast<int>(components);
  while (unfixed > 0) {
    LinearProgram lp;
    lp.num_vars = inst.n * cols + 1;
    const int tvar = inst.n * cols;
    lp.objective.assign(lp.num_vars, Rat(0));
    lp.objective[tvar] = 1;
    detail::add_assignment_rows(lp, inst);
    for (int j = 0; j < inst.n; ++j)
      for (int r = 0; r < cols; ++r) {
        auto row = cum_row(lp.num_vars, j, r);
        if (fixed[j * cols + r]) {
          lp.add_row(std::move(row), LinearProgram::Rel::eq, *fixed[j * cols + r]);
        } else {
          row[tvar] = -1;
          lp.add_row(std::move(row), LinearProgram::Rel::ge, Rat(0));
        }
      }
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal) throw InternalError("leximin maximin LP must be solvable");
    const Rat level = res.value;
    // Only components sitting at the level in the optimum can possibly be
    // stuck at it; test each by maximizing it individually.
    int fixed_this_round = 0;
    for (int j = 0; j < inst.n; ++j) {
      const auto& pref = profile.agents[j].linear;
      Rat cum(0);
      for (int r = 0; r < cols; ++r) {
        cum += res.point[j * cols + pref.ranking[r]];
        if (fixed[j * cols + r] || cum != level) continue;
        LinearProgram sub;
        sub.num_vars = inst.n * cols;
        sub.objective = cum_row(sub.num_vars, j, r);
        detail::add_assignment_rows(sub, inst);
        for (int jj = 0; jj < inst.n; ++jj)
          for (int rr = 0; rr < cols; ++rr) {
            auto row = cum_row(sub.num_vars, jj, rr);
            if (fixed[jj * cols + rr])
              sub.add_row(std::move(row), LinearProgram::Rel::eq, *fixed[jj * cols + rr]);
            else
              sub.add_row(std::move(row), LinearProgram::Rel::ge, level);
          }
        LpResult mx = solve_lp(sub);
        if (mx.status != LpStatus::optimal) throw InternalError("leximin fix LP must be solvable");
        if (mx.value == level) {
          fixed[j * cols + r] = level;
          --unfixed;
          ++fixed_this_round;
        }
      }
    }
    if (fixed_this_round == 0)
      throw InternalError("leximin stage fixed no component");
  }
  // All cumulatives pinned: the assignment is the unique feasible point.
  LinearProgram lp;
  lp.num_vars = inst.n * cols;
  detail::add_assignment_rows(lp, inst);
  for (int j = 0; j < inst.n; ++j)
    for (int r = 0; r < cols; ++r)
      lp.add_row(cum_row(lp.num_vars, j, r), LinearProgram::Rel::eq, *fixed[j * cols + r]);
  LpResult res = solve_lp(lp);
  if (res.status != LpStatus::optimal) throw InternalError("pinned leximin system must be feasible");
  return detail::assignment_from_point(res.point, inst);
}

enum class MisreportClass { all_linear, lexicographic, lexicographic_fixed_importance };

struct AuditViolation {
  int agent;
  AgentPreference misreport;
  FractionalAssignment truthful;
  FractionalAssignment manipulated;
};

struct AuditReport {
  Mechanism mechanism;
  int agent = -1;
  MisreportClass cls;
  long misreports_checked = 0;
  std::vector<AuditViolation> violations;

  bool clean() const { return violations.empty(); }
};

namespace detail {

inline std::vector<AgentPreference> enumerate_misreports(const Instance& inst,
                                                         const AgentPreference& truthful,
                                                         MisreportClass cls,
                                                         const OracleCaps& caps) {
  const int p = inst.num_types();
  std::vector<AgentPreference> out;
  if (cls == MisreportClass::all_linear) {
    long count = checked_factorial(inst.num_bundles(), caps.all_linear_misreports);
    if (count > caps.all_linear_misreports)
      throw CapacityError("all-linear audit needs |D|! > " +
                          std::to_string(caps.all_linear_misreports) + " misreports");
    std::vector<BundleId> ranking(inst.num_bundles());
    for (int b = 0; b < inst.num_bundles(); ++b) ranking[b] = b;
    do out.push_back(linear_agent(ranking, inst));
    while (std::next_permutation(ranking.begin(), ranking.end()));
    return out;
  }
  auto truthful_lex = lexicographic_view(truthful, inst);
  if (!truthful_lex)
    throw PreconditionError("lexicographic misreport classes need a lexicographic truthful preference");
  long nfact = checked_factorial(inst.n, caps.lex_misreports);
  long count = 1;
  for (int i = 0; i < p && count <= caps.lex_misreports; ++i) count *= nfact;
  if (cls == MisreportClass::lexicographic && count <= caps.lex_misreports)
    count *= checked_factorial(p, caps.lex_misreports);
  if (count > caps.lex_misreports)
    throw CapacityError("lexicographic audit needs more than " +
                        std::to_string(caps.lex_misreports) + " misreports");
  std::vector<std::vector<int>> importances;
  if (cls == MisreportClass::lexicographic_fixed_importance) {
    importances.push_back(truthful_lex->importance);
  } else {
    importances = all_permutations(p);
  }
  auto item_perms = all_permutations(inst.n);
  for (const auto& imp : importances) {
    std::vector<std::size_t> pick(p, 0);
    for (;;) {
      LexicographicPreference q;
      q.importance = imp;
      q.per_type.resize(p);
      for (int i = 0; i < p; ++i) q.per_type[i] = item_perms[pick[i]];
      out.push_back(lexicographic_agent(std::move(q), inst));
      int i = p - 1;
      while (i >= 0 && pick[i] + 1 == item_perms.size()) pick[i--] = 0;
      if (i < 0) break;
      ++pick[i];
    }
  }
  return out;
}

}  // namespace detail

// Exhaustive manipulation search: rerun the mechanism on every misreport in
// the class and flag the ones whose outcome sd-dominates the truthful
// allocation under the agent's true preference while differing from it.
inline AuditReport audit_strategyproofness(Mechanism mech, const Instance& inst,
                                           const Profile& profile, int agent, MisreportClass cls,
                                           const OracleCaps& caps = {}) {
  if (agent < 0 || agent >= inst.n) throw ShapeError("no such agent");
  if (mech == Mechanism::lexips && cls == MisreportClass::all_linear)
    throw PreconditionError("LexiPS audits need a lexicographic misreport class");
  auto run = [&](const Profile& r) {
    return mech == Mechanism::mps ? mps(inst, r) : lexips(inst, r);
  };
  AuditReport rep;
  rep.mechanism = mech;
  rep.agent = agent;
  rep.cls = cls;
  FractionalAssignment truth = run(profile);
  const auto& true_pref = profile.agents[agent].linear;
  for (auto& mis : detail::enumerate_misreports(inst, profile.agents[agent], cls, caps)) {
    Profile manipulated = profile;
    manipulated.agents[agent] = mis;
    FractionalAssignment out = run(manipulated);
    ++rep.misreports_checked;
    if (out.row(agent) != truth.row(agent) &&
        sd_dominates(out.row(agent), truth.row(agent), true_pref))
      rep.violations.push_back({agent, std::move(mis), truth, std::move(out)});
  }
  return rep;
}

// The impossibility instance: enumerates the envy-freeness-forced family of
// decomposable assignments Q(v) on a grid and checks each is sd-dominated
// by the non-decomposable P while differing from it.
struct ImpossibilityReport {
  struct Point {
    Rat v;
    bool valid = false;
    bool envy_free = false;
    bool decomposable = false;
    bool dominated_by_p = false;
    bool differs_from_p = false;
    bool pass() const { return valid && envy_free && decomposable && dominated_by_p && differs_from_p; }
  };
  Instance instance;
  Profile profile;
  FractionalAssignment p_matrix;
  std::vector<Point> points;

  bool all_pass() const {
    for (const auto& pt : points)
      if (!pt.pass()) return false;
    return !points.empty();
  }
};

inline Instance impossibility_instance() {
  return make_instance(2, {"F", "B"}, {{"1_F", "2_F"}, {"1_B", "2_B"}});
}

inline Profile impossibility_profile(const Instance& inst) {
  auto b = [&](const std::string& f, const std::string& bb) {
    return inst.bundle_of({inst.find_item(f)->second, inst.find_item(bb)->second});
  };
  std::vector<AgentPreference> prefs;
  prefs.push_back(linear_agent({b("1_F", "1_B"), b("1_F", "2_B"), b("2_F", "2_B"), b("2_F", "1_B")}, inst));
  prefs.push_back(linear_agent({b("1_F", "2_B"), b("2_F", "1_B"), b("1_F", "1_B"), b("2_F", "2_B")}, inst));
  return make_profile(std::move(prefs), inst);
}

inline ImpossibilityReport verify_impossibility_instance(int grid_denominator,
                                                         const OracleCaps& caps = {}) {
  if (grid_denominator < 2) throw PreconditionError("grid denominator must be at least 2");
  ImpossibilityReport rep;
  rep.instance = impossibility_instance();
  rep.profile = impossibility_profile(rep.instance);
  const Instance& inst = rep.instance;
  rep.p_matrix = FractionalAssignment(2, 4);
  rep.p_matrix.at(0, 0) = Rat(1, 2);  // 1_F1_B
  rep.p_matrix.at(0, 3) = Rat(1, 2);  // 2_F2_B
  rep.p_matrix.at(1, 1) = Rat(1, 2);  // 1_F2_B
  rep.p_matrix.at(1, 2) = Rat(1, 2);  // 2_F1_B
  for (int k = 0; 2 * k <= grid_denominator; ++k) {
    ImpossibilityReport::Point pt;
    pt.v = rat(k, grid_denominator);
    const Rat w = Rat(1, 2) - pt.v;
    // Q rows follow the proof's symmetric pattern with v = z and w = y.
    FractionalAssignment Q(2, 4);
    Q.at(0, 0) = pt.v;
    Q.at(0, 1) = w;
    Q.at(0, 2) = w;
    Q.at(0, 3) = pt.v;
    Q.at(1, 0) = pt.v;
    Q.at(1, 1) = w;
    Q.at(1, 2) = w;
    Q.at(1, 3) = pt.v;
    pt.valid = validate(Q, inst).ok();
    pt.envy_free = is_sd_envy_free(Q, inst, rep.profile).envy_free;
    pt.decomposable = is_decomposable(Q, inst, caps).has_value();
    pt.dominated_by_p = sd_dominates_assignment(rep.p_matrix, Q, rep.profile);
    pt.differs_from_p = !(Q == rep.p_matrix);
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

}  // namespace mtra
