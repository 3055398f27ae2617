#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mtra/analysis.hpp"
#include "mtra/assignment.hpp"
#include "mtra/model.hpp"
#include "mtra/rational.hpp"

namespace mtra {

enum class Mechanism { mps, lexips };

// Piecewise-constant eating speeds on [0,1]; each agent's rates integrate
// to exactly one unit.
struct EatingSchedule {
  struct AgentSchedule {
    std::vector<Rat> breakpoints;  // 0 = t_0 < ... < t_k = 1
    std::vector<Rat> rates;        // k nonnegative rates
  };
  std::vector<AgentSchedule> agents;
};

inline EatingSchedule uniform_schedule(int n) {
  EatingSchedule s;
  s.agents.assign(n, {{Rat(0), Rat(1)}, {Rat(1)}});
  return s;
}

inline void validate_schedule(const EatingSchedule& sched, int n) {
  if (static_cast<int>(sched.agents.size()) != n)
    throw PreconditionError("schedule must cover every agent");
  for (int j = 0; j < n; ++j) {
    const auto& a = sched.agents[j];
    if (a.breakpoints.size() < 2 || a.rates.size() + 1 != a.breakpoints.size())
      throw PreconditionError("agent " + std::to_string(j + 1) +
                              ": need k+1 breakpoints for k rates");
    if (a.breakpoints.front() != 0 || a.breakpoints.back() != 1)
      throw PreconditionError("agent " + std::to_string(j + 1) +
                              ": breakpoints must run from 0 to 1");
    Rat integral(0);
    for (std::size_t s = 0; s < a.rates.size(); ++s) {
      if (a.breakpoints[s] >= a.breakpoints[s + 1])
        throw PreconditionError("agent " + std::to_string(j + 1) +
                                ": breakpoints must increase strictly");
      if (a.rates[s] < 0)
        throw PreconditionError("agent " + std::to_string(j + 1) + ": rates must be nonnegative");
      integral += a.rates[s] * (a.breakpoints[s + 1] - a.breakpoints[s]);
    }
    if (integral != 1)
      throw PreconditionError("agent " + std::to_string(j + 1) + ": speed integral is " +
                              rat_to_string(integral) + ", not 1");
  }
}

struct SingleTypePsOutcome {
  std::vector<std::vector<Rat>> shares;  // rows follow the given agent order
  std::vector<Rat> supply_after;
};

// Simultaneous unit-rate eating within one type: every agent eats her
// favorite unexhausted item until the horizon elapses. All event times are
// exact rationals.
inline SingleTypePsOutcome ps_single_type(std::vector<Rat> supply,
                                          const std::vector<std::vector<int>>& item_orders,
                                          const Rat& horizon) {
  const int m = static_cast<int>(supply.size());
  const int na = static_cast<int>(item_orders.size());
  for (const auto& s : supply)
    if (s < 0) throw PreconditionError("negative supply");
  SingleTypePsOutcome out;
  out.shares.assign(na, std::vector<Rat>(m, Rat(0)));
  Rat t(0);
  while (t < horizon) {
    std::vector<int> top(na, -1);
    std::vector<int> con(m, 0);
    for (int a = 0; a < na; ++a) {
      for (int o : item_orders[a])
        if (supply[o] > 0) {
          top[a] = o;
          break;
        }
      if (top[a] < 0)
        throw StarvationError("an agent ran out of items " + rat_to_string(horizon - t) +
                              " time units before the horizon");
      ++con[top[a]];
    }
    Rat delta = horizon - t;
    for (int o = 0; o < m; ++o)
      if (con[o] > 0) {
        Rat d = supply[o] / con[o];
        if (d < delta) delta = d;
      }
    for (int a = 0; a < na; ++a) out.shares[a][top[a]] += delta;
    for (int o = 0; o < m; ++o)
      if (con[o] > 0) supply[o] -= delta * con[o];
    t += delta;
  }
  out.supply_after = std::move(supply);
  return out;
}

struct LexipsRun {
  FractionalAssignment assignment;
  std::vector<SingleTypeAssignment> type_marginals;  // one per type
};

// LexiPS (p phases of single-type PS): in loop k each agent eats her k-th
// most important type for one unit of time inside her cohort; supplies
// carry across loops; bundle shares are the product of the per-type
// marginals. Requires every preference to be lexicographic (declared or
// recognized).
inline LexipsRun lexips_run(const Instance& inst, const Profile& profile) {
  const int p = inst.num_types();
  std::vector<LexicographicPreference> lex;
  for (int j = 0; j < inst.n; ++j) {
    auto q = lexicographic_view(profile.agents[j], inst);
    if (!q)
      throw PreconditionError("agent " + inst.agent_names[j] +
                              "'s preference is not lexicographic");
    lex.push_back(std::move(*q));
  }
  std::vector<std::vector<Rat>> supply(p, std::vector<Rat>(inst.n, Rat(1)));
  std::vector<SingleTypeAssignment> marg(p, SingleTypeAssignment(inst.n));
  for (int loop = 0; loop < p; ++loop) {
    // Cohorts are disjoint across types within one loop, so the phase
    // order cannot affect the outcome; run them in type order.
    for (int i = 0; i < p; ++i) {
      std::vector<int> cohort;
      for (int j = 0; j < inst.n; ++j)
        if (lex[j].importance[loop] == i) cohort.push_back(j);
      if (cohort.empty()) continue;
      std::vector<std::vector<int>> orders;
      orders.reserve(cohort.size());
      for (int j : cohort) orders.push_back(lex[j].per_type[i]);
      auto ps = ps_single_type(supply[i], orders, Rat(1));
      for (std::size_t c = 0; c < cohort.size(); ++c)
        for (int o = 0; o < inst.n; ++o) marg[i].at(cohort[c], o) += ps.shares[c][o];
      supply[i] = std::move(ps.supply_after);
    }
  }
  return {product_compose(marg, inst), std::move(marg)};
}

inline FractionalAssignment lexips(const Instance& inst, const Profile& profile) {
  return lexips_run(inst, profile).assignment;
}

struct MpsTrace {
  struct Segment {
    Rat t0, t1;
    std::vector<BundleId> top;      // per agent
    std::vector<int> removed;       // global item ids exhausted at t1
  };
  std::vector<Segment> segments;
};

struct MpsRun {
  FractionalAssignment assignment;
  MpsTrace trace;
};

namespace detail {

inline BundleId top_available_bundle(const Instance& inst, const LinearPreference& pref,
                                     const std::vector<bool>& item_alive) {
  for (BundleId b : pref.ranking) {
    bool ok = true;
    for (int i = 0; i < inst.num_types(); ++i)
      if (!item_alive[global_item_id(inst, i, inst.item_index_of(b, i))]) {
        ok = false;
        break;
      }
    if (ok) return b;
  }
  return -1;
}

}  // namespace detail

// MPS: every agent eats all items of her top available bundle at unit rate;
// a round ends when the fastest-depleting items run out, and the whole
// argmin set is removed together.
inline MpsRun mps_run(const Instance& inst, const Profile& profile) {
  const int p = inst.num_types();
  const int nitems = inst.n * p;
  if (static_cast<int>(profile.agents.size()) != inst.n) throw ShapeError("profile size mismatch");
  std::vector<Rat> supply(nitems, Rat(1));
  std::vector<bool> alive(nitems, true);
  int alive_count = nitems;
  MpsRun run;
  run.assignment = FractionalAssignment(inst.n, inst.num_bundles());
  Rat t(0);
  while (alive_count > 0) {
    std::vector<BundleId> top(inst.n);
    std::vector<int> con(nitems, 0);
    for (int j = 0; j < inst.n; ++j) {
      top[j] = detail::top_available_bundle(inst, profile.agents[j].linear, alive);
      if (top[j] < 0) throw InternalError("agent starved while items remain");
      for (int i = 0; i < p; ++i)
        ++con[global_item_id(inst, i, inst.item_index_of(top[j], i))];
    }
    std::optional<Rat> delta;
    for (int g = 0; g < nitems; ++g)
      if (con[g] > 0) {
        Rat d = supply[g] / con[g];
        if (!delta || d < *delta) delta = d;
      }
    if (!delta) throw InternalError("no item under consumption");
    for (int j = 0; j < inst.n; ++j) run.assignment.at(j, top[j]) += *delta;
    std::vector<int> removed;
    for (int g = 0; g < nitems; ++g)
      if (con[g] > 0) {
        supply[g] -= *delta * con[g];
        if (supply[g] == 0) {
          alive[g] = false;
          --alive_count;
          removed.push_back(g);
        }
      }
    run.trace.segments.push_back({t, t + *delta, std::move(top), std::move(removed)});
    t += *delta;
  }
  if (t != 1) throw InternalError("MPS clock ended at " + rat_to_string(t));
  return run;
}

inline FractionalAssignment mps(const Instance& inst, const Profile& profile) {
  return mps_run(inst, profile).assignment;
}

// General eating algorithm: like MPS but each agent consumes at her own
// piecewise-constant speed. A step ends at the next item exhaustion or the
// next schedule breakpoint, whichever comes first, all in exact rationals.
inline FractionalAssignment eating(const Instance& inst, const Profile& profile,
                                   const EatingSchedule& sched) {
  validate_schedule(sched, inst.n);
  const int p = inst.num_types();
  const int nitems = inst.n * p;
  std::vector<Rat> supply(nitems, Rat(1));
  std::vector<bool> alive(nitems, true);
  int alive_count = nitems;
  FractionalAssignment P(inst.n, inst.num_bundles());
  Rat t(0);
  while (alive_count > 0) {
    if (t >= 1) throw InternalError("items remain after every speed integral is spent");
    std::vector<BundleId> top(inst.n);
    std::vector<Rat> rate(inst.n, Rat(0));
    Rat next_bp(1);
    for (int j = 0; j < inst.n; ++j) {
      top[j] = detail::top_available_bundle(inst, profile.agents[j].linear, alive);
      if (top[j] < 0) throw InternalError("agent starved while items remain");
      const auto& a = sched.agents[j];
      for (std::size_t s = 0; s < a.rates.size(); ++s)
        if (a.breakpoints[s] <= t && t < a.breakpoints[s + 1]) {
          rate[j] = a.rates[s];
          next_bp = std::min(next_bp, a.breakpoints[s + 1]);
          break;
        }
    }
    std::vector<Rat> item_rate(nitems, Rat(0));
    for (int j = 0; j < inst.n; ++j)
      for (int i = 0; i < p; ++i)
        item_rate[global_item_id(inst, i, inst.item_index_of(top[j], i))] += rate[j];
    Rat delta = next_bp - t;
    for (int g = 0; g < nitems; ++g)
      if (item_rate[g] > 0) {
        Rat d = supply[g] / item_rate[g];
        if (d < delta) delta = d;
      }
    for (int j = 0; j < inst.n; ++j)
      if (rate[j] > 0) P.at(j, top[j]) += rate[j] * delta;
    for (int g = 0; g < nitems; ++g)
      if (item_rate[g] > 0) {
        supply[g] -= item_rate[g] * delta;
        if (supply[g] == 0) {
          alive[g] = false;
          --alive_count;
        }
      }
    t += delta;
  }
  return P;
}

// Rebuilds eating speeds that replay to P (possible exactly when P admits
// no generalized cycle): in round s of the peel, an agent whose top
// available bundle x loses an item eats x at rate S * p_{j,x} on the
// segment [(s-1)/S, s/S].
inline EatingSchedule speeds_from_assignment(const FractionalAssignment& P, const Instance& inst,
                                             const Profile& profile) {
  if (!validate(P, inst).ok()) throw PreconditionError("not a valid fractional assignment");
  PeelingTrace trace = peel(P, inst, profile);
  if (!trace.complete())
    throw NotRepresentableError("assignment admits a generalized cycle; no eating speeds exist");
  const int S = static_cast<int>(trace.rounds.size());
  const int p = inst.num_types();
  EatingSchedule sched;
  sched.agents.resize(inst.n);
  std::vector<bool> alive(inst.n * p, true);
  std::vector<std::vector<Rat>> seg_rate(inst.n, std::vector<Rat>(S, Rat(0)));
  for (int s = 0; s < S; ++s) {
    std::vector<bool> peeled(inst.n * p, false);
    for (int g : trace.rounds[s]) peeled[g] = true;
    for (int j = 0; j < inst.n; ++j) {
      BundleId x = detail::top_available_bundle(inst, profile.agents[j].linear, alive);
      if (x < 0) continue;  // no full bundle survives; the agent idles
      bool touches_round = false;
      for (int i = 0; i < p && !touches_round; ++i)
        touches_round = peeled[global_item_id(inst, i, inst.item_index_of(x, i))];
      if (touches_round) seg_rate[j][s] = Rat(S) * P.at(j, x);
    }
    for (int g : trace.rounds[s]) alive[g] = false;
  }
  for (int j = 0; j < inst.n; ++j) {
    auto& a = sched.agents[j];
    Rat integral(0);
    for (int s = 0; s <= S; ++s) a.breakpoints.push_back(Rat(s) / S);
    for (int s = 0; s < S; ++s) {
      a.rates.push_back(seg_rate[j][s]);
      integral += seg_rate[j][s] / S;
    }
    if (integral != 1)
      throw InternalError("reconstructed speeds for agent " + inst.agent_names[j] +
                          " integrate to " + rat_to_string(integral));
  }
  return sched;
}

}  // namespace mtra
