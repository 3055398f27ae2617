#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "mtra/assignment.hpp"
#include "mtra/model.hpp"
#include "mtra/rational.hpp"

namespace mtra {

// p weakly stochastically dominates q: every upper-contour cumulative of p
// is at least the one of q.
inline bool sd_dominates(const std::vector<Rat>& p, const std::vector<Rat>& q,
                         const LinearPreference& pref) {
  if (p.size() != q.size() || p.size() != pref.ranking.size())
    throw ShapeError("allocation width mismatch");
  Rat cp(0), cq(0);
  for (BundleId b : pref.ranking) {
    cp += p[b];
    cq += q[b];
    if (cp < cq) return false;
  }
  return true;
}

inline bool sd_dominates_assignment(const FractionalAssignment& P, const FractionalAssignment& Q,
                                    const Profile& profile) {
  if (P.n != Q.n || P.cols != Q.cols) throw ShapeError("assignment shapes differ");
  for (int j = 0; j < P.n; ++j)
    if (!sd_dominates(P.row(j), Q.row(j), profile.agents[j].linear)) return false;
  return true;
}

// Strict lexicographic dominance: p gains at some bundle and loses nowhere
// strictly above it. Irreflexive.
inline bool lexi_dominates(const std::vector<Rat>& p, const std::vector<Rat>& q,
                           const LinearPreference& pref) {
  if (p.size() != q.size() || p.size() != pref.ranking.size())
    throw ShapeError("allocation width mismatch");
  for (BundleId b : pref.ranking) {
    if (p[b] > q[b]) return true;
    if (p[b] < q[b]) return false;
  }
  return false;
}

struct ImprovableTuple {
  BundleId better;
  BundleId worse;
  int witness_agent;  // prefers `better` and holds a positive share of `worse`

  bool operator==(const ImprovableTuple&) const = default;
  auto operator<=>(const ImprovableTuple&) const = default;
};

// All (x, x_hat, j) with x >_j x_hat and p_{j,x_hat} > 0, ordered by agent,
// then canonical bundle ids.
inline std::vector<ImprovableTuple> improvable_tuples(const FractionalAssignment& P,
                                                      const Instance& inst,
                                                      const Profile& profile) {
  std::vector<ImprovableTuple> out;
  for (int j = 0; j < inst.n; ++j) {
    const auto& pref = profile.agents[j].linear;
    for (BundleId worse = 0; worse < P.cols; ++worse) {
      if (P.at(j, worse) <= 0) continue;
      for (BundleId better = 0; better < P.cols; ++better)
        if (pref.prefers(better, worse)) out.push_back({better, worse, j});
    }
  }
  std::sort(out.begin(), out.end(), [](const ImprovableTuple& a, const ImprovableTuple& b) {
    return std::tie(a.witness_agent, a.better, a.worse) <
           std::tie(b.witness_agent, b.better, b.worse);
  });
  return out;
}

struct PeelingTrace {
  std::vector<std::vector<int>> rounds;  // B^1..B^S as global item ids (type * n + item)
  std::vector<int> residual_items;       // empty iff peeling completed
  std::vector<BundleId> residual_bundles;

  bool complete() const { return residual_items.empty(); }
};

inline int global_item_id(const Instance& inst, int type, int item) {
  return type * inst.n + item;
}

// Iteratively removes the items that appear in no `worse` bundle of a tuple
// whose bundles both survive; stalling exposes a generalized cycle.
inline PeelingTrace peel(const FractionalAssignment& P, const Instance& inst,
                         const Profile& profile) {
  const auto tuples = improvable_tuples(P, inst, profile);
  const int p = inst.num_types();
  std::vector<bool> item_alive(inst.n * p, true);
  std::vector<bool> bundle_alive(P.cols, true);
  int alive = inst.n * p;
  PeelingTrace trace;
  while (alive > 0) {
    std::vector<bool> blocked(inst.n * p, false);
    for (const auto& t : tuples) {
      if (!bundle_alive[t.better] || !bundle_alive[t.worse]) continue;
      for (int i = 0; i < p; ++i)
        blocked[global_item_id(inst, i, inst.item_index_of(t.worse, i))] = true;
    }
    std::vector<int> round;
    for (int g = 0; g < inst.n * p; ++g)
      if (item_alive[g] && !blocked[g]) round.push_back(g);
    if (round.empty()) break;  // stalled
    for (int g : round) item_alive[g] = false;
    alive -= static_cast<int>(round.size());
    for (BundleId b = 0; b < P.cols; ++b) {
      if (!bundle_alive[b]) continue;
      for (int i = 0; i < p; ++i)
        if (!item_alive[global_item_id(inst, i, inst.item_index_of(b, i))]) {
          bundle_alive[b] = false;
          break;
        }
    }
    trace.rounds.push_back(std::move(round));
  }
  for (int g = 0; g < inst.n * p; ++g)
    if (item_alive[g]) trace.residual_items.push_back(g);
  for (BundleId b = 0; b < P.cols; ++b)
    if (bundle_alive[b]) trace.residual_bundles.push_back(b);
  return trace;
}

struct CycleWitness {
  std::vector<ImprovableTuple> tuples;
};

// Checks the generalized-cycle condition directly: every item occurring in
// some `better` bundle also occurs in some `worse` bundle of the set.
inline bool is_generalized_cycle(const std::vector<ImprovableTuple>& tuples, const Instance& inst) {
  if (tuples.empty()) return false;
  const int p = inst.num_types();
  std::set<int> better_items, worse_items;
  for (const auto& t : tuples)
    for (int i = 0; i < p; ++i) {
      better_items.insert(global_item_id(inst, i, inst.item_index_of(t.better, i)));
      worse_items.insert(global_item_id(inst, i, inst.item_index_of(t.worse, i)));
    }
  return std::includes(worse_items.begin(), worse_items.end(), better_items.begin(),
                       better_items.end());
}

// No witness iff peeling completes. A stalled peel yields the set of all
// improvable tuples inside the residual bundle space, re-verified against
// the definition before being returned.
inline std::optional<CycleWitness> has_generalized_cycle(const FractionalAssignment& P,
                                                         const Instance& inst,
                                                         const Profile& profile) {
  PeelingTrace trace = peel(P, inst, profile);
  if (trace.complete()) return std::nullopt;
  std::vector<bool> residual(P.cols, false);
  for (BundleId b : trace.residual_bundles) residual[b] = true;
  CycleWitness w;
  for (const auto& t : improvable_tuples(P, inst, profile))
    if (residual[t.better] && residual[t.worse]) w.tuples.push_back(t);
  if (!is_generalized_cycle(w.tuples, inst))
    throw InternalError("stalled peel did not produce a generalized cycle");
  return w;
}

struct EnvyResult {
  bool envy_free = true;
  // First ordered pair (j, k) where agent j's allocation fails to
  // sd-dominate agent k's under j's own preference.
  std::optional<std::pair<int, int>> violating_pair;
};

inline EnvyResult is_sd_envy_free(const FractionalAssignment& P, const Instance& inst,
                                  const Profile& profile) {
  for (int j = 0; j < inst.n; ++j)
    for (int k = 0; k < inst.n; ++k) {
      if (j == k) continue;
      if (!sd_dominates(P.row(j), P.row(k), profile.agents[j].linear))
        return {false, std::make_pair(j, k)};
    }
  return {};
}

// Cumulative share of agent j up to and including bundle b.
inline Rat cumulative_share(const FractionalAssignment& P, const Profile& profile, int agent,
                            BundleId b) {
  const auto& pref = profile.agents[agent].linear;
  Rat s(0);
  for (int r = 0; r <= pref.rank_of[b]; ++r) s += P.at(agent, pref.ranking[r]);
  return s;
}

struct IofResult {
  bool fair = true;
  std::vector<std::pair<int, BundleId>> violations;  // (agent, bundle) pairs that fail
};

// Item-wise ordinal fairness: every positively held bundle has an item at
// which the holder's cumulative share is maximal among all positive holders
// of bundles containing that item.
inline IofResult is_itemwise_ordinal_fair(const FractionalAssignment& P, const Instance& inst,
                                          const Profile& profile) {
  const int p = inst.num_types();
  std::vector<std::vector<Rat>> cum(inst.n, std::vector<Rat>(P.cols));
  for (int j = 0; j < inst.n; ++j) {
    const auto& pref = profile.agents[j].linear;
    Rat s(0);
    for (BundleId b : pref.ranking) {
      s += P.at(j, b);
      cum[j][b] = s;
    }
  }
  IofResult res;
  for (int j = 0; j < inst.n; ++j)
    for (BundleId b = 0; b < P.cols; ++b) {
      if (P.at(j, b) <= 0) continue;
      bool holds = false;
      for (int i = 0; i < p && !holds; ++i) {
        int item = inst.item_index_of(b, i);
        bool item_ok = true;
        for (int k = 0; k < inst.n && item_ok; ++k)
          for (BundleId bb = 0; bb < P.cols; ++bb)
            if (P.at(k, bb) > 0 && inst.bundle_contains(bb, i, item) && cum[k][bb] > cum[j][b]) {
              item_ok = false;
              break;
            }
        holds = item_ok;
      }
      if (!holds) {
        res.fair = false;
        res.violations.emplace_back(j, b);
      }
    }
  return res;
}

struct LeximinVector {
  // (agent, bundle, cumulative share) in agent-major canonical order.
  std::vector<std::tuple<int, BundleId, Rat>> entries;
  std::vector<Rat> sorted;  // the same values, ascending
};

inline LeximinVector leximin_vector(const FractionalAssignment& P, const Instance& inst,
                                    const Profile& profile) {
  LeximinVector v;
  for (int j = 0; j < inst.n; ++j) {
    const auto& pref = profile.agents[j].linear;
    std::vector<Rat> cum(P.cols);
    Rat s(0);
    for (BundleId b : pref.ranking) {
      s += P.at(j, b);
      cum[b] = s;
    }
    for (BundleId b = 0; b < P.cols; ++b) v.entries.emplace_back(j, b, cum[b]);
  }
  for (const auto& [j, b, u] : v.entries) v.sorted.push_back(u);
  std::sort(v.sorted.begin(), v.sorted.end());
  return v;
}

enum class Ordering { less, equal, greater };

// Compares ascending-sorted cumulative vectors; `greater` means the first
// argument is leximin-preferred.
inline Ordering leximin_compare(const LeximinVector& u, const LeximinVector& v) {
  if (u.sorted.size() != v.sorted.size()) throw ShapeError("leximin vectors differ in length");
  for (std::size_t i = 0; i < u.sorted.size(); ++i) {
    if (u.sorted[i] > v.sorted[i]) return Ordering::greater;
    if (u.sorted[i] < v.sorted[i]) return Ordering::less;
  }
  return Ordering::equal;
}

}  // namespace mtra
