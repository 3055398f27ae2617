#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtra/errors.hpp"

namespace mtra {

// Bundles are addressed by a canonical index in [0, n^p): the mixed-radix
// number whose digits are the per-type item indices, most significant digit
// first (type-index-major). This fixes every matrix column order.
using BundleId = int;

struct Instance {
  int n = 0;                                        // agents per the square model
  std::vector<std::string> agent_names;             // size n
  std::vector<std::string> type_names;              // size p
  std::vector<std::vector<std::string>> item_names; // [type][index], each size n

  int num_types() const { return static_cast<int>(type_names.size()); }

  int num_bundles() const {
    int b = 1;
    for (int i = 0; i < num_types(); ++i) b *= n;
    return b;
  }

  // Stride of type i's digit in the bundle index.
  int stride(int type) const {
    int s = 1;
    for (int i = type + 1; i < num_types(); ++i) s *= n;
    return s;
  }

  int item_index_of(BundleId b, int type) const { return (b / stride(type)) % n; }

  bool bundle_contains(BundleId b, int type, int item) const {
    return item_index_of(b, type) == item;
  }

  BundleId bundle_of(const std::vector<int>& item_by_type) const {
    BundleId b = 0;
    for (int i = 0; i < num_types(); ++i) b += item_by_type[i] * stride(i);
    return b;
  }

  std::vector<int> items_of_bundle(BundleId b) const {
    std::vector<int> v(num_types());
    for (int i = 0; i < num_types(); ++i) v[i] = item_index_of(b, i);
    return v;
  }

  std::vector<std::string> bundle_item_names(BundleId b) const {
    std::vector<std::string> v;
    v.reserve(num_types());
    for (int i = 0; i < num_types(); ++i) v.push_back(item_names[i][item_index_of(b, i)]);
    return v;
  }

  std::string bundle_label(BundleId b) const {
    std::string s;
    for (int i = 0; i < num_types(); ++i) {
      if (i) s += ' ';
      s += item_names[i][item_index_of(b, i)];
    }
    return s;
  }

  std::optional<std::pair<int, int>> find_item(const std::string& name) const {
    for (int i = 0; i < num_types(); ++i)
      for (int k = 0; k < n; ++k)
        if (item_names[i][k] == name) return std::make_pair(i, k);
    return std::nullopt;
  }
};

// Builds a validated square instance. Item identifiers must be globally
// unique; every type must carry exactly n items.
inline Instance make_instance(int n, std::vector<std::string> type_names,
                              std::vector<std::vector<std::string>> item_names,
                              std::vector<std::string> agent_names = {}) {
  if (n <= 0) throw PreconditionError("an instance needs at least one agent");
  if (type_names.empty()) throw PreconditionError("an instance needs at least one type");
  if (item_names.size() != type_names.size())
    throw ShapeError("item lists do not match type list");
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < item_names.size(); ++i) {
    if (static_cast<int>(item_names[i].size()) != n)
      throw ParseError(ParseCode::non_square_type,
                       "type '" + type_names[i] + "' has " +
                           std::to_string(item_names[i].size()) + " items for " +
                           std::to_string(n) + " agents");
    for (const auto& it : item_names[i])
      if (!seen.emplace(it, 1).second)
        throw ParseError(ParseCode::duplicate_item, "item '" + it + "' declared twice");
  }
  Instance inst;
  inst.n = n;
  inst.type_names = std::move(type_names);
  inst.item_names = std::move(item_names);
  if (agent_names.empty())
    for (int j = 1; j <= n; ++j) agent_names.push_back(std::to_string(j));
  if (static_cast<int>(agent_names.size()) != n)
    throw ShapeError("agent name list does not match n");
  inst.agent_names = std::move(agent_names);
  return inst;
}

// All n^p bundles in canonical order.
inline std::vector<BundleId> enumerate_bundles(const Instance& inst) {
  std::vector<BundleId> v(inst.num_bundles());
  for (int b = 0; b < inst.num_bundles(); ++b) v[b] = b;
  return v;
}

struct LinearPreference {
  std::vector<BundleId> ranking;  // most preferred first, a permutation of D
  std::vector<int> rank_of;       // inverse of ranking

  bool prefers(BundleId x, BundleId y) const { return rank_of[x] < rank_of[y]; }
};

inline LinearPreference make_linear_preference(std::vector<BundleId> ranking, const Instance& inst) {
  const int d = inst.num_bundles();
  if (static_cast<int>(ranking.size()) != d)
    throw ParseError(ParseCode::incomplete_ranking,
                     "ranking lists " + std::to_string(ranking.size()) + " of " +
                         std::to_string(d) + " bundles");
  LinearPreference p;
  p.rank_of.assign(d, -1);
  for (int r = 0; r < d; ++r) {
    BundleId b = ranking[r];
    if (b < 0 || b >= d || p.rank_of[b] != -1)
      throw ParseError(ParseCode::incomplete_ranking, "ranking is not a permutation of the bundle space");
    p.rank_of[b] = r;
  }
  p.ranking = std::move(ranking);
  return p;
}

struct LexicographicPreference {
  std::vector<int> importance;            // permutation of types, most important first
  std::vector<std::vector<int>> per_type; // [type] -> item indices, most preferred first
};

// x > y under the lexicographic rule: at the most important type where the
// bundles differ, x carries the better item.
inline LinearPreference expand_lexicographic(const LexicographicPreference& q, const Instance& inst) {
  const int p = inst.num_types();
  if (static_cast<int>(q.importance.size()) != p)
    throw PreconditionError("malformed preference: importance order must list every type once");
  std::vector<bool> seen_type(p, false);
  for (int t : q.importance) {
    if (t < 0 || t >= p || seen_type[t])
      throw PreconditionError("malformed preference: importance order must list every type once");
    seen_type[t] = true;
  }
  if (static_cast<int>(q.per_type.size()) != p)
    throw PreconditionError("malformed preference: need one item order per type");
  // rank_in_type[i][k] = position of item k within the type-i order
  std::vector<std::vector<int>> rank_in_type(p, std::vector<int>(inst.n, -1));
  for (int i = 0; i < p; ++i) {
    if (static_cast<int>(q.per_type[i].size()) != inst.n)
      throw PreconditionError("malformed preference: type order for '" + inst.type_names[i] +
                              "' must list every item once");
    for (int r = 0; r < inst.n; ++r) {
      int k = q.per_type[i][r];
      if (k < 0 || k >= inst.n || rank_in_type[i][k] != -1)
        throw PreconditionError("malformed preference: type order for '" + inst.type_names[i] +
                                "' must list every item once");
      rank_in_type[i][k] = r;
    }
  }
  // Walk the mixed radix counter over importance-ordered digits; the count
  // order is exactly the preference order.
  std::vector<BundleId> ranking;
  ranking.reserve(inst.num_bundles());
  std::vector<int> digit(p, 0);  // digit[k] = rank within type importance[k]
  for (;;) {
    std::vector<int> item_by_type(p);
    for (int k = 0; k < p; ++k) {
      int type = q.importance[k];
      item_by_type[type] = q.per_type[type][digit[k]];
    }
    ranking.push_back(inst.bundle_of(item_by_type));
    int k = p - 1;
    while (k >= 0 && digit[k] == inst.n - 1) digit[k--] = 0;
    if (k < 0) break;
    ++digit[k];
  }
  return make_linear_preference(std::move(ranking), inst);
}

// Inverse of expand_lexicographic: reads the importance order off the block
// structure of the ranking and the per-type orders off first occurrences,
// then verifies the candidate reproduces the input exactly.
inline std::optional<LexicographicPreference> recognize_lexicographic(const LinearPreference& pref,
                                                                      const Instance& inst) {
  const int p = inst.num_types();
  LexicographicPreference q;
  q.per_type.assign(p, {});
  for (int i = 0; i < p; ++i) {
    std::vector<bool> seen(inst.n, false);
    for (BundleId b : pref.ranking) {
      int k = inst.item_index_of(b, i);
      if (!seen[k]) {
        seen[k] = true;
        q.per_type[i].push_back(k);
      }
    }
  }
  // In a lexicographic ranking the component of the most important type is
  // the slowest to change; sort types by how soon they first diverge from
  // the top bundle, latest first.
  std::vector<std::pair<int, int>> first_change(p);  // (position, type)
  for (int i = 0; i < p; ++i) {
    int top_item = inst.item_index_of(pref.ranking[0], i);
    int pos = static_cast<int>(pref.ranking.size());
    for (int r = 1; r < static_cast<int>(pref.ranking.size()); ++r)
      if (inst.item_index_of(pref.ranking[r], i) != top_item) {
        pos = r;
        break;
      }
    first_change[i] = {pos, i};
  }
  std::stable_sort(first_change.begin(), first_change.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (auto& [pos, type] : first_change) q.importance.push_back(type);
  if (expand_lexicographic(q, inst).ranking == pref.ranking) return q;
  return std::nullopt;
}

// ucs(>, x): x together with everything ranked strictly above it.
inline std::vector<BundleId> upper_contour_set(const LinearPreference& pref, BundleId x) {
  if (x < 0 || x >= static_cast<int>(pref.rank_of.size()) || pref.rank_of[x] < 0)
    throw ShapeError("bundle outside the preference domain");
  return {pref.ranking.begin(), pref.ranking.begin() + pref.rank_of[x] + 1};
}

struct AgentPreference {
  LinearPreference linear;                     // always present (expanded on construction)
  std::optional<LexicographicPreference> lex;  // present iff declared lexicographic
};

struct Profile {
  std::vector<AgentPreference> agents;

  bool all_declared_lexicographic() const {
    for (const auto& a : agents)
      if (!a.lex) return false;
    return !agents.empty();
  }
};

inline Profile make_profile(std::vector<AgentPreference> prefs, const Instance& inst) {
  if (static_cast<int>(prefs.size()) != inst.n)
    throw ShapeError("profile lists " + std::to_string(prefs.size()) + " preferences for " +
                     std::to_string(inst.n) + " agents");
  Profile r;
  r.agents = std::move(prefs);
  return r;
}

inline AgentPreference linear_agent(std::vector<BundleId> ranking, const Instance& inst) {
  return AgentPreference{make_linear_preference(std::move(ranking), inst), std::nullopt};
}

inline AgentPreference lexicographic_agent(LexicographicPreference q, const Instance& inst) {
  AgentPreference a;
  a.linear = expand_lexicographic(q, inst);
  a.lex = std::move(q);
  return a;
}

// Lexicographic structure of an agent, declared or recovered from the ranking.
inline std::optional<LexicographicPreference> lexicographic_view(const AgentPreference& a,
                                                                 const Instance& inst) {
  if (a.lex) return a.lex;
  return recognize_lexicographic(a.linear, inst);
}

}  // namespace mtra
