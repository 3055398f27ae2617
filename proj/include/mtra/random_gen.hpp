#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mtra/assignment.hpp"
#include "mtra/model.hpp"
#include "mtra/oracles.hpp"

namespace mtra {

// Deterministic generator for the property suites. Avoids
// std::uniform_int_distribution so streams are identical everywhere.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(std::uint64_t seed) : eng(seed) {}

  std::uint64_t next(std::uint64_t bound) { return eng() % bound; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[next(i)]);
  }
};

inline Instance random_instance(Rng&, int n, int p) {
  std::vector<std::string> types;
  std::vector<std::vector<std::string>> items;
  for (int i = 0; i < p; ++i) {
    std::string t(1, static_cast<char>('A' + i));
    types.push_back(t);
    std::vector<std::string> row;
    for (int k = 1; k <= n; ++k) row.push_back(std::to_string(k) + "_" + t);
    items.push_back(std::move(row));
  }
  return make_instance(n, std::move(types), std::move(items));
}

inline Profile random_linear_profile(Rng& rng, const Instance& inst) {
  std::vector<AgentPreference> prefs;
  for (int j = 0; j < inst.n; ++j) {
    auto ranking = enumerate_bundles(inst);
    rng.shuffle(ranking);
    prefs.push_back(linear_agent(std::move(ranking), inst));
  }
  return make_profile(std::move(prefs), inst);
}

inline Profile random_lexicographic_profile(Rng& rng, const Instance& inst) {
  std::vector<AgentPreference> prefs;
  for (int j = 0; j < inst.n; ++j) {
    LexicographicPreference q;
    for (int i = 0; i < inst.num_types(); ++i) q.importance.push_back(i);
    rng.shuffle(q.importance);
    q.per_type.resize(inst.num_types());
    for (int i = 0; i < inst.num_types(); ++i) {
      for (int k = 0; k < inst.n; ++k) q.per_type[i].push_back(k);
      rng.shuffle(q.per_type[i]);
    }
    prefs.push_back(lexicographic_agent(std::move(q), inst));
  }
  return make_profile(std::move(prefs), inst);
}

inline DiscreteAssignment random_discrete_assignment(Rng& rng, const Instance& inst) {
  DiscreteAssignment d;
  d.bundle_of.resize(inst.n);
  std::vector<std::vector<int>> perm(inst.num_types());
  for (int i = 0; i < inst.num_types(); ++i) {
    for (int k = 0; k < inst.n; ++k) perm[i].push_back(k);
    rng.shuffle(perm[i]);
  }
  for (int j = 0; j < inst.n; ++j) {
    std::vector<int> items(inst.num_types());
    for (int i = 0; i < inst.num_types(); ++i) items[i] = perm[i][j];
    d.bundle_of[j] = inst.bundle_of(items);
  }
  return d;
}

// Convex combination of random discrete assignments; always valid.
inline FractionalAssignment random_valid_assignment(Rng& rng, const Instance& inst, int terms = 4) {
  FractionalAssignment P(inst.n, inst.num_bundles());
  std::vector<Rat> w;
  Rat total(0);
  for (int t = 0; t < terms; ++t) {
    w.push_back(Rat(1 + static_cast<long>(rng.next(8))));
    total += w.back();
  }
  for (int t = 0; t < terms; ++t) {
    auto d = random_discrete_assignment(rng, inst);
    for (int j = 0; j < inst.n; ++j) P.at(j, d.bundle_of[j]) += w[t] / total;
  }
  return P;
}

// A valid assignment differing from P: mix P toward a discrete assignment.
inline FractionalAssignment random_perturbed_assignment(Rng& rng, const Instance& inst,
                                                        const FractionalAssignment& P) {
  for (int tries = 0; tries < 64; ++tries) {
    Rat lambda = rat(1 + static_cast<long>(rng.next(3)), 4);  // 1/4, 1/2, 3/4
    FractionalAssignment Q(inst.n, inst.num_bundles());
    auto d = random_discrete_assignment(rng, inst);
    for (int j = 0; j < inst.n; ++j)
      for (int b = 0; b < Q.cols; ++b) Q.at(j, b) = (Rat(1) - lambda) * P.at(j, b);
    for (int j = 0; j < inst.n; ++j) Q.at(j, d.bundle_of[j]) += lambda;
    if (!(Q == P)) return Q;
  }
  throw InternalError("could not perturb the assignment");
}

// Random allocation row with small rational entries summing to one.
inline std::vector<Rat> random_allocation(Rng& rng, int cols) {
  std::vector<long> raw(cols);
  long total = 0;
  for (int b = 0; b < cols; ++b) {
    raw[b] = static_cast<long>(rng.next(5));
    total += raw[b];
  }
  if (total == 0) {
    raw[rng.next(cols)] = 1;
    total = 1;
  }
  std::vector<Rat> row(cols);
  for (int b = 0; b < cols; ++b) row[b] = rat(raw[b], total);
  return row;
}

}  // namespace mtra
