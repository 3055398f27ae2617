#pragma once

#include <string>
#include <vector>

#include "mtra/model.hpp"
#include "mtra/rational.hpp"

namespace mtra {

// n x |D| matrix of exact bundle shares, columns in canonical bundle order.
struct FractionalAssignment {
  int n = 0;
  int cols = 0;
  std::vector<Rat> a;

  FractionalAssignment() = default;
  FractionalAssignment(int n_, int cols_) : n(n_), cols(cols_), a(n_ * cols_, Rat(0)) {}

  Rat& at(int agent, BundleId b) { return a[agent * cols + b]; }
  const Rat& at(int agent, BundleId b) const { return a[agent * cols + b]; }

  std::vector<Rat> row(int agent) const {
    return {a.begin() + agent * cols, a.begin() + (agent + 1) * cols};
  }

  bool operator==(const FractionalAssignment& o) const = default;
};

// n x n doubly stochastic matrix over one type's items.
struct SingleTypeAssignment {
  int n = 0;
  std::vector<Rat> a;

  SingleTypeAssignment() = default;
  explicit SingleTypeAssignment(int n_) : n(n_), a(n_ * n_, Rat(0)) {}

  Rat& at(int agent, int item) { return a[agent * n + item]; }
  const Rat& at(int agent, int item) const { return a[agent * n + item]; }

  bool operator==(const SingleTypeAssignment& o) const = default;
};

// One whole bundle per agent, every item covered exactly once.
struct DiscreteAssignment {
  std::vector<BundleId> bundle_of;  // agent -> bundle

  bool operator==(const DiscreteAssignment& o) const = default;
  auto operator<=>(const DiscreteAssignment& o) const = default;
};

inline FractionalAssignment to_fractional(const DiscreteAssignment& d, const Instance& inst) {
  FractionalAssignment P(inst.n, inst.num_bundles());
  if (static_cast<int>(d.bundle_of.size()) != inst.n)
    throw ShapeError("discrete assignment does not cover every agent");
  for (int j = 0; j < inst.n; ++j) P.at(j, d.bundle_of[j]) = 1;
  return P;
}

struct Violation {
  enum class Kind { entry_range, row_sum, item_marginal };
  Kind kind;
  int agent = -1;   // row_sum / entry_range
  int bundle = -1;  // entry_range
  int type = -1;    // item_marginal
  int item = -1;    // item_marginal
  Rat deficit;      // required minus actual (row sums and marginals)

  std::string describe(const Instance& inst) const {
    switch (kind) {
      case Kind::entry_range:
        return "entry out of [0,1] for agent " + inst.agent_names[agent] + " at bundle " +
               inst.bundle_label(bundle);
      case Kind::row_sum:
        return "row sum of agent " + inst.agent_names[agent] + " misses 1 by " +
               rat_to_string(deficit);
      case Kind::item_marginal:
        return "supply of item " + inst.item_names[type][item] + " misses 1 by " +
               rat_to_string(deficit);
    }
    return "";
  }
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the two defining constraints exactly: unit row sums and unit item
// marginals, plus entry ranges. Reports every violation with its deficit.
inline ValidationReport validate(const FractionalAssignment& P, const Instance& inst) {
  if (P.n != inst.n || P.cols != inst.num_bundles())
    throw ShapeError("assignment is " + std::to_string(P.n) + "x" + std::to_string(P.cols) +
                     ", instance needs " + std::to_string(inst.n) + "x" +
                     std::to_string(inst.num_bundles()));
  ValidationReport rep;
  for (int j = 0; j < P.n; ++j)
    for (int b = 0; b < P.cols; ++b)
      if (P.at(j, b) < 0 || P.at(j, b) > 1)
        rep.violations.push_back({Violation::Kind::entry_range, j, b, -1, -1, Rat(0)});
  for (int j = 0; j < P.n; ++j) {
    Rat s(0);
    for (int b = 0; b < P.cols; ++b) s += P.at(j, b);
    if (s != 1) rep.violations.push_back({Violation::Kind::row_sum, j, -1, -1, -1, Rat(1) - s});
  }
  for (int i = 0; i < inst.num_types(); ++i)
    for (int k = 0; k < inst.n; ++k) {
      Rat s(0);
      for (int j = 0; j < P.n; ++j)
        for (int b = 0; b < P.cols; ++b)
          if (inst.bundle_contains(b, i, k)) s += P.at(j, b);
      if (s != 1)
        rep.violations.push_back({Violation::Kind::item_marginal, -1, -1, i, k, Rat(1) - s});
    }
  return rep;
}

// Marginal of type i: entry (j, o) sums the shares of all bundles whose
// type-i component is o. Doubly stochastic whenever P is valid.
inline SingleTypeAssignment type_marginal(const FractionalAssignment& P, const Instance& inst,
                                          int type) {
  if (type < 0 || type >= inst.num_types()) throw ShapeError("no such type");
  SingleTypeAssignment M(inst.n);
  for (int j = 0; j < P.n; ++j)
    for (int b = 0; b < P.cols; ++b) M.at(j, inst.item_index_of(b, type)) += P.at(j, b);
  return M;
}

// Product composition: p_{j,x} is the product over types of the agent's
// marginal share of x's type-i item. Row sums and marginals are preserved.
inline FractionalAssignment product_compose(const std::vector<SingleTypeAssignment>& marginals,
                                            const Instance& inst) {
  if (static_cast<int>(marginals.size()) != inst.num_types())
    throw ShapeError("need one marginal per type");
  for (const auto& m : marginals)
    if (m.n != inst.n) throw ShapeError("marginal size does not match agent count");
  FractionalAssignment P(inst.n, inst.num_bundles());
  for (int j = 0; j < inst.n; ++j)
    for (int b = 0; b < P.cols; ++b) {
      Rat v(1);
      for (int i = 0; i < inst.num_types(); ++i) {
        v *= marginals[i].at(j, inst.item_index_of(b, i));
        if (v == 0) break;
      }
      P.at(j, b) = v;
    }
  return P;
}

}  // namespace mtra
