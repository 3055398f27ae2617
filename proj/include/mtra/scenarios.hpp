#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mtra/analysis.hpp"
#include "mtra/fixtures.hpp"
#include "mtra/io.hpp"
#include "mtra/mechanisms.hpp"
#include "mtra/oracles.hpp"

namespace mtra {

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ScenarioReport {
  std::string fixture;
  std::vector<Assertion> assertions;

  bool all_pass() const {
    for (const auto& a : assertions)
      if (!a.pass) return false;
    return !assertions.empty();
  }
};

namespace detail {

inline void check(ScenarioReport& rep, const std::string& name, bool ok,
                  const std::string& detail = "") {
  rep.assertions.push_back({name, ok, detail});
}

inline std::set<std::pair<BundleId, BundleId>> tuple_pairs(const std::vector<ImprovableTuple>& ts) {
  std::set<std::pair<BundleId, BundleId>> out;
  for (const auto& t : ts) out.insert({t.better, t.worse});
  return out;
}

// The conditional-preference appendix family: row 1 = (v, w, y, z), row 2 =
// (z, y, w, v) over the canonical bundle columns.
inline FractionalAssignment a1_candidate(const Instance& inst, Rat v, Rat w, Rat y, Rat z) {
  FractionalAssignment Q(2, 4);
  Q.at(0, 0) = v;
  Q.at(0, 1) = w;
  Q.at(0, 2) = y;
  Q.at(0, 3) = z;
  Q.at(1, 0) = z;
  Q.at(1, 1) = y;
  Q.at(1, 2) = w;
  Q.at(1, 3) = v;
  if (!validate(Q, inst).ok()) throw InternalError("candidate pattern is not a valid assignment");
  return Q;
}

}  // namespace detail

inline ScenarioReport run_fixture_scenario(const std::string& id, const OracleCaps& caps = {}) {
  using detail::check;
  ScenarioReport rep;
  rep.fixture = id;
  Fixture f = get_fixture(id);
  const Instance& in = f.instance;
  const Profile& pr = f.profile;

  if (id == "thm1") {
    const auto& P = f.matrices.at("P");
    check(rep, "P is a valid fractional assignment", validate(P, in).ok());
    check(rep, "P is sd-envy-free", is_sd_envy_free(P, in, pr).envy_free);
    check(rep, "P is not decomposable", !is_decomposable(P, in, caps).has_value());
    auto report = verify_impossibility_instance(8, caps);
    check(rep, "grid has five points", report.points.size() == 5);
    for (const auto& pt : report.points)
      check(rep, "grid point v=" + rat_to_string(pt.v) +
                     ": envy-free decomposable Q is dominated by P and differs",
            pt.pass());
    // Spot check v = 1/4: agent 1's cumulatives against the uniform Q.
    FractionalAssignment Q = detail::a1_candidate(in, Rat(1, 4), Rat(1, 4), Rat(1, 4), Rat(1, 4));
    check(rep, "uniform Q: agent 1 cumulative ties at her second rank and loses at her third",
          cumulative_share(Q, pr, 0, bid(in, {"1_F", "2_B"})) == Rat(1, 2) &&
              cumulative_share(P, pr, 0, bid(in, {"1_F", "2_B"})) == Rat(1, 2) &&
              cumulative_share(Q, pr, 0, bid(in, {"2_F", "2_B"})) == Rat(3, 4) &&
              cumulative_share(P, pr, 0, bid(in, {"2_F", "2_B"})) == Rat(1));
  } else if (id == "eg2") {
    const auto& Q = f.matrices.at("Q");
    const auto& Qp = f.matrices.at("Qprime");
    check(rep, "canonical bundle order",
          in.bundle_label(0) == "1_F 1_B" && in.bundle_label(1) == "1_F 2_B" &&
              in.bundle_label(2) == "2_F 1_B" && in.bundle_label(3) == "2_F 2_B");
    check(rep, "Q' stochastically dominates Q", sd_dominates_assignment(Qp, Q, pr));
    check(rep, "Q does not dominate Q'", !sd_dominates_assignment(Q, Qp, pr));
    auto eff = is_sd_efficient(Q, in, pr);
    check(rep, "Q is sd-inefficient", !eff.efficient);
    check(rep, "the witness dominates Q and differs",
          eff.dominating && validate(*eff.dominating, in).ok() &&
              sd_dominates_assignment(*eff.dominating, Q, pr) && !(*eff.dominating == Q));
    check(rep, "Q is decomposable", is_decomposable(Q, in, caps).has_value());
    auto lex1 = recognize_lexicographic(pr.agents[0].linear, in);
    check(rep, "agent 1's ranking is lexicographic with the food type most important",
          lex1 && in.type_names[lex1->importance[0]] == "F");
    LexicographicPreference ex{{0, 1}, {{0, 1}, {1, 0}}};  // F > B, 1_F > 2_F, 2_B > 1_B
    check(rep, "definitional expansion example",
          expand_lexicographic(ex, in).ranking ==
              std::vector<BundleId>{bid(in, {"1_F", "2_B"}), bid(in, {"1_F", "1_B"}),
                                    bid(in, {"2_F", "2_B"}), bid(in, {"2_F", "1_B"})});
    auto ucs = upper_contour_set(pr.agents[0].linear, bid(in, {"2_F", "1_B"}));
    check(rep, "upper contour set of agent 1 at 2_F1_B",
          std::set<BundleId>(ucs.begin(), ucs.end()) ==
              std::set<BundleId>{bid(in, {"1_F", "1_B"}), bid(in, {"1_F", "2_B"}),
                                 bid(in, {"2_F", "1_B"})});
    // Per-type PS halves compose into Q.
    auto ps = ps_single_type({Rat(1), Rat(1)}, {{0, 1}, {0, 1}}, Rat(1));
    bool halves = ps.shares[0] == std::vector<Rat>{Rat(1, 2), Rat(1, 2)} &&
                  ps.shares[1] == std::vector<Rat>{Rat(1, 2), Rat(1, 2)};
    check(rep, "single-type runs split both items in halves", halves);
    SingleTypeAssignment half(2);
    half.at(0, 0) = half.at(0, 1) = half.at(1, 0) = half.at(1, 1) = Rat(1, 2);
    check(rep, "independent composition of the halves is Q", product_compose({half, half}, in) == Q);
    // Permutation marginals compose to one discrete assignment.
    SingleTypeAssignment pf(2), pb(2);
    pf.at(0, 0) = pf.at(1, 1) = 1;
    pb.at(0, 1) = pb.at(1, 0) = 1;
    check(rep, "permutation marginals compose to a discrete assignment",
          product_compose({pf, pb}, in) ==
              to_fractional(DiscreteAssignment{{bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "1_B"})}},
                            in));
  } else if (id == "eg3") {
    const auto& expect = f.matrices.at("P_lexips");
    auto run = lexips_run(in, pr);
    check(rep, "phase-per-type run reproduces the quarters table", run.assignment == expect);
    check(rep, "output equals the product of its per-type marginals",
          product_compose(run.type_marginals, in) == run.assignment);
    check(rep, "output is a valid fractional assignment", validate(run.assignment, in).ok());
    auto mB = type_marginal(run.assignment, in, 1);
    check(rep, "type-B marginal of agent 3 is a point mass on 2_B",
          mB.at(2, 0) == 0 && mB.at(2, 1) == 1 && mB.at(2, 2) == 0);
    auto psF = ps_single_type({Rat(1), Rat(1), Rat(1)}, {{0, 1, 2}, {0, 1, 2}}, Rat(1));
    check(rep, "phase 1 of type F splits the first two items between agents 1 and 2",
          psF.shares[0] == std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(0)} &&
              psF.shares[1] == std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(0)} &&
              psF.supply_after == std::vector<Rat>{Rat(0), Rat(0), Rat(1)});
    std::vector<SingleTypeDecomposition> per_type;
    for (int i = 0; i < in.num_types(); ++i)
      per_type.push_back(birkhoff_decompose(run.type_marginals[i]));
    check(rep, "type-F marginal splits into two half-weight permutations",
          per_type[0].terms.size() == 2 && per_type[0].terms[0].weight == Rat(1, 2) &&
              per_type[0].terms[1].weight == Rat(1, 2));
    auto prod = product_decomposition(per_type, in);
    check(rep, "the product decomposition recomposes to the output exactly",
          recompose(prod, in) == run.assignment);
    check(rep, "the output is decomposable", is_decomposable(run.assignment, in, caps).has_value());
    auto parsed = parse_instance_text(instance_to_json(in, pr).dump());
    check(rep, "the instance file round-trips with the lexicographic flag set",
          parsed.all_lexicographic &&
              parsed.profile.agents[2].linear.ranking == pr.agents[2].linear.ranking);
  } else if (id == "eg4") {
    const auto& P = f.matrices.at("P");
    const auto& Qgc = f.matrices.at("Q_gc");
    auto run = mps_run(in, pr);
    check(rep, "bundle-eating run reproduces the halves matrix", run.assignment == P);
    check(rep, "all-ones eating speeds give the same outcome",
          eating(in, pr, uniform_schedule(in.n)) == P);
    check(rep, "the output is not decomposable", !is_decomposable(P, in, caps).has_value());
    check(rep, "the output is sd-envy-free", is_sd_envy_free(P, in, pr).envy_free);
    check(rep, "the output is sd-efficient", is_sd_efficient(P, in, pr).efficient);
    check(rep, "the output is lexi-efficient", is_lexi_efficient(P, in, pr, caps).efficient);
    check(rep, "the output admits no generalized cycle",
          !has_generalized_cycle(P, in, pr).has_value());
    auto sched = speeds_from_assignment(P, in, pr);
    check(rep, "reconstructed speeds have two segments and replay to the output",
          sched.agents[0].rates.size() == 2 && eating(in, pr, sched) == P);
    check(rep, "the leximin-optimal assignment coincides with the output",
          leximin_optimal_assignment(in, pr, caps) == P);
    check(rep, "the output is item-wise ordinal fair", is_itemwise_ordinal_fair(P, in, pr).fair);
    // The generalized-cycle illustration on Q.
    auto tuples = improvable_tuples(Qgc, in, pr);
    std::vector<ImprovableTuple> expect_tuples{
        {bid(in, {"1_F", "1_B"}), bid(in, {"2_F", "2_B"}), 0},
        {bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "2_B"}), 0},
        {bid(in, {"1_F", "2_B"}), bid(in, {"1_F", "1_B"}), 1},
        {bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "1_B"}), 1},
        {bid(in, {"2_F", "1_B"}), bid(in, {"1_F", "1_B"}), 1}};
    std::sort(expect_tuples.begin(), expect_tuples.end(),
              [](const ImprovableTuple& a, const ImprovableTuple& b) {
                return std::tie(a.witness_agent, a.better, a.worse) <
                       std::tie(b.witness_agent, b.better, b.worse);
              });
    check(rep, "improvable tuples of Q match the definition", tuples == expect_tuples);
    auto witness = has_generalized_cycle(Qgc, in, pr);
    std::set<std::pair<BundleId, BundleId>> cycle{
        {bid(in, {"1_F", "1_B"}), bid(in, {"2_F", "2_B"})},
        {bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "1_B"})},
        {bid(in, {"2_F", "1_B"}), bid(in, {"1_F", "1_B"})}};
    bool contains = witness.has_value();
    if (contains) {
      auto pairs = detail::tuple_pairs(witness->tuples);
      for (const auto& c : cycle) contains = contains && pairs.count(c) > 0;
      contains = contains && is_generalized_cycle(witness->tuples, in);
    }
    check(rep, "Q admits the generalized cycle from the worked example", contains);
    auto trace = peel(Qgc, in, pr);
    check(rep, "peeling Q stalls with every item left",
          !trace.complete() && trace.residual_items.size() == 4);
    bool not_representable = false;
    try {
      speeds_from_assignment(Qgc, in, pr);
    } catch (const NotRepresentableError&) {
      not_representable = true;
    }
    check(rep, "no eating speeds reproduce Q", not_representable);
    check(rep, "Q is sd-dominated by the eating output", sd_dominates_assignment(P, Qgc, pr));
    auto parsed = parse_instance_text(instance_to_json(in, pr).dump());
    check(rep, "the instance file round-trips as linear rankings",
          !parsed.all_lexicographic && parsed.instance.n == 2 &&
              parsed.instance.num_types() == 2 &&
              parsed.profile.agents[0].linear.ranking == pr.agents[0].linear.ranking &&
              parsed.profile.agents[1].linear.ranking == pr.agents[1].linear.ranking);
  } else if (id == "rm2") {
    auto P = lexips(in, pr);
    const auto& q = f.rows.at("q_rm2");
    check(rep, "the half-half allocation lexi-dominates agent 1's row",
          lexi_dominates(q, P.row(0), pr.agents[0].linear));
    auto lex = is_lexi_efficient(P, in, pr, caps);
    check(rep, "the phase-per-type output is not lexi-efficient", !lex.efficient);
    bool witness_ok = lex.dominating && validate(*lex.dominating, in).ok() &&
                      !(*lex.dominating == P);
    if (witness_ok)
      for (int j = 0; j < in.n; ++j)
        witness_ok = witness_ok && (lex.dominating->row(j) == P.row(j) ||
                                    lexi_dominates(lex.dominating->row(j), P.row(j),
                                                   pr.agents[j].linear));
    check(rep, "the witness improves some rows lexicographically and keeps the rest", witness_ok);
  } else if (id == "rm3") {
    const auto& expect = f.matrices.at("P_mps");
    check(rep, "expected table is a valid fractional assignment", validate(expect, in).ok());
    check(rep, "bundle-eating run reproduces the thirds-and-twelfths table",
          mps(in, pr) == expect);
    check(rep, "the output is not decomposable", !is_decomposable(expect, in, caps).has_value());
    check(rep, "the output is item-wise ordinal fair",
          is_itemwise_ordinal_fair(expect, in, pr).fair);
    check(rep, "the leximin-optimal assignment coincides with the output",
          leximin_optimal_assignment(in, pr, caps) == expect);
  } else if (id == "rm4") {
    const auto& P = f.matrices.at("P");
    const auto& Pp = f.matrices.at("Pprime");
    check(rep, "truthful run gives each agent her importance-ordered bundle",
          lexips(in, pr) == P);
    auto audit = audit_strategyproofness(Mechanism::lexips, in, pr, 1,
                                         MisreportClass::lexicographic, caps);
    bool found = false;
    for (const auto& v : audit.violations)
      if (v.manipulated == Pp && v.misreport.lex &&
          v.misreport.lex->importance == std::vector<int>{0, 2, 1})
        found = true;
    check(rep, "agent 2 profits by moving the T type up her importance order", found);
    check(rep, "every recorded violation really dominates and differs", [&] {
      for (const auto& v : audit.violations) {
        if (v.manipulated.row(1) == v.truthful.row(1)) return false;
        if (!sd_dominates(v.manipulated.row(1), v.truthful.row(1), pr.agents[1].linear))
          return false;
      }
      return !audit.violations.empty();
    }());
    for (int j = 0; j < in.n; ++j) {
      auto fixed = audit_strategyproofness(Mechanism::lexips, in, pr, j,
                                           MisreportClass::lexicographic_fixed_importance, caps);
      check(rep,
            "agent " + in.agent_names[j] + " cannot profit without changing her importance order",
            fixed.clean());
    }
  } else if (id == "rm5") {
    const auto& P = f.matrices.at("P");
    const auto& uniform = f.matrices.at("uniform");
    auto witness = has_generalized_cycle(P, in, pr);
    std::set<std::pair<BundleId, BundleId>> cycle{
        {bid(in, {"1_F", "1_B"}), bid(in, {"1_F", "2_B"})},
        {bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "1_B"})},
        {bid(in, {"2_F", "1_B"}), bid(in, {"2_F", "2_B"})}};
    bool contains = witness.has_value();
    if (contains) {
      auto pairs = detail::tuple_pairs(witness->tuples);
      for (const auto& c : cycle) contains = contains && pairs.count(c) > 0;
    }
    check(rep, "P admits a generalized cycle containing the stated tuples", contains);
    check(rep, "P is nevertheless sd-efficient", is_sd_efficient(P, in, pr).efficient);
    check(rep, "the uniform half-half table is not lexi-efficient",
          !is_lexi_efficient(uniform, in, pr, caps).efficient);
  } else if (id == "rm6") {
    const auto& P = f.matrices.at("P");
    const auto& Pp = f.matrices.at("Pprime");
    check(rep, "truthful bundle-eating run matches the table", mps(in, pr) == P);
    auto audit =
        audit_strategyproofness(Mechanism::mps, in, pr, 0, MisreportClass::all_linear, caps);
    std::vector<BundleId> lie{bid(in, {"2_F", "1_B"}), bid(in, {"1_F", "1_B"}),
                              bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "2_B"})};
    bool found = false;
    for (const auto& v : audit.violations)
      if (v.manipulated == Pp && v.misreport.linear.ranking == lie) found = true;
    check(rep, "agent 1 profits by promoting her third-ranked bundle to the top", found);
    check(rep, "every recorded violation really dominates and differs", [&] {
      for (const auto& v : audit.violations) {
        if (v.manipulated.row(0) == v.truthful.row(0)) return false;
        if (!sd_dominates(v.manipulated.row(0), v.truthful.row(0), pr.agents[0].linear))
          return false;
      }
      return !audit.violations.empty();
    }());
  } else if (id == "a1") {
    const Rat h(1, 2);
    const Rat z(0);
    struct Discrete {
      const char* name;
      Rat v, w, y, z;
      int envious;
    };
    // Every discrete candidate fails weak envy-freeness.
    for (const auto& d : {Discrete{"agent 1 takes her top bundle", Rat(1), z, z, z, 1},
                          Discrete{"agent 1 takes 1_F2_B", z, Rat(1), z, z, 1},
                          Discrete{"agent 1 takes 2_F1_B", z, z, Rat(1), z, 0},
                          Discrete{"agent 1 takes 2_F2_B", z, z, z, Rat(1), 0}}) {
      auto Q = detail::a1_candidate(in, d.v, d.w, d.y, d.z);
      auto we = is_sd_weak_envy_free(Q, in, pr);
      check(rep, std::string("discrete case (") + d.name + ") makes agent " +
                     in.agent_names[d.envious] + " envious",
            !we.envy_free && we.pair && we.pair->first == d.envious);
    }
    {
      auto Q = detail::a1_candidate(in, h, z, h, z);  // v, y nonzero
      auto witness = has_generalized_cycle(Q, in, pr);
      bool pairs_ok = witness.has_value();
      if (pairs_ok) {
        auto pairs = detail::tuple_pairs(witness->tuples);
        pairs_ok = pairs.count({bid(in, {"2_F", "2_B"}), bid(in, {"2_F", "1_B"})}) > 0 &&
                   pairs.count({bid(in, {"2_F", "1_B"}), bid(in, {"2_F", "2_B"})}) > 0;
      }
      check(rep, "pattern (v,y): generalized cycle on the 2_F bundles", pairs_ok);
      check(rep, "pattern (v,y): fails weak efficiency",
            !is_sd_weak_efficient(Q, in, pr).efficient);
    }
    {
      auto Q = detail::a1_candidate(in, z, h, z, h);  // w, z nonzero
      auto witness = has_generalized_cycle(Q, in, pr);
      bool pairs_ok = witness.has_value();
      if (pairs_ok) {
        auto pairs = detail::tuple_pairs(witness->tuples);
        pairs_ok = pairs.count({bid(in, {"1_F", "1_B"}), bid(in, {"1_F", "2_B"})}) > 0 &&
                   pairs.count({bid(in, {"1_F", "2_B"}), bid(in, {"1_F", "1_B"})}) > 0;
      }
      check(rep, "pattern (w,z): generalized cycle on the 1_F bundles", pairs_ok);
      check(rep, "pattern (w,z): fails weak efficiency",
            !is_sd_weak_efficient(Q, in, pr).efficient);
    }
    {
      auto Q = detail::a1_candidate(in, h, h, z, z);  // v, w nonzero
      auto we = is_sd_weak_envy_free(Q, in, pr);
      check(rep, "pattern (v,w): agent 2 envies agent 1",
            !we.envy_free && we.pair && *we.pair == std::make_pair(1, 0));
    }
    {
      auto Q = detail::a1_candidate(in, z, z, h, h);  // y, z nonzero
      auto we = is_sd_weak_envy_free(Q, in, pr);
      check(rep, "pattern (y,z): agent 1 envies agent 2",
            !we.envy_free && we.pair && *we.pair == std::make_pair(0, 1));
    }
    check(rep, "pattern (w,y): agent 1 can remix her own shares, failing weak efficiency",
          !is_sd_weak_efficient(detail::a1_candidate(in, z, h, h, z), in, pr).efficient);
    check(rep, "pattern (v,z): agent 2 can remix her own shares, failing weak efficiency",
          !is_sd_weak_efficient(detail::a1_candidate(in, h, z, z, h), in, pr).efficient);
  } else {
    throw PreconditionError("unknown fixture '" + id + "'");
  }
  return rep;
}

}  // namespace mtra
