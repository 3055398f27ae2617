#pragma once

#include <map>
#include <string>
#include <vector>

#include "mtra/assignment.hpp"
#include "mtra/model.hpp"
#include "mtra/oracles.hpp"
#include "mtra/rational.hpp"

namespace mtra {

// Bundle id from item names, any order.
inline BundleId bid(const Instance& inst, const std::vector<std::string>& items) {
  std::vector<int> by_type(inst.num_types(), -1);
  for (const auto& nm : items) {
    auto hit = inst.find_item(nm);
    if (!hit) throw ShapeError("unknown item '" + nm + "'");
    by_type[hit->first] = hit->second;
  }
  for (int i = 0; i < inst.num_types(); ++i)
    if (by_type[i] < 0) throw ShapeError("bundle misses an item of type " + inst.type_names[i]);
  return inst.bundle_of(by_type);
}

inline FractionalAssignment matrix_from_strings(const Instance& inst,
                                                const std::vector<std::vector<std::string>>& rows) {
  FractionalAssignment P(inst.n, inst.num_bundles());
  for (int j = 0; j < inst.n; ++j)
    for (int b = 0; b < inst.num_bundles(); ++b) P.at(j, b) = rat_from_string(rows[j][b]);
  return P;
}

// A worked instance from the paper together with its expected matrices and
// allocation rows, keyed by role ("P", "Q", ...).
struct Fixture {
  std::string id;
  std::string summary;
  Instance instance;
  Profile profile;
  std::map<std::string, FractionalAssignment> matrices;
  std::map<std::string, std::vector<Rat>> rows;
};

namespace detail {

inline Instance two_by_two_instance() {
  return make_instance(2, {"F", "B"}, {{"1_F", "2_F"}, {"1_B", "2_B"}});
}

inline Instance three_by_two_instance() {
  return make_instance(3, {"F", "B"}, {{"1_F", "2_F", "3_F"}, {"1_B", "2_B", "3_B"}});
}

inline LexicographicPreference lex_pref(std::vector<int> importance,
                                        std::vector<std::vector<int>> per_type) {
  return {std::move(importance), std::move(per_type)};
}

}  // namespace detail

inline std::vector<std::string> fixture_ids() {
  return {"thm1", "eg2", "eg3", "eg4", "rm2", "rm3", "rm4", "rm5", "rm6", "a1"};
}

inline Fixture get_fixture(const std::string& id) {
  Fixture f;
  f.id = id;
  if (id == "thm1" || id == "eg4") {
    f.summary = id == "thm1" ? "impossibility instance: envy-free decomposable assignments "
                               "are dominated by a non-decomposable one"
                             : "bundle-eating run whose output is the non-decomposable halves matrix";
    f.instance = detail::two_by_two_instance();
    const Instance& in = f.instance;
    std::vector<AgentPreference> prefs;
    prefs.push_back(linear_agent({bid(in, {"1_F", "1_B"}), bid(in, {"1_F", "2_B"}),
                                  bid(in, {"2_F", "2_B"}), bid(in, {"2_F", "1_B"})},
                                 in));
    prefs.push_back(linear_agent({bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "1_B"}),
                                  bid(in, {"1_F", "1_B"}), bid(in, {"2_F", "2_B"})},
                                 in));
    f.profile = make_profile(std::move(prefs), in);
    f.matrices["P"] = matrix_from_strings(in, {{"1/2", "0", "0", "1/2"}, {"0", "1/2", "1/2", "0"}});
    // The generalized-cycle illustration shares this instance.
    f.matrices["Q_gc"] =
        matrix_from_strings(in, {{"2/5", "0", "0", "3/5"}, {"1/5", "2/5", "2/5", "0"}});
  } else if (id == "eg2") {
    f.summary = "per-type PS composed independently is decomposable but dominated";
    f.instance = detail::two_by_two_instance();
    const Instance& in = f.instance;
    std::vector<AgentPreference> prefs;
    prefs.push_back(linear_agent({bid(in, {"1_F", "1_B"}), bid(in, {"1_F", "2_B"}),
                                  bid(in, {"2_F", "1_B"}), bid(in, {"2_F", "2_B"})},
                                 in));
    prefs.push_back(linear_agent({bid(in, {"1_F", "1_B"}), bid(in, {"2_F", "1_B"}),
                                  bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "2_B"})},
                                 in));
    f.profile = make_profile(std::move(prefs), in);
    f.matrices["Q"] =
        matrix_from_strings(in, {{"1/4", "1/4", "1/4", "1/4"}, {"1/4", "1/4", "1/4", "1/4"}});
    f.matrices["Qprime"] =
        matrix_from_strings(in, {{"1/4", "1/2", "0", "1/4"}, {"1/4", "0", "1/2", "1/4"}});
  } else if (id == "eg3" || id == "rm2" || id == "rm3") {
    f.summary = id == "eg3"   ? "three-agent lexicographic instance and its phase-per-type run"
                : id == "rm2" ? "the phase-per-type output is lexicographically dominated"
                              : "bundle-eating output with thirds and twelfths is not decomposable";
    f.instance = detail::three_by_two_instance();
    const Instance& in = f.instance;
    std::vector<AgentPreference> prefs;
    prefs.push_back(lexicographic_agent(detail::lex_pref({0, 1}, {{0, 1, 2}, {0, 1, 2}}), in));
    prefs.push_back(lexicographic_agent(detail::lex_pref({0, 1}, {{0, 1, 2}, {0, 2, 1}}), in));
    prefs.push_back(lexicographic_agent(detail::lex_pref({1, 0}, {{0, 1, 2}, {1, 2, 0}}), in));
    f.profile = make_profile(std::move(prefs), in);
    // Columns: 1_F1_B 1_F2_B 1_F3_B 2_F1_B 2_F2_B 2_F3_B 3_F1_B 3_F2_B 3_F3_B
    f.matrices["P_lexips"] = matrix_from_strings(
        in, {{"1/4", "0", "1/4", "1/4", "0", "1/4", "0", "0", "0"},
             {"1/4", "0", "1/4", "1/4", "0", "1/4", "0", "0", "0"},
             {"0", "0", "0", "0", "0", "0", "0", "1", "0"}});
    f.matrices["P_mps"] = matrix_from_strings(
        in, {{"1/3", "0", "0", "1/6", "1/6", "0", "0", "1/12", "1/4"},
             {"1/3", "0", "0", "1/6", "0", "1/6", "0", "0", "1/3"},
             {"0", "1/3", "0", "0", "1/3", "0", "0", "1/12", "1/4"}});
    // The allocation that lexicographically dominates agent 1's quarters row.
    std::vector<Rat> q(in.num_bundles(), Rat(0));
    q[bid(in, {"1_F", "1_B"})] = Rat(1, 2);
    q[bid(in, {"2_F", "3_B"})] = Rat(1, 2);
    f.rows["q_rm2"] = std::move(q);
  } else if (id == "rm4") {
    f.summary = "a lexicographic agent gains under LexiPS by lying about her importance order";
    f.instance = make_instance(
        2, {"F", "B", "T"}, {{"1_F", "2_F"}, {"1_B", "2_B"}, {"1_T", "2_T"}});
    const Instance& in = f.instance;
    std::vector<AgentPreference> prefs;
    prefs.push_back(lexicographic_agent(detail::lex_pref({0, 1, 2}, {{0, 1}, {0, 1}, {0, 1}}), in));
    prefs.push_back(lexicographic_agent(detail::lex_pref({2, 0, 1}, {{0, 1}, {0, 1}, {0, 1}}), in));
    f.profile = make_profile(std::move(prefs), in);
    FractionalAssignment P(2, in.num_bundles());
    P.at(0, bid(in, {"1_F", "1_B", "2_T"})) = 1;
    P.at(1, bid(in, {"2_F", "2_B", "1_T"})) = 1;
    f.matrices["P"] = P;
    FractionalAssignment Pp(2, in.num_bundles());
    Pp.at(0, bid(in, {"1_F", "1_B", "2_T"})) = Rat(1, 2);
    Pp.at(0, bid(in, {"2_F", "1_B", "2_T"})) = Rat(1, 2);
    Pp.at(1, bid(in, {"1_F", "2_B", "1_T"})) = Rat(1, 2);
    Pp.at(1, bid(in, {"2_F", "2_B", "1_T"})) = Rat(1, 2);
    f.matrices["Pprime"] = Pp;
  } else if (id == "rm5") {
    f.summary = "an sd-efficient assignment that still admits a generalized cycle";
    f.instance = detail::two_by_two_instance();
    const Instance& in = f.instance;
    std::vector<AgentPreference> prefs;
    auto ranking = {bid(in, {"1_F", "1_B"}), bid(in, {"1_F", "2_B"}), bid(in, {"2_F", "1_B"}),
                    bid(in, {"2_F", "2_B"})};
    prefs.push_back(linear_agent(ranking, in));
    prefs.push_back(linear_agent(ranking, in));
    f.profile = make_profile(std::move(prefs), in);
    f.matrices["P"] = matrix_from_strings(in, {{"1/2", "0", "0", "1/2"}, {"0", "1/2", "1/2", "0"}});
    f.matrices["uniform"] =
        matrix_from_strings(in, {{"0", "1/2", "1/2", "0"}, {"0", "1/2", "1/2", "0"}});
  } else if (id == "rm6") {
    f.summary = "a linear agent gains under the bundle-eating mechanism by misreporting";
    f.instance = detail::two_by_two_instance();
    const Instance& in = f.instance;
    std::vector<AgentPreference> prefs;
    prefs.push_back(linear_agent({bid(in, {"1_F", "2_B"}), bid(in, {"1_F", "1_B"}),
                                  bid(in, {"2_F", "1_B"}), bid(in, {"2_F", "2_B"})},
                                 in));
    prefs.push_back(linear_agent({bid(in, {"1_F", "1_B"}), bid(in, {"2_F", "1_B"}),
                                  bid(in, {"2_F", "2_B"}), bid(in, {"1_F", "2_B"})},
                                 in));
    f.profile = make_profile(std::move(prefs), in);
    f.matrices["P"] = matrix_from_strings(in, {{"0", "1/2", "1/4", "1/4"}, {"1/2", "0", "1/4", "1/4"}});
    f.matrices["Pprime"] =
        matrix_from_strings(in, {{"0", "1/2", "1/2", "0"}, {"1/2", "0", "0", "1/2"}});
  } else if (id == "a1") {
    f.summary = "conditional-preference case analysis: no assignment is both weakly "
                "efficient and weakly envy-free";
    f.instance = detail::two_by_two_instance();
    const Instance& in = f.instance;
    std::vector<AgentPreference> prefs;
    prefs.push_back(linear_agent({bid(in, {"1_F", "1_B"}), bid(in, {"1_F", "2_B"}),
                                  bid(in, {"2_F", "2_B"}), bid(in, {"2_F", "1_B"})},
                                 in));
    prefs.push_back(linear_agent({bid(in, {"1_F", "2_B"}), bid(in, {"1_F", "1_B"}),
                                  bid(in, {"2_F", "1_B"}), bid(in, {"2_F", "2_B"})},
                                 in));
    f.profile = make_profile(std::move(prefs), in);
  } else {
    throw PreconditionError("unknown fixture '" + id + "'");
  }
  return f;
}

}  // namespace mtra
