#pragma once

#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mtra/assignment.hpp"
#include "mtra/mechanisms.hpp"
#include "mtra/model.hpp"
#include "mtra/rational.hpp"

namespace mtra {

// Insertion-ordered JSON keeps every report byte-stable.
using Json = nlohmann::ordered_json;

inline Json parse_json_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError(ParseCode::malformed_json, "input is not valid JSON");
  return j;
}

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(ParseCode::missing_field, std::string("expected field '") + key + "'");
  return j.at(key);
}

inline std::string string_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string())
    throw ParseError(ParseCode::missing_field, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

struct ParsedInstance {
  Instance instance;
  Profile profile;
  bool all_lexicographic = false;  // every agent declared lexicographic
};

// Instance file schema:
//   {"types": [{"name": str, "items": [str]}],
//    "agents": [{"name": str, "preference":
//        {"kind": "linear", "ranking": [[item, ...], ...]}
//      | {"kind": "lexicographic", "importance": [type, ...],
//         "orders": {type: [item, ...]}}}]}
inline ParsedInstance parse_instance_json(const Json& root) {
  const Json& types = detail::field(root, "types");
  const Json& agents = detail::field(root, "agents");
  if (!types.is_array() || types.empty())
    throw ParseError(ParseCode::missing_field, "'types' must be a nonempty array");
  if (!agents.is_array() || agents.empty())
    throw ParseError(ParseCode::missing_field, "'agents' must be a nonempty array");
  const int n = static_cast<int>(agents.size());
  std::vector<std::string> type_names;
  std::vector<std::vector<std::string>> item_names;
  for (const Json& t : types) {
    type_names.push_back(detail::string_field(t, "name"));
    const Json& items = detail::field(t, "items");
    std::vector<std::string> row;
    for (const Json& it : items) row.push_back(it.get<std::string>());
    item_names.push_back(std::move(row));
  }
  std::vector<std::string> agent_names;
  for (int j = 0; j < n; ++j) {
    const Json& a = agents[j];
    agent_names.push_back(a.contains("name") ? a.at("name").get<std::string>()
                                             : std::to_string(j + 1));
  }
  Instance inst = make_instance(n, std::move(type_names), std::move(item_names), agent_names);
  const int p = inst.num_types();

  auto type_index = [&](const std::string& name) {
    for (int i = 0; i < p; ++i)
      if (inst.type_names[i] == name) return i;
    throw ParseError(ParseCode::unknown_type, "unknown type '" + name + "'");
  };
  auto bundle_from_json = [&](const Json& arr) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != p)
      throw ParseError(ParseCode::wrong_arity,
                       "a bundle must list exactly one item of each of the " + std::to_string(p) +
                           " types");
    std::vector<int> item_by_type(p, -1);
    for (const Json& it : arr) {
      const std::string name = it.get<std::string>();
      auto hit = inst.find_item(name);
      if (!hit) throw ParseError(ParseCode::unknown_item, "unknown item '" + name + "'");
      if (item_by_type[hit->first] != -1)
        throw ParseError(ParseCode::wrong_arity,
                         "bundle lists two items of type '" + inst.type_names[hit->first] + "'");
      item_by_type[hit->first] = hit->second;
    }
    return inst.bundle_of(item_by_type);
  };

  std::vector<AgentPreference> prefs;
  bool all_lex = true;
  for (int j = 0; j < n; ++j) {
    const Json& pref = detail::field(agents[j], "preference");
    const std::string kind = detail::string_field(pref, "kind");
    if (kind == "linear") {
      all_lex = false;
      const Json& ranking = detail::field(pref, "ranking");
      std::vector<BundleId> order;
      for (const Json& b : ranking) order.push_back(bundle_from_json(b));
      prefs.push_back(linear_agent(std::move(order), inst));
    } else if (kind == "lexicographic") {
      const Json& importance = detail::field(pref, "importance");
      const Json& orders = detail::field(pref, "orders");
      LexicographicPreference q;
      for (const Json& t : importance) q.importance.push_back(type_index(t.get<std::string>()));
      if (static_cast<int>(q.importance.size()) != p)
        throw ParseError(ParseCode::wrong_arity, "importance order must list every type once");
      q.per_type.assign(p, {});
      for (int i = 0; i < p; ++i) {
        const std::string& tname = inst.type_names[i];
        if (!orders.contains(tname))
          throw ParseError(ParseCode::incomplete_ranking,
                           "missing item order for type '" + tname + "'");
        for (const Json& it : orders.at(tname)) {
          const std::string name = it.get<std::string>();
          auto hit = inst.find_item(name);
          if (!hit || hit->first != i)
            throw ParseError(ParseCode::unknown_item,
                             "'" + name + "' is not an item of type '" + tname + "'");
          q.per_type[i].push_back(hit->second);
        }
      }
      prefs.push_back(lexicographic_agent(std::move(q), inst));
    } else {
      throw ParseError(ParseCode::missing_field, "preference kind must be linear or lexicographic");
    }
  }
  Profile profile = make_profile(std::move(prefs), inst);
  return {std::move(inst), std::move(profile), all_lex};
}

inline ParsedInstance parse_instance_text(const std::string& text) {
  try {
    return parse_instance_json(parse_json_text(text));
  } catch (const Json::exception& e) {
    throw ParseError(ParseCode::malformed_json, e.what());
  }
}

inline Json preference_to_json(const Instance& inst, const AgentPreference& ap) {
  Json pref;
  if (ap.lex) {
    pref["kind"] = "lexicographic";
    Json imp = Json::array();
    for (int i : ap.lex->importance) imp.push_back(inst.type_names[i]);
    pref["importance"] = std::move(imp);
    Json orders;
    for (int i = 0; i < inst.num_types(); ++i) {
      Json row = Json::array();
      for (int k : ap.lex->per_type[i]) row.push_back(inst.item_names[i][k]);
      orders[inst.type_names[i]] = std::move(row);
    }
    pref["orders"] = std::move(orders);
  } else {
    pref["kind"] = "linear";
    Json ranking = Json::array();
    for (BundleId b : ap.linear.ranking) ranking.push_back(inst.bundle_item_names(b));
    pref["ranking"] = std::move(ranking);
  }
  return pref;
}

inline Json instance_to_json(const Instance& inst, const Profile& profile) {
  Json root;
  root["types"] = Json::array();
  for (int i = 0; i < inst.num_types(); ++i) {
    Json t;
    t["name"] = inst.type_names[i];
    t["items"] = inst.item_names[i];
    root["types"].push_back(std::move(t));
  }
  root["agents"] = Json::array();
  for (int j = 0; j < inst.n; ++j) {
    Json a;
    a["name"] = inst.agent_names[j];
    a["preference"] = preference_to_json(inst, profile.agents[j]);
    root["agents"].push_back(std::move(a));
  }
  return root;
}

// Assignment files carry exact "num/den" strings in canonical bundle order.
inline Json assignment_to_json(const FractionalAssignment& P) {
  Json rows = Json::array();
  for (int j = 0; j < P.n; ++j) {
    Json row = Json::array();
    for (int b = 0; b < P.cols; ++b) row.push_back(rat_to_string(P.at(j, b)));
    rows.push_back(std::move(row));
  }
  Json root;
  root["matrix"] = std::move(rows);
  return root;
}

inline FractionalAssignment assignment_from_json(const Json& root, const Instance& inst) {
  const Json& matrix = detail::field(root, "matrix");
  if (!matrix.is_array() || static_cast<int>(matrix.size()) != inst.n)
    throw ParseError(ParseCode::wrong_arity,
                     "matrix must have one row per agent (" + std::to_string(inst.n) + ")");
  FractionalAssignment P(inst.n, inst.num_bundles());
  try {
    for (int j = 0; j < inst.n; ++j) {
      const Json& row = matrix[j];
      if (!row.is_array() || static_cast<int>(row.size()) != inst.num_bundles())
        throw ParseError(ParseCode::wrong_arity,
                         "row " + std::to_string(j + 1) + " must list " +
                             std::to_string(inst.num_bundles()) + " bundle shares");
      for (int b = 0; b < inst.num_bundles(); ++b)
        P.at(j, b) = rat_from_string(row[b].get<std::string>());
    }
  } catch (const Json::exception& e) {
    throw ParseError(ParseCode::malformed_json, e.what());
  }
  return P;
}

// Speeds file: {"speeds": [{"breakpoints": ["0", ...], "rates": [...]}]}.
inline EatingSchedule schedule_from_json(const Json& root, int n) {
  const Json& speeds = detail::field(root, "speeds");
  if (!speeds.is_array() || static_cast<int>(speeds.size()) != n)
    throw ParseError(ParseCode::bad_schedule,
                     "'speeds' must list one schedule per agent (" + std::to_string(n) + ")");
  EatingSchedule sched;
  try {
    for (const Json& a : speeds) {
      EatingSchedule::AgentSchedule as;
      for (const Json& b : detail::field(a, "breakpoints"))
        as.breakpoints.push_back(rat_from_string(b.get<std::string>()));
      for (const Json& r : detail::field(a, "rates"))
        as.rates.push_back(rat_from_string(r.get<std::string>()));
      sched.agents.push_back(std::move(as));
    }
  } catch (const Json::exception& e) {
    throw ParseError(ParseCode::bad_schedule, e.what());
  }
  return sched;
}

inline Json schedule_to_json(const EatingSchedule& sched) {
  Json arr = Json::array();
  for (const auto& a : sched.agents) {
    Json e;
    Json bps = Json::array();
    for (const auto& b : a.breakpoints) bps.push_back(rat_to_string(b));
    Json rates = Json::array();
    for (const auto& r : a.rates) rates.push_back(rat_to_string(r));
    e["breakpoints"] = std::move(bps);
    e["rates"] = std::move(rates);
    arr.push_back(std::move(e));
  }
  Json root;
  root["speeds"] = std::move(arr);
  return root;
}

inline Json bundle_labels_json(const Instance& inst) {
  Json arr = Json::array();
  for (BundleId b = 0; b < inst.num_bundles(); ++b) arr.push_back(inst.bundle_item_names(b));
  return arr;
}

// Human-readable projection of an assignment matrix.
inline std::string format_assignment_text(const FractionalAssignment& P, const Instance& inst) {
  std::vector<std::vector<std::string>> cells(P.n + 1);
  cells[0].push_back("agent");
  for (BundleId b = 0; b < P.cols; ++b) cells[0].push_back(inst.bundle_label(b));
  for (int j = 0; j < P.n; ++j) {
    cells[j + 1].push_back(inst.agent_names[j]);
    for (int b = 0; b < P.cols; ++b) cells[j + 1].push_back(rat_to_string(P.at(j, b)));
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out += row[c];
      out.append(width[c] - row[c].size(), ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace mtra
