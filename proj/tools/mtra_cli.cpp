#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtra/analysis.hpp"
#include "mtra/fixtures.hpp"
#include "mtra/io.hpp"
#include "mtra/mechanisms.hpp"
#include "mtra/model.hpp"
#include "mtra/oracles.hpp"
#include "mtra/random_gen.hpp"
#include "mtra/scenarios.hpp"

namespace {

using namespace mtra;

// Exit codes: 0 success / verdict true, 1 verdict false or violations found,
// 2 usage or input errors, 3 invalid assignment matrix.
constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvalidMatrix = 3;

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw ParseError(ParseCode::missing_field, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Options {
  std::string format = "text";
  std::string instance_path;
  long cap = 0;  // 0 keeps the defaults
  unsigned long long seed = 1;

  OracleCaps caps() const {
    OracleCaps c;
    if (cap > 0) c.set_all(cap);
    return c;
  }
};

ParsedInstance load_instance(const Options& opt) {
  if (opt.instance_path.empty())
    throw ParseError(ParseCode::missing_field, "--instance is required for this command");
  return parse_instance_text(read_file(opt.instance_path));
}

FractionalAssignment load_assignment(const std::string& path, const Instance& inst) {
  return assignment_from_json(parse_json_text(read_file(path)), inst);
}

int emit(const Options& opt, Json report, const std::string& text, int exit_code) {
  report["exit"] = exit_code;
  if (opt.format == "json")
    std::cout << report.dump(2) << "\n";
  else
    std::cout << text;
  return exit_code;
}

Json matrix_report(const Instance& inst, const FractionalAssignment& P) {
  Json j;
  j["agents"] = inst.agent_names;
  j["bundles"] = bundle_labels_json(inst);
  j["matrix"] = assignment_to_json(P)["matrix"];
  return j;
}

int agent_index(const Instance& inst, const std::string& name) {
  for (int j = 0; j < inst.n; ++j)
    if (inst.agent_names[j] == name) return j;
  throw ParseError(ParseCode::missing_field, "no agent named '" + name + "'");
}

int cmd_solve(const Options& opt, const std::string& mechanism, const std::string& speeds_path) {
  auto parsed = load_instance(opt);
  FractionalAssignment P;
  if (mechanism == "mps") {
    P = mps(parsed.instance, parsed.profile);
  } else if (mechanism == "lexips") {
    P = lexips(parsed.instance, parsed.profile);
  } else if (mechanism == "eating") {
    if (speeds_path.empty())
      throw ParseError(ParseCode::missing_field, "--speeds is required for the eating mechanism");
    auto sched = schedule_from_json(parse_json_text(read_file(speeds_path)), parsed.instance.n);
    P = eating(parsed.instance, parsed.profile, sched);
  } else {
    throw ParseError(ParseCode::missing_field, "unknown mechanism '" + mechanism + "'");
  }
  Json j;
  j["command"] = "solve";
  j["mechanism"] = mechanism;
  j.update(matrix_report(parsed.instance, P));
  return emit(opt, j, format_assignment_text(P, parsed.instance), kExitTrue);
}

Json tuple_json(const Instance& inst, const ImprovableTuple& t) {
  Json j;
  j["agent"] = inst.agent_names[t.witness_agent];
  j["better"] = inst.bundle_item_names(t.better);
  j["worse"] = inst.bundle_item_names(t.worse);
  return j;
}

Json decomposition_json(const Instance& inst, const Decomposition& dec) {
  Json terms = Json::array();
  for (const auto& t : dec.terms) {
    Json e;
    e["weight"] = rat_to_string(t.weight);
    Json bundles = Json::array();
    for (int j = 0; j < inst.n; ++j) bundles.push_back(inst.bundle_item_names(t.assignment.bundle_of[j]));
    e["bundles"] = std::move(bundles);
    terms.push_back(std::move(e));
  }
  Json j;
  j["terms"] = std::move(terms);
  return j;
}

int cmd_check(const Options& opt, const std::string& property, const std::string& assignment_path) {
  auto parsed = load_instance(opt);
  const Instance& inst = parsed.instance;
  const Profile& profile = parsed.profile;
  FractionalAssignment P = load_assignment(assignment_path, inst);
  Json j;
  j["command"] = "check";
  j["property"] = property;
  auto report = validate(P, inst);
  if (!report.ok()) {
    Json errs = Json::array();
    std::string text = "invalid assignment:\n";
    for (const auto& v : report.violations) {
      errs.push_back(v.describe(inst));
      text += "  " + v.describe(inst) + "\n";
    }
    j["invalid"] = std::move(errs);
    return emit(opt, j, text, kExitInvalidMatrix);
  }
  bool verdict = false;
  Json witness;
  std::string detail;
  if (property == "sd-efficient") {
    auto r = is_sd_efficient(P, inst, profile);
    verdict = r.efficient;
    if (r.dominating) witness["dominating"] = matrix_report(inst, *r.dominating);
  } else if (property == "lexi-efficient") {
    auto r = is_lexi_efficient(P, inst, profile, opt.caps());
    verdict = r.efficient;
    if (r.dominating) witness["dominating"] = matrix_report(inst, *r.dominating);
  } else if (property == "sd-envyfree") {
    auto r = is_sd_envy_free(P, inst, profile);
    verdict = r.envy_free;
    if (r.violating_pair) {
      witness["envious"] = inst.agent_names[r.violating_pair->first];
      witness["envied"] = inst.agent_names[r.violating_pair->second];
    }
  } else if (property == "sd-weak-efficient") {
    auto r = is_sd_weak_efficient(P, inst, profile);
    verdict = r.efficient;
    if (r.pair) {
      witness["pair"] = {inst.agent_names[r.pair->first], inst.agent_names[r.pair->second]};
      if (r.dominating) witness["dominating"] = matrix_report(inst, *r.dominating);
    }
  } else if (property == "sd-weak-envyfree") {
    auto r = is_sd_weak_envy_free(P, inst, profile);
    verdict = r.envy_free;
    if (r.pair) {
      witness["envious"] = inst.agent_names[r.pair->first];
      witness["envied"] = inst.agent_names[r.pair->second];
    }
  } else if (property == "iof") {
    auto r = is_itemwise_ordinal_fair(P, inst, profile);
    verdict = r.fair;
    Json viols = Json::array();
    for (const auto& [agent, bundle] : r.violations) {
      Json e;
      e["agent"] = inst.agent_names[agent];
      e["bundle"] = inst.bundle_item_names(bundle);
      viols.push_back(std::move(e));
    }
    if (!r.fair) witness["violations"] = std::move(viols);
  } else if (property == "no-generalized-cycle") {
    auto r = has_generalized_cycle(P, inst, profile);
    verdict = !r.has_value();
    if (r) {
      Json tuples = Json::array();
      for (const auto& t : r->tuples) tuples.push_back(tuple_json(inst, t));
      witness["cycle"] = std::move(tuples);
    }
  } else if (property == "decomposable") {
    auto r = is_decomposable(P, inst, opt.caps());
    verdict = r.has_value();
    if (r) witness["decomposition"] = decomposition_json(inst, *r);
  } else {
    throw ParseError(ParseCode::missing_field, "unknown property '" + property + "'");
  }
  j["verdict"] = verdict;
  if (!witness.empty()) j["witness"] = std::move(witness);
  return emit(opt, j,
              property + ": " + (verdict ? "true" : "false") + "\n" +
                  (j.contains("witness") ? "witness: " + j["witness"].dump() + "\n" : ""),
              verdict ? kExitTrue : kExitFalse);
}

int cmd_audit(const Options& opt, const std::string& mechanism, const std::string& agent,
              const std::string& cls_name) {
  auto parsed = load_instance(opt);
  const Instance& inst = parsed.instance;
  Mechanism mech;
  if (mechanism == "mps")
    mech = Mechanism::mps;
  else if (mechanism == "lexips")
    mech = Mechanism::lexips;
  else
    throw ParseError(ParseCode::missing_field, "unknown mechanism '" + mechanism + "'");
  MisreportClass cls;
  if (cls_name == "all-linear")
    cls = MisreportClass::all_linear;
  else if (cls_name == "lexicographic")
    cls = MisreportClass::lexicographic;
  else if (cls_name == "lexicographic-fixed-importance")
    cls = MisreportClass::lexicographic_fixed_importance;
  else
    throw ParseError(ParseCode::missing_field, "unknown misreport class '" + cls_name + "'");
  std::vector<int> agents;
  if (agent == "all")
    for (int a = 0; a < inst.n; ++a) agents.push_back(a);
  else
    agents.push_back(agent_index(inst, agent));
  Json j;
  j["command"] = "audit";
  j["mechanism"] = mechanism;
  j["class"] = cls_name;
  Json audits = Json::array();
  std::string text;
  long total_violations = 0;
  for (int a : agents) {
    auto rep = audit_strategyproofness(mech, inst, parsed.profile, a, cls, opt.caps());
    total_violations += static_cast<long>(rep.violations.size());
    Json ja;
    ja["agent"] = inst.agent_names[a];
    ja["misreports_checked"] = rep.misreports_checked;
    Json viols = Json::array();
    for (const auto& v : rep.violations) {
      Json jv;
      jv["misreport"] = preference_to_json(inst, v.misreport);
      jv["truthful"] = assignment_to_json(v.truthful)["matrix"];
      jv["manipulated"] = assignment_to_json(v.manipulated)["matrix"];
      viols.push_back(std::move(jv));
    }
    ja["violations"] = std::move(viols);
    audits.push_back(std::move(ja));
    text += "agent " + inst.agent_names[a] + ": " + std::to_string(rep.violations.size()) +
            " violation(s) in " + std::to_string(rep.misreports_checked) + " misreports\n";
  }
  j["audits"] = std::move(audits);
  return emit(opt, j, text, total_violations == 0 ? kExitTrue : kExitFalse);
}

int cmd_decompose(const Options& opt, const std::string& assignment_path, const std::string& mode) {
  auto parsed = load_instance(opt);
  const Instance& inst = parsed.instance;
  FractionalAssignment P = load_assignment(assignment_path, inst);
  auto report = validate(P, inst);
  if (!report.ok()) {
    std::string text = "invalid assignment\n";
    Json j;
    j["command"] = "decompose";
    Json errs = Json::array();
    for (const auto& v : report.violations) errs.push_back(v.describe(inst));
    j["invalid"] = std::move(errs);
    return emit(opt, j, text, kExitInvalidMatrix);
  }
  Json j;
  j["command"] = "decompose";
  j["mode"] = mode;
  if (mode == "bundle") {
    auto dec = is_decomposable(P, inst, opt.caps());
    j["decomposable"] = dec.has_value();
    if (dec) j["decomposition"] = decomposition_json(inst, *dec);
    return emit(opt, j,
                dec ? "decomposable with " + std::to_string(dec->terms.size()) + " term(s)\n"
                    : "not decomposable\n",
                dec ? kExitTrue : kExitFalse);
  }
  if (mode != "per-type")
    throw ParseError(ParseCode::missing_field, "unknown mode '" + mode + "'");
  Json per_type = Json::array();
  std::vector<SingleTypeDecomposition> decs;
  std::string text;
  for (int i = 0; i < inst.num_types(); ++i) {
    auto dec = birkhoff_decompose(type_marginal(P, inst, i));
    Json jt;
    jt["type"] = inst.type_names[i];
    Json terms = Json::array();
    for (const auto& t : dec.terms) {
      Json e;
      e["weight"] = rat_to_string(t.weight);
      Json items = Json::array();
      for (int o : t.item_of_agent) items.push_back(inst.item_names[i][o]);
      e["items"] = std::move(items);
      terms.push_back(std::move(e));
    }
    jt["terms"] = std::move(terms);
    per_type.push_back(std::move(jt));
    text += "type " + inst.type_names[i] + ": " + std::to_string(dec.terms.size()) + " term(s)\n";
    decs.push_back(std::move(dec));
  }
  j["per_type"] = std::move(per_type);
  auto prod = product_decomposition(decs, inst);
  j["product"] = decomposition_json(inst, prod);
  j["product_recomposes_marginals"] = [&] {
    std::vector<SingleTypeAssignment> marg;
    for (int i = 0; i < inst.num_types(); ++i) marg.push_back(type_marginal(P, inst, i));
    return recompose(prod, inst) == product_compose(marg, inst);
  }();
  text += "product decomposition: " + std::to_string(prod.terms.size()) + " term(s)\n";
  return emit(opt, j, text, kExitTrue);
}

int cmd_leximin(const Options& opt, const std::string& assignment_path,
                const std::string& compare_path, bool optimal) {
  auto parsed = load_instance(opt);
  const Instance& inst = parsed.instance;
  Json j;
  j["command"] = "leximin";
  if (optimal) {
    auto P = leximin_optimal_assignment(inst, parsed.profile, opt.caps());
    j["optimal"] = matrix_report(inst, P);
    // The sorted cumulative vector rides along so ties are visible.
    auto u = leximin_vector(P, inst, parsed.profile);
    Json sorted = Json::array();
    for (const auto& r : u.sorted) sorted.push_back(rat_to_string(r));
    j["sorted"] = std::move(sorted);
    std::string text = format_assignment_text(P, inst) + "sorted cumulative vector:";
    for (const auto& r : u.sorted) text += " " + rat_to_string(r);
    return emit(opt, j, text + "\n", kExitTrue);
  }
  if (assignment_path.empty())
    throw ParseError(ParseCode::missing_field, "leximin needs --assignment or --optimal");
  auto P = load_assignment(assignment_path, inst);
  auto u = leximin_vector(P, inst, parsed.profile);
  Json sorted = Json::array();
  for (const auto& r : u.sorted) sorted.push_back(rat_to_string(r));
  j["sorted"] = std::move(sorted);
  std::string text = "sorted cumulative vector:";
  for (const auto& r : u.sorted) text += " " + rat_to_string(r);
  text += "\n";
  if (!compare_path.empty()) {
    auto Q = load_assignment(compare_path, inst);
    auto v = leximin_vector(Q, inst, parsed.profile);
    auto ord = leximin_compare(u, v);
    const char* s = ord == Ordering::greater ? "greater" : ord == Ordering::less ? "less" : "equal";
    j["comparison"] = s;
    text += std::string("comparison: ") + s + "\n";
  }
  return emit(opt, j, text, kExitTrue);
}

int cmd_paper(const Options& opt, const std::string& fixture) {
  std::vector<std::string> ids;
  if (fixture == "all")
    ids = fixture_ids();
  else
    ids.push_back(fixture);
  Json j;
  j["command"] = "paper";
  Json fixtures = Json::array();
  std::string text;
  bool all_pass = true;
  for (const auto& id : ids) {
    auto rep = run_fixture_scenario(id, opt.caps());
    Json jf;
    jf["fixture"] = id;
    Json assertions = Json::array();
    text += "fixture " + id + ":\n";
    for (const auto& a : rep.assertions) {
      Json ja;
      ja["name"] = a.name;
      ja["pass"] = a.pass;
      assertions.push_back(std::move(ja));
      text += std::string("  [") + (a.pass ? "pass" : "FAIL") + "] " + a.name + "\n";
    }
    jf["assertions"] = std::move(assertions);
    jf["pass"] = rep.all_pass();
    all_pass = all_pass && rep.all_pass();
    fixtures.push_back(std::move(jf));
  }
  j["fixtures"] = std::move(fixtures);
  j["pass"] = all_pass;
  return emit(opt, j, text, all_pass ? kExitTrue : kExitFalse);
}

int cmd_gen(const Options& opt, int agents, int types, bool lexicographic) {
  Rng rng(opt.seed);
  Instance inst = random_instance(rng, agents, types);
  Profile profile =
      lexicographic ? random_lexicographic_profile(rng, inst) : random_linear_profile(rng, inst);
  std::cout << instance_to_json(inst, profile).dump(2) << "\n";
  return kExitTrue;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact mechanisms and checkers for multi-type resource allocation"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "Output format (text|json)")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_option("--instance", opt.instance_path, "Instance JSON file (or - for stdin)");
  app.add_option("--cap", opt.cap, "Override every oracle enumeration cap");
  app.add_option("--seed", opt.seed, "Seed for random-instance generation");

  auto* solve = app.add_subcommand("solve", "Run a mechanism on an instance");
  std::string mechanism, speeds_path;
  solve->add_option("--mechanism", mechanism, "mps|lexips|eating")->required();
  solve->add_option("--speeds", speeds_path, "Speeds JSON file for the eating mechanism");

  auto* check = app.add_subcommand("check", "Check a property of an assignment");
  std::string property, assignment_path;
  check->add_option("--property", property,
                    "sd-efficient|lexi-efficient|sd-envyfree|sd-weak-efficient|"
                    "sd-weak-envyfree|iof|no-generalized-cycle|decomposable")
      ->required();
  check->add_option("--assignment", assignment_path, "Assignment JSON file")->required();

  auto* audit = app.add_subcommand("audit", "Search for profitable misreports");
  std::string audit_mechanism, audit_agent = "all", audit_class;
  audit->add_option("--mechanism", audit_mechanism, "mps|lexips")->required();
  audit->add_option("--agent", audit_agent, "Agent name, or 'all'");
  audit->add_option("--class", audit_class,
                    "all-linear|lexicographic|lexicographic-fixed-importance")
      ->required();

  auto* decompose = app.add_subcommand("decompose", "Decompose an assignment into lotteries");
  std::string dec_assignment, dec_mode = "bundle";
  decompose->add_option("--assignment", dec_assignment, "Assignment JSON file")->required();
  decompose->add_option("--mode", dec_mode, "bundle|per-type");

  auto* leximin = app.add_subcommand("leximin", "Cumulative-share vectors and leximin optimum");
  std::string lex_assignment, lex_compare;
  bool lex_optimal = false;
  leximin->add_option("--assignment", lex_assignment, "Assignment JSON file");
  leximin->add_option("--compare", lex_compare, "Second assignment to compare against");
  leximin->add_flag("--optimal", lex_optimal, "Compute the leximin-optimal assignment");

  auto* paper = app.add_subcommand("paper", "Run a bundled worked-example scenario");
  std::string fixture;
  paper->add_option("--fixture", fixture, "thm1|eg2|eg3|eg4|rm2|rm3|rm4|rm5|rm6|a1|all")
      ->required();

  auto* gen = app.add_subcommand("gen", "Emit a random instance file");
  int gen_agents = 3, gen_types = 2;
  bool gen_lex = false;
  gen->add_option("--agents", gen_agents, "Number of agents (and items per type)");
  gen->add_option("--types", gen_types, "Number of item types");
  gen->add_flag("--lexicographic", gen_lex, "Generate lexicographic preferences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt, mechanism, speeds_path);
    if (check->parsed()) return cmd_check(opt, property, assignment_path);
    if (audit->parsed()) return cmd_audit(opt, audit_mechanism, audit_agent, audit_class);
    if (decompose->parsed()) return cmd_decompose(opt, dec_assignment, dec_mode);
    if (leximin->parsed()) return cmd_leximin(opt, lex_assignment, lex_compare, lex_optimal);
    if (paper->parsed()) return cmd_paper(opt, fixture);
    if (gen->parsed()) return cmd_gen(opt, gen_agents, gen_types, gen_lex);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
