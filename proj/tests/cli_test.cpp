#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mtra/fixtures.hpp"
#include "mtra/io.hpp"
#include "mtra/mechanisms.hpp"

using namespace mtra;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(MTRA_CLI_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "mtra_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& content) {
  auto path = scratch_dir() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string fixture_instance_file(const std::string& id) {
  Fixture f = get_fixture(id);
  return write_scratch(id + "_instance.json", instance_to_json(f.instance, f.profile).dump(2));
}

std::string matrix_file(const std::string& id, const std::string& key) {
  Fixture f = get_fixture(id);
  return write_scratch(id + "_" + key + ".json", assignment_to_json(f.matrices.at(key)).dump(2));
}

}  // namespace

TEST_CASE("solve prints exact matrices and honors the format flag") {
  auto inst = fixture_instance_file("eg4");
  auto res = run_cli("--instance " + inst + " --format json solve --mechanism mps");
  CHECK(res.exit_code == 0);
  auto j = parse_json_text(res.out);
  Fixture eg4 = get_fixture("eg4");
  auto P = assignment_from_json(Json{{"matrix", j.at("matrix")}}, eg4.instance);
  CHECK(P == eg4.matrices.at("P"));

  auto text = run_cli("--instance " + inst + " solve --mechanism mps");
  CHECK(text.exit_code == 0);
  CHECK(text.out.find("1/2") != std::string::npos);
}

TEST_CASE("solve refuses the phase mechanism on non-lexicographic profiles") {
  auto inst = fixture_instance_file("eg4");
  CHECK(run_cli("--instance " + inst + " solve --mechanism lexips").exit_code == 2);
}

TEST_CASE("solve runs the eating mechanism from a speeds file") {
  auto inst = fixture_instance_file("eg4");
  EatingSchedule sched = uniform_schedule(2);
  auto speeds = write_scratch("speeds.json", schedule_to_json(sched).dump());
  auto res = run_cli("--instance " + inst + " --format json solve --mechanism eating --speeds " +
                     speeds);
  CHECK(res.exit_code == 0);
  Fixture eg4 = get_fixture("eg4");
  auto j = parse_json_text(res.out);
  auto P = assignment_from_json(Json{{"matrix", j.at("matrix")}}, eg4.instance);
  CHECK(P == eg4.matrices.at("P"));
  CHECK(run_cli("--instance " + inst + " solve --mechanism eating").exit_code == 2);
}

TEST_CASE("check reports verdicts through exit codes") {
  auto inst = fixture_instance_file("eg4");
  auto p_file = matrix_file("eg4", "P");
  auto gc_file = matrix_file("eg4", "Q_gc");
  CHECK(run_cli("--instance " + inst + " check --property decomposable --assignment " + p_file)
            .exit_code == 1);
  CHECK(run_cli("--instance " + inst + " check --property sd-envyfree --assignment " + p_file)
            .exit_code == 0);
  auto gc = run_cli("--instance " + inst +
                    " --format json check --property no-generalized-cycle --assignment " + gc_file);
  CHECK(gc.exit_code == 1);
  auto j = parse_json_text(gc.out);
  CHECK(j.at("witness").at("cycle").size() >= 3);
  CHECK(j.at("exit").get<int>() == gc.exit_code);

  auto rm3_inst = fixture_instance_file("rm3");
  auto rm3_file = matrix_file("rm3", "P_mps");
  CHECK(run_cli("--instance " + rm3_inst + " check --property iof --assignment " + rm3_file)
            .exit_code == 0);

  auto invalid = write_scratch("invalid.json",
                               R"({"matrix": [["1","0","0","1"],["0","0","0","0"]]})");
  CHECK(run_cli("--instance " + inst + " check --property iof --assignment " + invalid)
            .exit_code == 3);
}

TEST_CASE("audit exposes the worked manipulations") {
  auto rm6 = fixture_instance_file("rm6");
  auto res = run_cli("--instance " + rm6 + " --format json audit --mechanism mps --agent 1 "
                     "--class all-linear");
  CHECK(res.exit_code == 1);
  auto j = parse_json_text(res.out);
  CHECK(j.at("audits").at(0).at("violations").size() >= 1);

  auto rm4 = fixture_instance_file("rm4");
  CHECK(run_cli("--instance " + rm4 + " audit --mechanism lexips --agent 2 --class lexicographic")
            .exit_code == 1);

  auto eg3 = fixture_instance_file("eg3");
  CHECK(run_cli("--instance " + eg3 + " audit --mechanism lexips --agent all "
                "--class lexicographic-fixed-importance")
            .exit_code == 0);
}

TEST_CASE("decompose certifies lotteries in both modes") {
  auto eg2 = fixture_instance_file("eg2");
  auto q_file = matrix_file("eg2", "Q");
  auto res = run_cli("--instance " + eg2 + " --format json decompose --assignment " + q_file);
  CHECK(res.exit_code == 0);
  auto j = parse_json_text(res.out);
  CHECK(j.at("decomposable").get<bool>());

  auto per_type = run_cli("--instance " + eg2 + " --format json decompose --mode per-type "
                          "--assignment " + q_file);
  CHECK(per_type.exit_code == 0);
  auto jp = parse_json_text(per_type.out);
  CHECK(jp.at("product_recomposes_marginals").get<bool>());

  auto eg4 = fixture_instance_file("eg4");
  auto p_file = matrix_file("eg4", "P");
  CHECK(run_cli("--instance " + eg4 + " decompose --assignment " + p_file).exit_code == 1);
}

TEST_CASE("leximin prints vectors, comparisons, and the optimum") {
  auto eg4 = fixture_instance_file("eg4");
  auto p_file = matrix_file("eg4", "P");
  auto gc_file = matrix_file("eg4", "Q_gc");
  auto res = run_cli("--instance " + eg4 + " --format json leximin --assignment " + p_file +
                     " --compare " + gc_file);
  CHECK(res.exit_code == 0);
  auto j = parse_json_text(res.out);
  CHECK(j.at("comparison") == "greater");
  CHECK(j.at("sorted").at(0) == "1/2");

  auto opt = run_cli("--instance " + eg4 + " --format json leximin --optimal");
  CHECK(opt.exit_code == 0);
  Fixture f = get_fixture("eg4");
  auto jo = parse_json_text(opt.out);
  auto P = assignment_from_json(Json{{"matrix", jo.at("optimal").at("matrix")}}, f.instance);
  CHECK(P == f.matrices.at("P"));
  CHECK(jo.at("sorted").at(0) == "1/2");
  CHECK(jo.at("sorted").at(3) == "1");
}

TEST_CASE("paper scenarios run end to end") {
  CHECK(run_cli("paper --fixture rm3").exit_code == 0);
  CHECK(run_cli("paper --fixture rm5").exit_code == 0);
  CHECK(run_cli("paper --fixture a1").exit_code == 0);
  CHECK(run_cli("paper --fixture nope").exit_code == 2);
}

TEST_CASE("generated instances are reproducible and parse back") {
  auto a = run_cli("--seed 5 gen --agents 3 --types 2 --lexicographic");
  auto b = run_cli("--seed 5 gen --agents 3 --types 2 --lexicographic");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  auto parsed = parse_instance_text(a.out);
  CHECK(parsed.instance.n == 3);
  CHECK(parsed.all_lexicographic);
  auto c = run_cli("--seed 6 gen --agents 3 --types 2 --lexicographic");
  CHECK(a.out != c.out);
}

TEST_CASE("instances can be piped through stdin") {
  auto inst = fixture_instance_file("eg4");
  RunResult res;
  {
    std::string cmd = std::string("cat ") + inst + " | " + MTRA_CLI_BIN +
                      " --instance - --format json solve --mechanism mps 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    res.exit_code = WEXITSTATUS(pclose(pipe));
  }
  CHECK(res.exit_code == 0);
  Fixture eg4 = get_fixture("eg4");
  auto j = parse_json_text(res.out);
  CHECK(assignment_from_json(Json{{"matrix", j.at("matrix")}}, eg4.instance) ==
        eg4.matrices.at("P"));
}

TEST_CASE("usage errors exit with code two") {
  CHECK(run_cli("solve --mechanism mps").exit_code == 2);  // no instance
  CHECK(run_cli("check --property nope --assignment x.json").exit_code == 2);
  CHECK(run_cli("bogus-subcommand").exit_code == 2);
}
