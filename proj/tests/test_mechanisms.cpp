#include <doctest.h>

#include <map>

#include "mtra/fixtures.hpp"
#include "mtra/mechanisms.hpp"
#include "mtra/random_gen.hpp"

using namespace mtra;

TEST_CASE("single-type eating splits contested items evenly") {
  // Two agents, same order, one unit of time: half of each of the two items.
  auto ps = ps_single_type({Rat(1), Rat(1)}, {{0, 1}, {0, 1}}, Rat(1));
  CHECK(ps.shares[0] == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});
  CHECK(ps.shares[1] == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});
  CHECK(ps.supply_after == std::vector<Rat>{Rat(0), Rat(0)});

  auto lone = ps_single_type({Rat(1), Rat(1)}, {{1, 0}}, Rat(1));
  CHECK(lone.shares[0] == std::vector<Rat>{Rat(0), Rat(1)});
  CHECK(lone.supply_after == std::vector<Rat>{Rat(1), Rat(0)});

  auto phase = ps_single_type({Rat(1), Rat(1), Rat(1)}, {{0, 1, 2}, {0, 1, 2}}, Rat(1));
  CHECK(phase.shares[0] == std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(0)});
  CHECK(phase.supply_after == std::vector<Rat>{Rat(0), Rat(0), Rat(1)});
}

TEST_CASE("single-type eating starves when supply runs short of the horizon") {
  CHECK_THROWS_AS(ps_single_type({Rat(1, 2)}, {{0}}, Rat(1)), StarvationError);
}

TEST_CASE("phase-per-type runs reproduce the worked tables") {
  Fixture eg3 = get_fixture("eg3");
  CHECK(lexips(eg3.instance, eg3.profile) == eg3.matrices.at("P_lexips"));

  Fixture rm4 = get_fixture("rm4");
  CHECK(lexips(rm4.instance, rm4.profile) == rm4.matrices.at("P"));

  // A lone agent takes her top bundle outright.
  auto inst = make_instance(1, {"A", "B"}, {{"1_A"}, {"1_B"}});
  Profile prof = make_profile({lexicographic_agent({{0, 1}, {{0}, {0}}}, inst)}, inst);
  auto P = lexips(inst, prof);
  CHECK(P.at(0, 0) == Rat(1));
}

TEST_CASE("lexips rejects profiles without lexicographic structure") {
  Fixture thm1 = get_fixture("thm1");
  CHECK_THROWS_AS(lexips(thm1.instance, thm1.profile), PreconditionError);
}

TEST_CASE("bundle eating reproduces the worked tables") {
  Fixture eg4 = get_fixture("eg4");
  CHECK(mps(eg4.instance, eg4.profile) == eg4.matrices.at("P"));

  Fixture rm3 = get_fixture("rm3");
  CHECK(mps(rm3.instance, rm3.profile) == rm3.matrices.at("P_mps"));

  Fixture rm6 = get_fixture("rm6");
  CHECK(mps(rm6.instance, rm6.profile) == rm6.matrices.at("P"));
}

TEST_CASE("the clock equals the cumulative share when a bundle leaves the menu") {
  // For every consumed bundle, the time its consumption ends equals the
  // agent's cumulative share down to that bundle.
  auto check_time_law = [](const Instance& inst, const Profile& prof) {
    auto run = mps_run(inst, prof);
    std::map<std::pair<int, BundleId>, Rat> end_time;
    for (const auto& seg : run.trace.segments)
      for (int j = 0; j < inst.n; ++j) end_time[{j, seg.top[j]}] = seg.t1;
    for (const auto& [key, t1] : end_time) {
      auto [agent, bundle] = key;
      CHECK(cumulative_share(run.assignment, prof, agent, bundle) == t1);
    }
  };
  Fixture eg4 = get_fixture("eg4");
  check_time_law(eg4.instance, eg4.profile);
  Fixture eg3 = get_fixture("eg3");
  check_time_law(eg3.instance, eg3.profile);
  Rng rng(29);
  for (int round = 0; round < 30; ++round) {
    Instance inst = random_instance(rng, 2 + static_cast<int>(rng.next(2)),
                                    2 + static_cast<int>(rng.next(2)));
    check_time_law(inst, random_linear_profile(rng, inst));
  }
}

TEST_CASE("per-type projections of bundle eating match single-type runs") {
  // Under lexicographic preferences each type's marginal is the plain
  // single-type run over that type's item orders.
  Rng rng(31);
  for (int round = 0; round < 30; ++round) {
    int n = 2 + static_cast<int>(rng.next(2));
    int p = 2 + static_cast<int>(rng.next(2));
    Instance inst = random_instance(rng, n, p);
    Profile prof = random_lexicographic_profile(rng, inst);
    auto P = mps(inst, prof);
    for (int i = 0; i < p; ++i) {
      std::vector<std::vector<int>> orders;
      for (int j = 0; j < n; ++j) orders.push_back(prof.agents[j].lex->per_type[i]);
      auto ps = ps_single_type(std::vector<Rat>(n, Rat(1)), orders, Rat(1));
      auto marg = type_marginal(P, inst, i);
      for (int j = 0; j < n; ++j)
        for (int o = 0; o < n; ++o) CHECK(marg.at(j, o) == ps.shares[j][o]);
    }
  }
}

TEST_CASE("all-ones speeds reduce eating to plain bundle eating") {
  Fixture eg4 = get_fixture("eg4");
  CHECK(eating(eg4.instance, eg4.profile, uniform_schedule(2)) == eg4.matrices.at("P"));
  Rng rng(37);
  for (int round = 0; round < 200; ++round) {
    Instance inst = random_instance(rng, 2 + static_cast<int>(rng.next(2)),
                                    2 + static_cast<int>(rng.next(2)));
    Profile prof = random_linear_profile(rng, inst);
    auto P = mps(inst, prof);
    CHECK(validate(P, inst).ok());
    CHECK(eating(inst, prof, uniform_schedule(inst.n)) == P);
  }
}

TEST_CASE("a front-loaded eater urges events forward") {
  // Agent 1 eats at rate 2 until t = 1/2 and then stops; agent 2 at rate 1.
  // Hand simulation: 1_F runs out at t = 1/3 (combined rate 3), so agent 1
  // holds 2/3 of her top bundle; after the breakpoint only agent 2 eats,
  // exhausting 1_B at 2/3 and the rest at 1.
  Fixture eg4 = get_fixture("eg4");
  EatingSchedule sched;
  sched.agents.push_back({{Rat(0), Rat(1, 2), Rat(1)}, {Rat(2), Rat(0)}});
  sched.agents.push_back({{Rat(0), Rat(1)}, {Rat(1)}});
  auto P = eating(eg4.instance, eg4.profile, sched);
  const Instance& in = eg4.instance;
  CHECK(P.at(0, bid(in, {"1_F", "1_B"})) == Rat(2, 3));
  CHECK(P.at(0, bid(in, {"2_F", "2_B"})) == Rat(1, 3));
  CHECK(P.at(1, bid(in, {"1_F", "2_B"})) == Rat(1, 3));
  CHECK(P.at(1, bid(in, {"2_F", "1_B"})) == Rat(1, 3));
  CHECK(P.at(1, bid(in, {"2_F", "2_B"})) == Rat(1, 3));
  CHECK(validate(P, in).ok());
}

TEST_CASE("eating with one agent always hands over the top bundle") {
  auto inst = make_instance(1, {"A", "B"}, {{"1_A"}, {"1_B"}});
  Profile prof = make_profile({linear_agent({0}, inst)}, inst);
  EatingSchedule sched;
  sched.agents.push_back({{Rat(0), Rat(1, 4), Rat(1)}, {Rat(2), Rat(2, 3)}});
  auto P = eating(inst, prof, sched);
  CHECK(P.at(0, 0) == Rat(1));
}

TEST_CASE("schedules must integrate to one") {
  Fixture eg4 = get_fixture("eg4");
  EatingSchedule sched = uniform_schedule(2);
  sched.agents[0].rates[0] = Rat(2);
  CHECK_THROWS_AS(eating(eg4.instance, eg4.profile, sched), PreconditionError);
  sched.agents[0].rates[0] = Rat(1);
  sched.agents[0].breakpoints[1] = Rat(2);
  CHECK_THROWS_AS(eating(eg4.instance, eg4.profile, sched), PreconditionError);
}

TEST_CASE("speed reconstruction replays to the original assignment") {
  Fixture eg4 = get_fixture("eg4");
  auto P = mps(eg4.instance, eg4.profile);
  auto sched = speeds_from_assignment(P, eg4.instance, eg4.profile);
  CHECK(sched.agents[0].rates.size() == 2);
  CHECK(eating(eg4.instance, eg4.profile, sched) == P);

  // Single agent with a whole bundle: one segment at rate 1.
  auto inst = make_instance(1, {"A"}, {{"1_A"}});
  Profile prof = make_profile({linear_agent({0}, inst)}, inst);
  FractionalAssignment point(1, 1);
  point.at(0, 0) = 1;
  auto s = speeds_from_assignment(point, inst, prof);
  CHECK(s.agents[0].rates == std::vector<Rat>{Rat(1)});
  CHECK(eating(inst, prof, s) == point);

  CHECK_THROWS_AS(speeds_from_assignment(eg4.matrices.at("Q_gc"), eg4.instance, eg4.profile),
                  NotRepresentableError);

  Rng rng(41);
  for (int round = 0; round < 25; ++round) {
    Instance rinst = random_instance(rng, 2 + static_cast<int>(rng.next(2)),
                                     2 + static_cast<int>(rng.next(2)));
    Profile rprof = random_linear_profile(rng, rinst);
    auto out = mps(rinst, rprof);
    CHECK(eating(rinst, rprof, speeds_from_assignment(out, rinst, rprof)) == out);
    // Phase-per-type outputs replay too whenever they are cycle-free.
    Profile lprof = random_lexicographic_profile(rng, rinst);
    auto lout = lexips(rinst, lprof);
    CHECK(validate(lout, rinst).ok());
    if (!has_generalized_cycle(lout, rinst, lprof).has_value())
      CHECK(eating(rinst, lprof, speeds_from_assignment(lout, rinst, lprof)) == lout);
  }
}

namespace {

EatingSchedule random_schedule(Rng& rng, int n) {
  EatingSchedule sched;
  for (int j = 0; j < n; ++j) {
    EatingSchedule::AgentSchedule a;
    a.breakpoints.push_back(Rat(0));
    const long grid[4] = {4, 3, 2, 5};
    long den = grid[rng.next(4)];
    for (long k = 1; k < den; ++k)
      if (rng.next(3) == 0) a.breakpoints.push_back(rat(k, den));
    a.breakpoints.push_back(Rat(1));
    Rat integral(0);
    for (std::size_t s = 0; s + 1 < a.breakpoints.size(); ++s) {
      a.rates.push_back(Rat(static_cast<long>(rng.next(4))));
      integral += a.rates.back() * (a.breakpoints[s + 1] - a.breakpoints[s]);
    }
    if (integral == 0) {
      a.breakpoints = {Rat(0), Rat(1)};
      a.rates = {Rat(1)};
    } else {
      for (auto& r : a.rates) r /= integral;
    }
    sched.agents.push_back(std::move(a));
  }
  return sched;
}

}  // namespace

TEST_CASE("every eating outcome is valid and admits no generalized cycle") {
  Rng rng(43);
  for (int round = 0; round < 60; ++round) {
    Instance inst = random_instance(rng, 2 + static_cast<int>(rng.next(2)),
                                    2 + static_cast<int>(rng.next(2)));
    Profile prof = random_linear_profile(rng, inst);
    auto sched = random_schedule(rng, inst.n);
    auto P = eating(inst, prof, sched);
    CHECK(validate(P, inst).ok());
    CHECK(!has_generalized_cycle(P, inst, prof).has_value());
    // ... so the speeds can be reconstructed and replayed.
    CHECK(eating(inst, prof, speeds_from_assignment(P, inst, prof)) == P);
  }
}

TEST_CASE("mechanisms accept mixed declared-linear and lexicographic profiles") {
  auto inst = make_instance(2, {"F", "B"}, {{"1_F", "2_F"}, {"1_B", "2_B"}});
  Profile mixed = make_profile(
      {linear_agent({0, 1, 3, 2}, inst),  // not lexicographic
       lexicographic_agent({{1, 0}, {{0, 1}, {0, 1}}}, inst)},
      inst);
  auto P = mps(inst, mixed);
  CHECK(validate(P, inst).ok());
  CHECK_THROWS_AS(lexips(inst, mixed), PreconditionError);
}

TEST_CASE("mechanism runs are deterministic") {
  Fixture eg3 = get_fixture("eg3");
  CHECK(mps(eg3.instance, eg3.profile) == mps(eg3.instance, eg3.profile));
  CHECK(lexips(eg3.instance, eg3.profile) == lexips(eg3.instance, eg3.profile));
}
