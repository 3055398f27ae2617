#include <doctest.h>

#include <algorithm>
#include <set>

#include "mtra/fixtures.hpp"
#include "mtra/model.hpp"
#include "mtra/random_gen.hpp"

using namespace mtra;

namespace {

// Independent oracle for the lexicographic comparison rule: x beats y iff
// at some type x's item is better and every more important type ties.
bool lex_prefers(const Instance& inst, const LexicographicPreference& q, BundleId x, BundleId y) {
  for (int level = 0; level < inst.num_types(); ++level) {
    int type = q.importance[level];
    int xi = inst.item_index_of(x, type);
    int yi = inst.item_index_of(y, type);
    if (xi == yi) continue;
    auto pos = [&](int item) {
      return std::find(q.per_type[type].begin(), q.per_type[type].end(), item) -
             q.per_type[type].begin();
    };
    return pos(xi) < pos(yi);
  }
  return false;
}

std::vector<BundleId> sort_by_oracle(const Instance& inst, const LexicographicPreference& q) {
  auto bundles = enumerate_bundles(inst);
  std::sort(bundles.begin(), bundles.end(),
            [&](BundleId a, BundleId b) { return lex_prefers(inst, q, a, b); });
  return bundles;
}

}  // namespace

TEST_CASE("bundle enumeration follows the type-major canonical order") {
  auto two = make_instance(2, {"F", "B"}, {{"1_F", "2_F"}, {"1_B", "2_B"}});
  auto bundles = enumerate_bundles(two);
  REQUIRE(bundles.size() == 4);
  CHECK(two.bundle_label(bundles[0]) == "1_F 1_B");
  CHECK(two.bundle_label(bundles[1]) == "1_F 2_B");
  CHECK(two.bundle_label(bundles[2]) == "2_F 1_B");
  CHECK(two.bundle_label(bundles[3]) == "2_F 2_B");

  auto solo = make_instance(1, {"A", "B", "C"}, {{"1_A"}, {"1_B"}, {"1_C"}});
  CHECK(enumerate_bundles(solo).size() == 1);

  auto three = make_instance(3, {"F", "B"}, {{"1_F", "2_F", "3_F"}, {"1_B", "2_B", "3_B"}});
  CHECK(enumerate_bundles(three).size() == 9);
}

TEST_CASE("instance construction rejects malformed input") {
  CHECK_THROWS_AS(make_instance(2, {"F"}, {{"1_F", "2_F", "3_F"}}), ParseError);
  CHECK_THROWS_AS(make_instance(2, {"F", "B"}, {{"a", "b"}, {"a", "c"}}), ParseError);
}

TEST_CASE("lexicographic expansion matches the definitional example") {
  auto inst = make_instance(2, {"F", "B"}, {{"1_F", "2_F"}, {"1_B", "2_B"}});
  LexicographicPreference q{{0, 1}, {{0, 1}, {1, 0}}};  // F > B, 1_F > 2_F, 2_B > 1_B
  auto pref = expand_lexicographic(q, inst);
  CHECK(pref.ranking == std::vector<BundleId>{bid(inst, {"1_F", "2_B"}), bid(inst, {"1_F", "1_B"}),
                                              bid(inst, {"2_F", "2_B"}),
                                              bid(inst, {"2_F", "1_B"})});
}

TEST_CASE("a single type expands to its item order") {
  auto inst = make_instance(3, {"A"}, {{"1_A", "2_A", "3_A"}});
  LexicographicPreference q{{0}, {{2, 0, 1}}};
  CHECK(expand_lexicographic(q, inst).ranking == std::vector<BundleId>{2, 0, 1});
}

TEST_CASE("expansion agrees with the pairwise comparison oracle") {
  Fixture eg3 = get_fixture("eg3");
  const auto& q3 = *eg3.profile.agents[2].lex;
  auto expanded = expand_lexicographic(q3, eg3.instance);
  CHECK(expanded.ranking == sort_by_oracle(eg3.instance, q3));
  CHECK(eg3.instance.bundle_label(expanded.ranking[0]) == "1_F 2_B");
  CHECK(eg3.instance.bundle_label(expanded.ranking[1]) == "2_F 2_B");
  CHECK(eg3.instance.bundle_label(expanded.ranking[2]) == "3_F 2_B");
  CHECK(eg3.instance.bundle_label(expanded.ranking[3]) == "1_F 3_B");
  CHECK(eg3.instance.bundle_label(expanded.ranking[8]) == "3_F 1_B");
  // Pairwise agreement with the ranking order, exhaustively.
  for (BundleId a = 0; a < 9; ++a)
    for (BundleId b = 0; b < 9; ++b)
      CHECK(lex_prefers(eg3.instance, q3, a, b) == expanded.prefers(a, b));

  Rng rng(7);
  for (int round = 0; round < 40; ++round) {
    int n = 2 + static_cast<int>(rng.next(2));
    int p = 2 + static_cast<int>(rng.next(2));
    Instance inst = random_instance(rng, n, p);
    Profile prof = random_lexicographic_profile(rng, inst);
    for (const auto& agent : prof.agents)
      CHECK(agent.linear.ranking == sort_by_oracle(inst, *agent.lex));
  }
}

TEST_CASE("expansion rejects malformed preferences") {
  auto inst = make_instance(2, {"F", "B"}, {{"1_F", "2_F"}, {"1_B", "2_B"}});
  LexicographicPreference missing_item{{0, 1}, {{0, 0}, {0, 1}}};
  CHECK_THROWS_AS(expand_lexicographic(missing_item, inst), PreconditionError);
  LexicographicPreference bad_importance{{0, 0}, {{0, 1}, {0, 1}}};
  CHECK_THROWS_AS(expand_lexicographic(bad_importance, inst), PreconditionError);
}

TEST_CASE("recognition inverts expansion and rejects non-lexicographic rankings") {
  auto inst = make_instance(2, {"F", "B"}, {{"1_F", "2_F"}, {"1_B", "2_B"}});
  auto pref = make_linear_preference({bid(inst, {"1_F", "1_B"}), bid(inst, {"1_F", "2_B"}),
                                      bid(inst, {"2_F", "1_B"}), bid(inst, {"2_F", "2_B"})},
                                     inst);
  auto q = recognize_lexicographic(pref, inst);
  REQUIRE(q.has_value());
  CHECK(q->importance == std::vector<int>{0, 1});
  CHECK(q->per_type == std::vector<std::vector<int>>{{0, 1}, {0, 1}});

  // Example 2, agent 1: food first.
  Fixture eg2 = get_fixture("eg2");
  auto q1 = recognize_lexicographic(eg2.profile.agents[0].linear, eg2.instance);
  REQUIRE(q1.has_value());
  CHECK(eg2.instance.type_names[q1->importance[0]] == "F");

  // The impossibility profile's first ranking flips within the 2_F block.
  Fixture thm1 = get_fixture("thm1");
  CHECK(!recognize_lexicographic(thm1.profile.agents[0].linear, thm1.instance).has_value());
}

TEST_CASE("recognize-expand round trip on random lexicographic preferences") {
  Rng rng(11);
  for (int round = 0; round < 60; ++round) {
    int n = 2 + static_cast<int>(rng.next(2));
    int p = 1 + static_cast<int>(rng.next(3));
    Instance inst = random_instance(rng, n, p);
    Profile prof = random_lexicographic_profile(rng, inst);
    for (const auto& agent : prof.agents) {
      auto q = recognize_lexicographic(agent.linear, inst);
      REQUIRE(q.has_value());
      CHECK(q->importance == agent.lex->importance);
      CHECK(q->per_type == agent.lex->per_type);
    }
  }
}

TEST_CASE("upper contour sets grow down the ranking") {
  Fixture eg2 = get_fixture("eg2");
  const auto& pref = eg2.profile.agents[0].linear;
  CHECK(upper_contour_set(pref, pref.ranking.front()) ==
        std::vector<BundleId>{pref.ranking.front()});
  CHECK(upper_contour_set(pref, pref.ranking.back()).size() == 4);
  auto ucs = upper_contour_set(pref, bid(eg2.instance, {"2_F", "1_B"}));
  CHECK(std::set<BundleId>(ucs.begin(), ucs.end()) ==
        std::set<BundleId>{bid(eg2.instance, {"1_F", "1_B"}), bid(eg2.instance, {"1_F", "2_B"}),
                           bid(eg2.instance, {"2_F", "1_B"})});
  CHECK_THROWS_AS(upper_contour_set(pref, 99), ShapeError);

  // Each step down the ranking adds exactly the new bundle.
  Rng rng(3);
  Instance inst = random_instance(rng, 3, 2);
  Profile prof = random_linear_profile(rng, inst);
  const auto& r = prof.agents[0].linear;
  for (std::size_t k = 1; k < r.ranking.size(); ++k) {
    auto hi = upper_contour_set(r, r.ranking[k - 1]);
    auto lo = upper_contour_set(r, r.ranking[k]);
    CHECK(hi.size() + 1 == lo.size());
    CHECK(std::set<BundleId>(lo.begin(), lo.end()).count(r.ranking[k - 1]) == 1);
  }
}
