#include <doctest.h>

#include "mtra/assignment.hpp"
#include "mtra/fixtures.hpp"
#include "mtra/oracles.hpp"
#include "mtra/random_gen.hpp"

using namespace mtra;

TEST_CASE("validation accepts the worked tables and reports exact deficits") {
  Fixture eg4 = get_fixture("eg4");
  CHECK(validate(eg4.matrices.at("P"), eg4.instance).ok());

  Fixture rm3 = get_fixture("rm3");
  CHECK(validate(rm3.matrices.at("P_mps"), rm3.instance).ok());

  FractionalAssignment zero(2, 4);
  auto rep = validate(zero, eg4.instance);
  int row_sum_violations = 0;
  for (const auto& v : rep.violations)
    if (v.kind == Violation::Kind::row_sum) {
      ++row_sum_violations;
      CHECK(v.deficit == Rat(1));
    }
  CHECK(row_sum_violations == 2);

  FractionalAssignment wrong(3, 4);
  CHECK_THROWS_AS(validate(wrong, eg4.instance), ShapeError);

  FractionalAssignment out_of_range = eg4.matrices.at("P");
  out_of_range.at(0, 0) = Rat(2);
  bool saw_range = false, saw_marginal = false;
  for (const auto& v : validate(out_of_range, eg4.instance).violations) {
    saw_range = saw_range || v.kind == Violation::Kind::entry_range;
    saw_marginal = saw_marginal || v.kind == Violation::Kind::item_marginal;
  }
  CHECK(saw_range);
  CHECK(saw_marginal);
}

TEST_CASE("type marginals sum bundle shares per item") {
  Fixture eg4 = get_fixture("eg4");
  auto mF = type_marginal(eg4.matrices.at("P"), eg4.instance, 0);
  for (int j = 0; j < 2; ++j)
    for (int o = 0; o < 2; ++o) CHECK(mF.at(j, o) == Rat(1, 2));

  // A discrete assignment projects to a permutation matrix per type.
  Rng rng(5);
  Instance inst = random_instance(rng, 3, 2);
  auto d = random_discrete_assignment(rng, inst);
  auto P = to_fractional(d, inst);
  for (int i = 0; i < 2; ++i) {
    auto m = type_marginal(P, inst, i);
    for (int j = 0; j < 3; ++j) {
      Rat row(0);
      for (int o = 0; o < 3; ++o) {
        CHECK((m.at(j, o) == 0 || m.at(j, o) == 1));
        row += m.at(j, o);
      }
      CHECK(row == 1);
    }
  }
}

TEST_CASE("product composition multiplies per-type marginals") {
  Fixture eg3 = get_fixture("eg3");
  auto run = lexips_run(eg3.instance, eg3.profile);
  CHECK(product_compose(run.type_marginals, eg3.instance) == eg3.matrices.at("P_lexips"));

  // Permutation marginals compose to the matching discrete assignment.
  auto inst = make_instance(2, {"F", "B"}, {{"1_F", "2_F"}, {"1_B", "2_B"}});
  SingleTypeAssignment pf(2), pb(2);
  pf.at(0, 0) = pf.at(1, 1) = 1;  // agent 1 takes 1_F
  pb.at(0, 1) = pb.at(1, 0) = 1;  // agent 1 takes 2_B
  auto P = product_compose({pf, pb}, inst);
  DiscreteAssignment expect{{bid(inst, {"1_F", "2_B"}), bid(inst, {"2_F", "1_B"})}};
  CHECK(P == to_fractional(expect, inst));

  SingleTypeAssignment half(2);
  half.at(0, 0) = half.at(0, 1) = half.at(1, 0) = half.at(1, 1) = Rat(1, 2);
  auto quarters = product_compose({half, half}, inst);
  for (int j = 0; j < 2; ++j)
    for (int b = 0; b < 4; ++b) CHECK(quarters.at(j, b) == Rat(1, 4));
}

TEST_CASE("marginals of a product recover the factors exactly") {
  Rng rng(17);
  for (int round = 0; round < 25; ++round) {
    int n = 2 + static_cast<int>(rng.next(2));
    int p = 2 + static_cast<int>(rng.next(2));
    Instance inst = random_instance(rng, n, p);
    // Random doubly stochastic factors via mixtures of permutations.
    std::vector<SingleTypeAssignment> marg;
    for (int i = 0; i < p; ++i) {
      SingleTypeAssignment m(n);
      Rat total(0);
      std::vector<Rat> w;
      std::vector<std::vector<int>> perms;
      for (int t = 0; t < 3; ++t) {
        std::vector<int> perm(n);
        for (int k = 0; k < n; ++k) perm[k] = k;
        rng.shuffle(perm);
        perms.push_back(perm);
        w.push_back(Rat(1 + static_cast<long>(rng.next(5))));
        total += w.back();
      }
      for (int t = 0; t < 3; ++t)
        for (int j = 0; j < n; ++j) m.at(j, perms[t][j]) += w[t] / total;
      marg.push_back(std::move(m));
    }
    auto P = product_compose(marg, inst);
    CHECK(validate(P, inst).ok());
    for (int i = 0; i < p; ++i) CHECK(type_marginal(P, inst, i) == marg[i]);
    Rat sum(0);
    for (const auto& v : P.a) sum += v;
    CHECK(sum == Rat(n));
  }
}

TEST_CASE("embedded discrete assignments validate") {
  Rng rng(23);
  for (int round = 0; round < 20; ++round) {
    int n = 1 + static_cast<int>(rng.next(3));
    int p = 1 + static_cast<int>(rng.next(3));
    Instance inst = random_instance(rng, n, p);
    CHECK(validate(to_fractional(random_discrete_assignment(rng, inst), inst), inst).ok());
  }
}
