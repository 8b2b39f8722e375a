#include <catch2/catch_amalgamated.hpp>

#include "dfs/sampler.hpp"
#include "dfs/spec_loader.hpp"

using namespace dfs;

namespace {
WorldSpec restaurant() { return load_spec_file(std::string(DFS_SOURCE_DIR) + "/data/restaurant.dfs"); }
}

TEST_CASE("restaurant spec loads with the expected inventory") {
  WorldSpec spec = restaurant();
  REQUIRE(spec.find_sort("person")->constants ==
          std::vector<std::string>{"mike", "will", "elli", "nancy"});
  REQUIRE(spec.find_sort("place")->constants.size() == 2);
  REQUIRE(spec.find_sort("server")->constants.size() == 2);
  REQUIRE(spec.find_sort("order")->constants.size() == 4);
  REQUIRE(spec.find_sort("entity")->constants.size() == 12);
  REQUIRE(spec.predicates.size() == 7);
  // 46 event atoms plus 12 referent atoms
  REQUIRE(spec.propositions().size() == 58);
  // hand-written rows plus the expanded schemas (2 unary + 4 binary)
  REQUIRE(spec.constraints.size() == 14);
  REQUIRE(spec.prob_constraints.size() == 25);
  REQUIRE(spec.prob_constraints.back().catch_all);
  REQUIRE(spec.prob_constraints.back().probability == 0.6);
}

TEST_CASE("proposition enumeration is deterministic and ordered") {
  WorldSpec spec = restaurant();
  auto a = enumerate_propositions(spec);
  auto b = enumerate_propositions(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].name == b[i].name);
    REQUIRE(a[i].index == i);
  }
  // predicate declaration order, then odometer over argument sorts
  REQUIRE(a[0].name == "enter(mike,bar)");
  REQUIRE(a[1].name == "enter(mike,restaurant)");
  REQUIRE(a[7].name == "enter(nancy,restaurant)");
  std::size_t enter_atoms = 0;
  for (const auto& p : a)
    if (p.pred == "enter") ++enter_atoms;
  REQUIRE(enter_atoms == 8);
  REQUIRE(a.back().name == "referent(water)");
}

TEST_CASE("meta-expanded schemas are closed formulas") {
  WorldSpec spec = restaurant();
  for (const auto& c : spec.constraints) REQUIRE(is_closed(c));
  for (const auto& g : ground_constraints(spec)) REQUIRE(is_ground(g));
}

TEST_CASE("spec validation errors") {
  REQUIRE_THROWS_AS(load_spec_string("sort s = a, a\nprob * = 0.5\n"), ParseError);
  REQUIRE_THROWS_AS(load_spec_string("sort s = a\nsort s = b\nprob * = 0.5\n"), ParseError);
  REQUIRE_THROWS_AS(load_spec_string("sort s = a\npredicate p(s)\n"), SpecError);  // no catch-all
  REQUIRE_THROWS_AS(load_spec_string("sort s = a\nprob * = 0.5\nprob * = 0.6\n"), SpecError);
  REQUIRE_THROWS_AS(load_spec_string("sort s = a\npredicate p(s)\nconstraint p(b)\nprob * = 0.5\n"),
                    ParseError);
  REQUIRE_THROWS_AS(load_spec_string("sort s = a\npredicate p(s)\nprob * = 1.5\n"), ParseError);
  // condition variables must come from the target pattern
  REQUIRE_THROWS_AS(
      load_spec_string(
          "sort s = a\npredicate p(s)\npredicate q(s)\nprob p(x:s) given q(y) = 0.5\nprob * = 0.5\n"),
      ParseError);
  // exclude must name a ground atom from the declared space
  REQUIRE_THROWS_AS(
      load_spec_string("sort s = a\npredicate p(s)\nexclude p(a) | p(a)\nprob * = 0.5\n"),
      ParseError);
}

TEST_CASE("exclude drops atoms from the enumeration") {
  WorldSpec spec = load_spec_string(
      "sort s = a, b\npredicate p(s)\npredicate q(s)\nexclude p(b)\nprob * = 0.5\n");
  REQUIRE(spec.propositions().size() == 3);
  REQUIRE(spec.find_proposition("p(b)") == nullptr);
  REQUIRE(spec.find_proposition("q(b)") != nullptr);
}

TEST_CASE("sampling probability takes the first matching rule") {
  WorldSpec spec = restaurant();
  const Proposition* ref_bartender = spec.find_proposition("referent(bartender)");
  const Proposition* order_fries = spec.find_proposition("order(mike,fries)");
  const Proposition* pay_mike = spec.find_proposition("pay(mike)");
  REQUIRE(ref_bartender != nullptr);

  Model bar_world(spec, {"referent(bar)"});
  REQUIRE(sampling_probability(spec, *ref_bartender, bar_world) == 1.0);

  Model in_bar(spec, {"enter(mike,bar)"});
  REQUIRE(sampling_probability(spec, *order_fries, in_bar) == 0.1);

  Model nothing(spec);
  REQUIRE(sampling_probability(spec, *pay_mike, nothing) == 0.6);
  REQUIRE(sampling_probability(spec, *ref_bartender, nothing) == 0.0);
}

TEST_CASE("rule order decides ties between overlapping rules") {
  const char* text =
      "sort s = a, b\n"
      "predicate p(s)\n"
      "predicate q(s)\n"
      "prob p(x:s) given q(x) = 0.2\n"
      "prob p(x:s) given q(x) = 0.9\n"  // same pattern and condition; dead rule
      "prob * = 0.5\n";
  WorldSpec spec = load_spec_string(text);
  Model m(spec, {"q(a)"});
  REQUIRE(sampling_probability(spec, *spec.find_proposition("p(a)"), m) == 0.2);
  REQUIRE(sampling_probability(spec, *spec.find_proposition("p(b)"), m) == 0.5);
}

TEST_CASE("prepared rule table matches the reference scan") {
  WorldSpec spec = restaurant();
  PreparedSampler prepared(spec);
  Rng rng(99);
  // random light worlds; the compiled table must agree with the naive scan
  for (int round = 0; round < 50; ++round) {
    std::vector<std::string> atoms;
    for (const auto& p : spec.propositions())
      if (rng.next_below(3) == 0) atoms.push_back(p.name);
    Model light(spec, atoms);
    for (const auto& p : spec.propositions()) {
      double naive = sampling_probability(spec, p, light);
      double fast = prepared.probability_of(p.index, light.bits());
      REQUIRE(naive == fast);
    }
  }
}
