#include <catch2/catch_amalgamated.hpp>

#include <unordered_set>

#include "dfs/language.hpp"
#include "dfs/sampler.hpp"
#include "dfs/spec_loader.hpp"

using namespace dfs;

namespace {

struct Fixture {
  WorldSpec spec;
  MeaningSpace space;
  std::vector<TrainingItem> items;

  Fixture()
      : spec(load_spec_file(std::string(DFS_SOURCE_DIR) + "/data/restaurant.dfs")) {
    SamplerConfig cfg;
    cfg.models = 1500;
    cfg.seed = 12;
    cfg.threads = 2;
    space = sample_space(spec, cfg);
    items = generate_items(space, spec);
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

std::vector<std::string> words(const std::string& text) { return split_utterance(text); }

}  // namespace

TEST_CASE("language inventory counts") {
  const auto& f = fixture();
  REQUIRE(f.items.size() == 278);

  std::unordered_set<std::string> utterances, semantics, vocabulary;
  for (const auto& item : f.items) {
    utterances.insert(join_words(item.words));
    semantics.insert(item.semantics_text);
    for (const auto& w : item.words) vocabulary.insert(w);
  }
  REQUIRE(utterances.size() == 278);
  REQUIRE(semantics.size() == 270);
  REQUIRE(vocabulary.size() == 30);
  for (const auto& w : vocabulary) REQUIRE(Lexicon::restaurant().contains(w));
}

TEST_CASE("the collapsed pairs are exactly the a/the enter assertives") {
  const auto& f = fixture();
  std::unordered_map<std::string, std::vector<std::string>> by_semantics;
  for (const auto& item : f.items)
    by_semantics[item.semantics_text].push_back(join_words(item.words));
  std::size_t collapsed = 0;
  for (const auto& [sem, utts] : by_semantics) {
    if (utts.size() == 1) continue;
    ++collapsed;
    REQUIRE(utts.size() == 2);
    REQUIRE(sem.rfind("enter(", 0) == 0);  // a bare enter atom
    for (const auto& u : utts) {
      bool a_variant = u.find(" a ") != std::string::npos;
      bool the_variant = u.find(" the ") != std::string::npos;
      REQUIRE((a_variant || the_variant));
      REQUIRE(u.find("didnt") == std::string::npos);
    }
  }
  REQUIRE(collapsed == 8);
}

TEST_CASE("semantics of specific utterances") {
  const auto& f = fixture();
  auto text_of = [&](const char* utterance) {
    return semantics_of(f.items, words(utterance)).semantics_text;
  };
  REQUIRE(text_of("mike entered a bar") == "enter(mike,bar)");
  REQUIRE(text_of("mike entered the bar") == "enter(mike,bar)");
  REQUIRE(text_of("will didnt pay") == "!pay(will) & referent(will)");
  REQUIRE(text_of("elli didnt enter the restaurant") ==
          "!enter(elli,restaurant) & referent(elli) & referent(restaurant)");
  REQUIRE(text_of("elli didnt enter a restaurant") == "!enter(elli,restaurant) & referent(elli)");
  REQUIRE(text_of("mike entered the bar he ordered water") ==
          "enter(mike,bar) & order(mike,water)");
  REQUIRE(text_of("someone called the waiter he arrived") ==
          "exists x:person (call(x,waiter) & arrive(waiter))");
  REQUIRE(text_of("someone entered the bar she ordered cola") ==
          "exists x:female (enter(x,bar) & order(x,cola))");
  REQUIRE(text_of("someone entered the bar he ordered cola") ==
          "exists x:male (enter(x,bar) & order(x,cola))");
  REQUIRE_THROWS_AS(semantics_of(f.items, words("mike entered the waiter")), DomainError);
}

TEST_CASE("pronouns agree with subject gender") {
  const auto& f = fixture();
  for (const auto& item : f.items) {
    const auto& w = item.words;
    bool masculine_subject = w[0] == "mike" || w[0] == "will";
    bool feminine_subject = w[0] == "elli" || w[0] == "nancy";
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] != "he" && w[i] != "she") continue;
      // the server-referring rows always use "he"
      bool server_row = i + 1 < w.size() && (w[i + 1] == "brought" || w[i + 1] == "arrived");
      if (server_row) {
        REQUIRE(w[i] == "he");
      } else if (masculine_subject) {
        REQUIRE(w[i] == "he");
      } else if (feminine_subject) {
        REQUIRE(w[i] == "she");
      }
    }
    // "someone ... she ..." excludes masculine persons from the existential
    if (w[0] == "someone" && item.semantics->kind == Formula::Kind::Exists) {
      bool she = false;
      for (const auto& t : w)
        if (t == "she") she = true;
      bool server_row = item.semantics->var_sort == "person";
      if (!server_row) REQUIRE(item.semantics->var_sort == (she ? "female" : "male"));
    }
  }
}

TEST_CASE("every item has a satisfiable target") {
  const auto& f = fixture();
  for (const auto& item : f.items) {
    REQUIRE(item.target.v.size() == f.space.num_models());
    REQUIRE(probability(f.space, item.target) > 0.0);
  }
}

TEST_CASE("item ordering is deterministic") {
  const auto& f = fixture();
  auto again = generate_items(f.space, f.spec);
  REQUIRE(again.size() == f.items.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    REQUIRE(again[i].words == f.items[i].words);
    REQUIRE(again[i].semantics_text == f.items[i].semantics_text);
  }
}
