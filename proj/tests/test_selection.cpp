#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dfs/sampler.hpp"
#include "dfs/selection.hpp"
#include "dfs/spec_loader.hpp"

using namespace dfs;

namespace {
MeaningSpace sampled_space(std::size_t models, std::uint64_t seed) {
  WorldSpec spec = load_spec_file(std::string(DFS_SOURCE_DIR) + "/data/restaurant.dfs");
  SamplerConfig cfg;
  cfg.models = models;
  cfg.seed = seed;
  return sample_space(spec, cfg);
}
}  // namespace

TEST_CASE("inference vector layout and endpoints") {
  MeaningSpace space({"p", "q"}, 4);
  // p in models 0,1; q in 2,3 -- mutually exclusive
  space.set_bit(0, 0);
  space.set_bit(1, 0);
  space.set_bit(2, 1);
  space.set_bit(3, 1);
  auto inf = inference_vector(space);
  REQUIRE(inf.size() == 4);  // row-major ordered pairs including the diagonal
  REQUIRE(inf[0] == 1.0);    // (p,p)
  REQUIRE(inf[1] == -1.0);   // (p,q)
  REQUIRE(inf[2] == -1.0);   // (q,p)
  REQUIRE(inf[3] == 1.0);    // (q,q)

  MeaningSpace zero({"p", "q"}, 2);
  zero.set_bit(0, 0);
  REQUIRE_THROWS_AS(inference_vector(zero), DomainError);
}

TEST_CASE("pearson correlation oracle") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y = {2, 4, 6, 8, 10};
  REQUIRE(pearson(x, y) == Catch::Approx(1.0));
  std::vector<double> z = {5, 4, 3, 2, 1};
  REQUIRE(pearson(x, z) == Catch::Approx(-1.0));
  std::vector<double> w = {1.0, -1.0, 2.0, 0.5, -0.3};
  // two-pass formula against a direct computation
  double mx = 0, mw = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    mx += x[i] / 5;
    mw += w[i] / 5;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    sxy += (x[i] - mx) * (w[i] - mw);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (w[i] - mw) * (w[i] - mw);
  }
  REQUIRE(pearson(x, w) == Catch::Approx(sxy / std::sqrt(sxx * syy)));
}

TEST_CASE("selecting every model is the identity") {
  MeaningSpace space = sampled_space(40, 2);
  SelectionConfig cfg;
  cfg.k = 40;
  cfg.iterations = 3;
  cfg.seed = 1;
  SelectionReport report;
  MeaningSpace out = select_models(space, cfg, &report);
  REQUIRE(report.best_rho == Catch::Approx(1.0));
  REQUIRE(out.num_models() == 40);
  for (std::size_t m = 0; m < 40; ++m)
    for (std::size_t p = 0; p < space.num_props(); ++p) REQUIRE(out.bit(m, p) == space.bit(m, p));
}

TEST_CASE("reduction preserves the entailment structure") {
  MeaningSpace space = sampled_space(1500, 4);
  SelectionConfig cfg;
  cfg.k = 120;
  cfg.iterations = 60;
  cfg.seed = 11;
  SelectionReport report;
  MeaningSpace reduced = select_models(space, cfg, &report);
  REQUIRE(reduced.num_models() == 120);
  REQUIRE(reduced.num_props() == space.num_props());
  REQUIRE(report.best_rho > 0.5);
  REQUIRE(report.best_iteration >= 1);

  auto orig = inference_vector(space);
  auto red = inference_vector(reduced);
  for (std::size_t i = 0; i < orig.size(); ++i) {
    REQUIRE((orig[i] == 1.0) == (red[i] == 1.0));
    REQUIRE((orig[i] == -1.0) == (red[i] == -1.0));
  }
  // reported rho equals an independent recomputation
  REQUIRE(report.best_rho == Catch::Approx(pearson(red, orig)).epsilon(1e-12));

  // every reduced row is one of the input rows
  std::unordered_set<std::string> row_keys;
  for (std::size_t m = 0; m < space.num_models(); ++m) {
    auto bits = space.row_bits(m);
    row_keys.emplace(reinterpret_cast<const char*>(bits.data()),
                     bits.size() * sizeof(std::uint64_t));
  }
  for (std::size_t m = 0; m < reduced.num_models(); ++m) {
    auto bits = reduced.row_bits(m);
    std::string key(reinterpret_cast<const char*>(bits.data()),
                    bits.size() * sizeof(std::uint64_t));
    REQUIRE(row_keys.count(key) == 1);
  }
}

TEST_CASE("more iterations never hurt with a shared seed stream") {
  MeaningSpace space = sampled_space(800, 6);
  SelectionConfig small;
  small.k = 100;
  small.iterations = 10;
  small.seed = 3;
  SelectionConfig large = small;
  large.iterations = 40;
  SelectionReport r_small, r_large;
  select_models(space, small, &r_small);
  select_models(space, large, &r_large);
  REQUIRE(r_large.best_rho >= r_small.best_rho);
}

TEST_CASE("subsets that starve a proposition are rejected") {
  // three models; proposition q is satisfied only by model 2, so any
  // 2-subset drawn from models {0,1} dies at the informativeness gate.
  MeaningSpace space({"p", "q"}, 3);
  space.set_bit(0, 0);
  space.set_bit(1, 0);
  space.set_bit(2, 0);
  space.set_bit(2, 1);
  SelectionConfig cfg;
  cfg.k = 2;
  cfg.iterations = 200;
  cfg.seed = 5;
  SelectionReport report;
  try {
    MeaningSpace out = select_models(space, cfg, &report);
    // survivors must all contain model 2
    bool has_q = false;
    for (std::size_t m = 0; m < out.num_models(); ++m)
      if (out.bit(m, 1)) has_q = true;
    REQUIRE(has_q);
  } catch (const DomainError&) {
    // acceptable outcome: every subset was rejected
  }
  REQUIRE(report.rejected_zero_column > 0);
}

TEST_CASE("invalid configurations are rejected") {
  MeaningSpace space({"p"}, 2);
  space.set_bit(0, 0);
  space.set_bit(1, 0);
  SelectionConfig cfg;
  cfg.k = 5;
  REQUIRE_THROWS_AS(select_models(space, cfg), DomainError);
  cfg.k = 1;
  cfg.iterations = 0;
  REQUIRE_THROWS_AS(select_models(space, cfg), DomainError);
}
