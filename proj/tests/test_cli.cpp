#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfs/cli.hpp"

using namespace dfs;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("dfs_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const std::string kSpec = std::string(DFS_SOURCE_DIR) + "/data/restaurant.dfs";

}  // namespace

TEST_CASE("cli pipeline: sample, select, query, infer, gen-language") {
  TempDir dir;
  std::string space = dir.file("space.tsv");
  REQUIRE(cli::run({"sample", "--spec", kSpec, "--models", "300", "--seed", "42", "--out",
                    space}) == cli::kOk);
  REQUIRE(std::filesystem::exists(space));
  REQUIRE(std::filesystem::exists(space + ".manifest.json"));

  // byte-identical on repeat (idempotence given identical inputs and seeds)
  std::string space2 = dir.file("space_again.tsv");
  REQUIRE(cli::run({"sample", "--spec", kSpec, "--models", "300", "--seed", "42", "--out",
                    space2}) == cli::kOk);
  REQUIRE(slurp(space) == slurp(space2));

  std::string reduced = dir.file("space80.tsv");
  std::string report = dir.file("selection.json");
  REQUIRE(cli::run({"select", "--space", space, "--k", "80", "--iters", "40", "--seed", "7",
                    "--out", reduced, "--report", report}) == cli::kOk);
  REQUIRE(std::filesystem::exists(reduced));
  {
    nlohmann::json j = nlohmann::json::parse(slurp(report));
    REQUIRE(j["k"] == 80);
    REQUIRE(j["achieved_rho"].get<double>() > 0.0);
  }

  // query resolves the world spec through the manifest sidecar
  REQUIRE(cli::run({"query", "--space", space, "--formula", "exists x:person (pay(x))"}) ==
          cli::kOk);
  std::string query_out = dir.file("query.json");
  REQUIRE(cli::run({"query", "--space", space, "--formula", "pay(mike)", "--json", "--as-set",
                    "--out", query_out}) == cli::kOk);
  {
    nlohmann::json j = nlohmann::json::parse(slurp(query_out));
    double p = j["probability"].get<double>();
    REQUIRE(p > 0.0);
    REQUIRE(p < 1.0);
    REQUIRE(j["vector"].size() == 300);
    REQUIRE(j["consistent_propositions"].size() > 0);
  }

  REQUIRE(cli::run({"infer", "--space", space, "--given", "enter(mike,bar)", "--target",
                    "order(mike,salad)"}) == cli::kOk);

  std::string items = dir.file("items.jsonl");
  REQUIRE(cli::run({"gen-language", "--space", reduced, "--spec", kSpec, "--out", items}) ==
          cli::kOk);
  auto stored = read_items_jsonl(items);
  REQUIRE(stored.size() == 278);
}

TEST_CASE("cli trains, evaluates and traces a small network") {
  TempDir dir;
  std::string space = dir.file("space.tsv");
  REQUIRE(cli::run({"sample", "--spec", kSpec, "--models", "60", "--seed", "9", "--out",
                    space}) == cli::kOk);
  std::string items = dir.file("items.jsonl");
  REQUIRE(cli::run({"gen-language", "--space", space, "--spec", kSpec, "--out", items}) ==
          cli::kOk);
  std::string net = dir.file("net.json");
  std::string loss = dir.file("loss.csv");
  REQUIRE(cli::run({"train", "--items", items, "--space", space, "--hidden", "20", "--epochs",
                    "30", "--seed", "1", "--out", net, "--loss-out", loss}) == cli::kOk);
  REQUIRE(std::filesystem::exists(net));
  REQUIRE(slurp(loss).rfind("epoch,loss\n", 0) == 0);

  REQUIRE(cli::run({"evaluate", "--net", net, "--items", items, "--space", space, "--json"}) ==
          cli::kOk);

  std::string trace_csv = dir.file("trace.csv");
  REQUIRE(cli::run({"trace", "--net", net, "--space", space, "--utterance",
                    "someone entered the bar she ordered cola", "--props",
                    "referent(elli),referent(nancy),enter(mike,bar)", "--out", trace_csv}) ==
          cli::kOk);
  std::string text = slurp(trace_csv);
  REQUIRE(text.rfind("word,surprisal_bits,entropy_bits,", 0) == 0);
  // one line per word plus the header
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 8);
}

TEST_CASE("cli error statuses") {
  TempDir dir;
  REQUIRE(cli::run({"no-such-command"}) == cli::kUsage);
  REQUIRE(cli::run({"sample", "--bogus-flag"}) == cli::kUsage);
  REQUIRE(cli::run({"sample", "--spec", dir.file("missing.dfs"), "--out",
                    dir.file("out.tsv")}) == cli::kInput);
  // malformed formula is an input error
  std::string space = dir.file("space.tsv");
  REQUIRE(cli::run({"sample", "--spec", kSpec, "--models", "20", "--seed", "1", "--out",
                    space}) == cli::kOk);
  REQUIRE(cli::run({"query", "--space", space, "--formula", "pay(", "--spec", kSpec}) ==
          cli::kInput);
  REQUIRE(cli::run({"query", "--space", space, "--formula", "bottom & bottom", "--spec",
                    kSpec}) == cli::kOk);
}
