#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfs/acceptance.hpp"
#include "dfs/io.hpp"
#include "dfs/pipeline.hpp"
#include "dfs/set_theory.hpp"

namespace dfs::cli {

// Exit statuses: 0 success, 2 usage error, 3 input error, 4 runtime
// failure, 5 acceptance failure (reproduce --check).
inline constexpr int kOk = 0, kUsage = 2, kInput = 3, kRuntime = 4, kAcceptance = 5;

inline unsigned thread_limit() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DFS_THREADS")) {
    long v = std::atol(env);
    if (v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return hw;
}

namespace detail {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// --props takes a comma-separated list whose entries themselves contain
// commas inside parentheses: referent(elli),enter(mike,bar),...
inline std::vector<std::string> split_props(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Resolve the world spec for a space: an explicit --spec wins, otherwise the
// space's sidecar manifest is consulted.
inline WorldSpec resolve_spec(const std::string& spec_flag, const std::string& space_path) {
  if (!spec_flag.empty()) return load_spec_file(spec_flag);
  std::string recorded = spec_path_from_manifest(space_path);
  if (!recorded.empty() && std::filesystem::exists(recorded)) return load_spec_file(recorded);
  throw IoError("no world spec: pass --spec (the space's manifest sidecar names none)");
}

inline void report_probability(const MeaningSpace& space, const WorldSpec& spec,
                               const std::string& formula_text, bool as_json, bool as_set,
                               std::ostream& out) {
  FormulaPtr f = parse_formula(formula_text, spec);
  MeaningVector v = eval_formula(space, spec, f);
  double p = probability(space, v);
  nlohmann::json j;
  j["formula"] = print_formula(f);
  j["probability"] = p;
  j["vector"] = v.v;
  if (as_set) {
    // Set-theoretic reading: the propositional meaning vectors consistent
    // with the formula, and the centroid they map back to.
    VectorSet all_props, context;
    for (const auto& name : space.prop_names())
      all_props.insert(proposition_vector(space, name));
    context.insert(v);
    VectorSet consistent = merge(space, context, all_props);
    std::vector<std::string> names;
    for (const auto& name : space.prop_names()) {
      MeaningVector pv = proposition_vector(space, name);
      if (consistent.contains(pv)) names.push_back(name);
    }
    j["consistent_propositions"] = names;
    if (!consistent.empty()) j["centroid_probability"] = probability(space, centroid(consistent));
  }
  if (as_json) {
    out << j.dump(2) << '\n';
    return;
  }
  out << "formula: " << j["formula"].get<std::string>() << '\n';
  out << "probability: " << p << '\n';
  out << "vector:";
  for (double x : v.v) out << ' ' << x;
  out << '\n';
  if (as_set) {
    out << "consistent propositions:";
    for (const auto& n : j["consistent_propositions"]) out << ' ' << n.get<std::string>();
    out << '\n';
    if (j.contains("centroid_probability"))
      out << "centroid probability: " << j["centroid_probability"].get<double>() << '\n';
  }
}

}  // namespace detail

inline int run(std::vector<std::string> args) {
  CLI::App app{"Distributional meaning spaces: sampling, composition, selection, and an SRN "
               "comprehension model"};
  app.require_subcommand(1);
  unsigned threads = thread_limit();

  // ---- sample ----
  struct {
    std::string spec, out;
    std::size_t models = 10000, restart_cap = 10000;
    std::uint64_t seed = 42;
  } s;
  auto* sample_cmd = app.add_subcommand("sample", "Sample a meaning space from a world spec");
  sample_cmd->add_option("--spec", s.spec, "world spec file")->required();
  sample_cmd->add_option("--models", s.models, "number of models");
  sample_cmd->add_option("--seed", s.seed, "RNG seed");
  sample_cmd->add_option("--restart-cap", s.restart_cap, "restart attempts per model");
  sample_cmd->add_option("--out", s.out, "output TSV")->required();

  // ---- select ----
  struct {
    std::string space, out, report;
    std::size_t k = 150, iters = 50;
    std::uint64_t seed = 7;
  } sel;
  auto* select_cmd = app.add_subcommand("select", "Reduce a space to k models");
  select_cmd->add_option("--space", sel.space, "input space TSV")->required();
  select_cmd->add_option("--k", sel.k, "target model count");
  select_cmd->add_option("--iters", sel.iters, "candidate subsets to draw");
  select_cmd->add_option("--seed", sel.seed, "RNG seed");
  select_cmd->add_option("--out", sel.out, "output TSV")->required();
  select_cmd->add_option("--report", sel.report, "selection report JSON");

  // ---- query ----
  struct {
    std::string space, formula, spec, out;
    bool json = false, as_set = false;
  } q;
  auto* query_cmd = app.add_subcommand("query", "Probability and meaning vector of a formula");
  query_cmd->add_option("--space", q.space, "space TSV")->required();
  query_cmd->add_option("--formula", q.formula, "formula text")->required();
  query_cmd->add_option("--spec", q.spec, "world spec (defaults to the space's manifest)");
  query_cmd->add_flag("--json", q.json, "machine-readable output");
  query_cmd->add_flag("--as-set", q.as_set, "also report the set-theoretic reading");
  query_cmd->add_option("--out", q.out, "write output to a file instead of stdout");

  // ---- infer ----
  struct {
    std::string space, given, target, spec;
    bool json = false;
  } inf;
  auto* infer_cmd = app.add_subcommand("infer", "Inference score between two formulas");
  infer_cmd->add_option("--space", inf.space, "space TSV")->required();
  infer_cmd->add_option("--given", inf.given, "conditioning formula")->required();
  infer_cmd->add_option("--target", inf.target, "inferred formula")->required();
  infer_cmd->add_option("--spec", inf.spec, "world spec (defaults to the space's manifest)");
  infer_cmd->add_flag("--json", inf.json, "machine-readable output");

  // ---- gen-language ----
  struct {
    std::string space, spec, out;
  } gl;
  auto* gen_cmd = app.add_subcommand("gen-language", "Generate the training corpus");
  gen_cmd->add_option("--space", gl.space, "space TSV")->required();
  gen_cmd->add_option("--spec", gl.spec, "world spec (defaults to the space's manifest)");
  gen_cmd->add_option("--out", gl.out, "output JSONL")->required();

  // ---- train ----
  struct {
    std::string items, space, out, loss_out;
    std::size_t hidden = 120;
    TrainConfig cfg;
  } tr;
  auto* train_cmd = app.add_subcommand("train", "Train the recurrent network");
  train_cmd->add_option("--items", tr.items, "items JSONL")->required();
  train_cmd->add_option("--space", tr.space, "space TSV")->required();
  train_cmd->add_option("--hidden", tr.hidden, "hidden units");
  train_cmd->add_option("--epochs", tr.cfg.epochs, "training epochs");
  train_cmd->add_option("--lr", tr.cfg.learning_rate, "learning rate");
  train_cmd->add_option("--momentum", tr.cfg.momentum, "momentum coefficient");
  train_cmd->add_option("--zer", tr.cfg.zero_error_radius, "zero error radius");
  train_cmd->add_option("--bound", tr.cfg.update_bound, "per-component update bound");
  train_cmd->add_option("--init-range", tr.cfg.init_range, "weight init range");
  train_cmd->add_option("--seed", tr.cfg.seed, "RNG seed");
  train_cmd->add_option("--out", tr.out, "output network JSON")->required();
  train_cmd->add_option("--loss-out", tr.loss_out, "per-epoch loss CSV");

  // ---- evaluate ----
  struct {
    std::string net, items, space;
    bool json = false;
  } ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Cosine/inference metrics of a trained network");
  eval_cmd->add_option("--net", ev.net, "network JSON")->required();
  eval_cmd->add_option("--items", ev.items, "items JSONL")->required();
  eval_cmd->add_option("--space", ev.space, "space TSV")->required();
  eval_cmd->add_flag("--json", ev.json, "machine-readable output");

  // ---- trace ----
  struct {
    std::string net, space, utterance, props, out;
  } trc;
  auto* trace_cmd = app.add_subcommand("trace", "Word-by-word inference/surprisal/entropy trace");
  trace_cmd->add_option("--net", trc.net, "network JSON")->required();
  trace_cmd->add_option("--space", trc.space, "space TSV")->required();
  trace_cmd->add_option("--utterance", trc.utterance, "words separated by spaces")->required();
  trace_cmd->add_option("--props", trc.props, "tracked propositions, comma separated");
  trace_cmd->add_option("--out", trc.out, "output CSV")->required();

  // ---- reproduce ----
  struct {
    std::string spec = "data/restaurant.dfs", out;
    std::uint64_t seed = 42;
    std::size_t models = 10000, k = 150, iters = 50, epochs = 10000, train_seeds = 3;
    bool check = false;
  } rep;
  auto* rep_cmd = app.add_subcommand("reproduce", "Run the full pipeline and acceptance report");
  rep_cmd->add_option("--spec", rep.spec, "world spec file");
  rep_cmd->add_option("--seed", rep.seed, "master seed (sampling)");
  rep_cmd->add_option("--models", rep.models, "sampled model count");
  rep_cmd->add_option("--k", rep.k, "selected model count");
  rep_cmd->add_option("--iters", rep.iters, "selection iterations");
  rep_cmd->add_option("--epochs", rep.epochs, "training epochs");
  rep_cmd->add_option("--train-seeds", rep.train_seeds, "number of training seeds");
  rep_cmd->add_option("--out", rep.out, "output directory")->required();
  rep_cmd->add_flag("--check", rep.check, "exit non-zero unless all criteria pass");

  std::vector<const char*> argv;
  argv.push_back("dfs");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  detail::Timer timer;
  try {
    if (*sample_cmd) {
      WorldSpec spec = load_spec_file(s.spec);
      SamplerConfig cfg;
      cfg.models = s.models;
      cfg.seed = s.seed;
      cfg.restart_cap = s.restart_cap;
      cfg.threads = threads;
      std::size_t restarts = 0;
      MeaningSpace space = sample_space(spec, cfg, &restarts);
      write_space_tsv(space, s.out);
      RunManifest manifest;
      manifest.subcommand = "sample";
      manifest.argv = args;
      manifest.seeds["sample"] = s.seed;
      manifest.add_input(s.spec);
      manifest.add_output(s.out);
      manifest.duration_seconds = timer.seconds();
      manifest.write(s.out);
      std::cout << "sampled " << space.num_models() << " models over " << space.num_props()
                << " propositions (" << restarts << " restarts) -> " << s.out << '\n';
    } else if (*select_cmd) {
      MeaningSpace space = read_space_tsv_file(sel.space);
      SelectionConfig cfg;
      cfg.k = sel.k;
      cfg.iterations = sel.iters;
      cfg.seed = sel.seed;
      SelectionReport report;
      MeaningSpace reduced = select_models(space, cfg, &report);
      write_space_tsv(reduced, sel.out);
      if (!sel.report.empty()) {
        nlohmann::json j;
        j["k"] = report.k;
        j["iterations"] = report.iterations;
        j["achieved_rho"] = report.best_rho;
        j["best_iteration"] = report.best_iteration;
        j["survivors"] = report.survivors;
        j["rejected_zero_column"] = report.rejected_zero_column;
        j["rejected_hard_constraints"] = report.rejected_hard_constraints;
        std::ofstream out(sel.report, std::ios::binary);
        if (!out) throw IoError("cannot write " + sel.report);
        out << j.dump(2) << '\n';
      }
      RunManifest manifest;
      manifest.subcommand = "select";
      manifest.argv = args;
      manifest.seeds["select"] = sel.seed;
      manifest.add_input(sel.space);
      manifest.add_output(sel.out);
      if (!sel.report.empty()) manifest.add_output(sel.report);
      // carry the world-spec reference forward for downstream commands
      std::string upstream = spec_path_from_manifest(sel.space);
      if (!upstream.empty()) manifest.inputs.emplace_back(upstream, digest_file(upstream));
      manifest.duration_seconds = timer.seconds();
      manifest.write(sel.out);
      std::cout << "selected " << reduced.num_models() << " of " << space.num_models()
                << " models, rho=" << report.best_rho << " -> " << sel.out << '\n';
    } else if (*query_cmd) {
      MeaningSpace space = read_space_tsv_file(q.space);
      WorldSpec spec = detail::resolve_spec(q.spec, q.space);
      if (q.out.empty()) {
        detail::report_probability(space, spec, q.formula, q.json, q.as_set, std::cout);
      } else {
        std::ofstream out(q.out, std::ios::binary);
        if (!out) throw IoError("cannot write " + q.out);
        detail::report_probability(space, spec, q.formula, q.json, q.as_set, out);
      }
    } else if (*infer_cmd) {
      MeaningSpace space = read_space_tsv_file(inf.space);
      WorldSpec spec = detail::resolve_spec(inf.spec, inf.space);
      MeaningVector target = eval_formula(space, spec, inf.target);
      MeaningVector given = eval_formula(space, spec, inf.given);
      double score = inference_score(space, target, given);
      if (inf.json) {
        nlohmann::json j;
        j["target"] = inf.target;
        j["given"] = inf.given;
        j["inference"] = score;
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "inference(" << inf.target << " | " << inf.given << ") = " << score << '\n';
      }
    } else if (*gen_cmd) {
      MeaningSpace space = read_space_tsv_file(gl.space);
      WorldSpec spec = detail::resolve_spec(gl.spec, gl.space);
      auto items = generate_items(space, spec);
      write_items_jsonl(items, gl.out);
      RunManifest manifest;
      manifest.subcommand = "gen-language";
      manifest.argv = args;
      manifest.add_input(gl.space);
      manifest.add_output(gl.out);
      manifest.duration_seconds = timer.seconds();
      manifest.write(gl.out);
      std::cout << "generated " << items.size() << " items -> " << gl.out << '\n';
    } else if (*train_cmd) {
      MeaningSpace space = read_space_tsv_file(tr.space);
      auto stored = read_items_jsonl(tr.items);
      Lexicon lexicon = Lexicon::restaurant();
      std::vector<EncodedItem> encoded;
      for (const auto& item : stored) {
        EncodedItem e;
        for (const auto& w : item.words) e.words.push_back(lexicon.index_of(w));
        e.target = item.target;
        if (e.target.size() != space.num_models())
          throw IoError("item target length does not match the space");
        encoded.push_back(std::move(e));
      }
      Rng rng(tr.cfg.seed);
      Srn net = init_network(lexicon.size(), tr.hidden, space.num_models(), tr.cfg, rng);
      auto losses = train(net, encoded, tr.cfg);
      save_network(net, lexicon, tr.out);
      if (!tr.loss_out.empty()) {
        std::ofstream out(tr.loss_out, std::ios::binary);
        if (!out) throw IoError("cannot write " + tr.loss_out);
        out << "epoch,loss\n";
        for (std::size_t i = 0; i < losses.size(); ++i) out << i + 1 << ',' << losses[i] << '\n';
      }
      RunManifest manifest;
      manifest.subcommand = "train";
      manifest.argv = args;
      manifest.seeds["train"] = tr.cfg.seed;
      manifest.add_input(tr.items);
      manifest.add_input(tr.space);
      manifest.add_output(tr.out);
      manifest.duration_seconds = timer.seconds();
      manifest.write(tr.out);
      std::cout << "trained " << tr.cfg.epochs << " epochs, final loss "
                << (losses.empty() ? 0.0 : losses.back()) << " -> " << tr.out << '\n';
    } else if (*eval_cmd) {
      auto [net, lexicon] = load_network(ev.net);
      MeaningSpace space = read_space_tsv_file(ev.space);
      auto stored = read_items_jsonl(ev.items);
      std::vector<EncodedItem> encoded;
      std::vector<std::vector<double>> targets;
      std::vector<std::size_t> own;
      std::unordered_map<std::string, std::size_t> slot;
      for (const auto& item : stored) {
        EncodedItem e;
        for (const auto& w : item.words) e.words.push_back(lexicon.index_of(w));
        e.target = item.target;
        auto [it, fresh] = slot.emplace(item.semantics_text, targets.size());
        if (fresh) targets.push_back(item.target);
        own.push_back(it->second);
        encoded.push_back(std::move(e));
      }
      EvalSummary summary = evaluate(net, encoded, targets, own, space);
      if (ev.json) {
        nlohmann::json j;
        j["items"] = encoded.size();
        j["top1_fraction"] = summary.top1_fraction;
        j["mean_cosine"] = summary.mean_cosine;
        j["mean_inference"] = summary.mean_inference;
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "items: " << encoded.size() << "\ntop-1: " << summary.top1_fraction
                  << "\nmean cosine: " << summary.mean_cosine
                  << "\nmean inference: " << summary.mean_inference << '\n';
      }
    } else if (*trace_cmd) {
      auto [net, lexicon] = load_network(trc.net);
      MeaningSpace space = read_space_tsv_file(trc.space);
      std::vector<std::string> props = detail::split_props(trc.props);
      auto records = trace(net, space, split_utterance(trc.utterance), lexicon,
                           tracked_vectors(space, props));
      write_trace_csv(records, props, trc.out);
      RunManifest manifest;
      manifest.subcommand = "trace";
      manifest.argv = args;
      manifest.add_input(trc.net);
      manifest.add_input(trc.space);
      manifest.add_output(trc.out);
      manifest.duration_seconds = timer.seconds();
      manifest.write(trc.out);
      std::cout << "traced " << records.size() << " words -> " << trc.out << '\n';
    } else if (*rep_cmd) {
      namespace fs = std::filesystem;
      fs::create_directories(rep.out);
      fs::create_directories(fs::path(rep.out) / "traces");

      PipelineConfig cfg;
      cfg.spec_path = rep.spec;
      cfg.sample_models = rep.models;
      cfg.sample_seed = rep.seed;
      cfg.select_k = rep.k;
      cfg.select_iterations = rep.iters;
      cfg.select_seed = rep.seed + 1;
      cfg.train.epochs = rep.epochs;
      cfg.train_seeds.clear();
      for (std::size_t i = 0; i < rep.train_seeds; ++i) cfg.train_seeds.push_back(rep.seed + 10 + i);
      cfg.threads = threads;

      std::cout << "sampling " << cfg.sample_models << " models..." << std::endl;
      PipelineResult run = run_pipeline(cfg);
      std::cout << "selection rho=" << run.selection.best_rho << "; training "
                << cfg.train_seeds.size() << " seeds x " << cfg.train.epochs << " epochs..."
                << std::endl;

      auto out_path = [&](const std::string& name) { return (fs::path(rep.out) / name).string(); };
      write_space_tsv(run.space_full, out_path("space_full.tsv"));
      write_space_tsv(run.space_reduced, out_path("space_reduced.tsv"));
      write_items_jsonl(run.items, out_path("items.jsonl"));
      for (const auto& tn : run.nets)
        save_network(tn.net, run.corpus.lexicon, out_path("net_seed" + std::to_string(tn.seed) + ".json"));

      // Figure data tables from the best-performing network.
      std::size_t best = 0;
      for (std::size_t i = 1; i < run.nets.size(); ++i)
        if (run.nets[i].eval.mean_inference > run.nets[best].eval.mean_inference) best = i;
      for (const auto& fig : figure_traces()) {
        auto records = trace(run.nets[best].net, run.space_reduced,
                             split_utterance(fig.utterance), run.corpus.lexicon,
                             tracked_vectors(run.space_reduced, fig.tracked));
        write_trace_csv(records, fig.tracked,
                        (fs::path(rep.out) / "traces" / (fig.name + ".csv")).string());
      }

      auto criteria = check_all(run);
      nlohmann::json report;
      report["toolkit_version"] = kVersion;
      report["seed"] = rep.seed;
      report["sampler_restarts"] = run.sampler_restarts;
      report["selection_rho"] = run.selection.best_rho;
      report["trace_network_seed"] = run.nets[best].seed;
      bool all_pass = true;
      nlohmann::json jc = nlohmann::json::array();
      for (const auto& c : criteria) {
        jc.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"details", c.details}});
        if (!c.pass) all_pass = false;
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": "
                  << c.details << '\n';
      }
      report["criteria"] = jc;
      report["all_pass"] = all_pass;
      {
        std::ofstream out(out_path("acceptance.json"), std::ios::binary);
        out << report.dump(2) << '\n';
      }
      RunManifest manifest;
      manifest.subcommand = "reproduce";
      manifest.argv = args;
      manifest.seeds["sample"] = cfg.sample_seed;
      manifest.seeds["select"] = cfg.select_seed;
      manifest.seeds["train"] = cfg.train_seeds;
      manifest.add_input(rep.spec);
      manifest.add_output(out_path("space_full.tsv"));
      manifest.add_output(out_path("space_reduced.tsv"));
      manifest.add_output(out_path("items.jsonl"));
      manifest.add_output(out_path("acceptance.json"));
      manifest.duration_seconds = timer.seconds();
      manifest.write(out_path("acceptance.json"));
      std::cout << (all_pass ? "all criteria passed" : "some criteria FAILED") << " ("
                << manifest.duration_seconds << " s)\n";
      if (rep.check && !all_pass) return kAcceptance;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

}  // namespace dfs::cli
