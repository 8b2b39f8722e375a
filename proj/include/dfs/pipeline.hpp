#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <unordered_map>
#include <vector>

#include "dfs/language.hpp"
#include "dfs/meaning_space.hpp"
#include "dfs/sampler.hpp"
#include "dfs/selection.hpp"
#include "dfs/spec_loader.hpp"
#include "dfs/srn.hpp"

namespace dfs {

struct PipelineConfig {
  std::string spec_path = "data/restaurant.dfs";
  std::size_t sample_models = 10000;
  std::uint64_t sample_seed = 42;
  std::size_t restart_cap = 10000;
  std::size_t select_k = 150;
  std::size_t select_iterations = 50;
  std::uint64_t select_seed = 7;
  std::size_t hidden_units = 120;
  std::vector<std::uint64_t> train_seeds = {1, 2, 3};
  TrainConfig train;
  unsigned threads = 1;
};

// The language corpus keyed for the network: word index sequences, the
// distinct target inventory, and each item's own target slot.
struct EncodedCorpus {
  Lexicon lexicon;
  std::vector<EncodedItem> encoded;
  std::vector<std::vector<double>> distinct_targets;
  std::vector<std::size_t> own_target;
};

inline EncodedCorpus encode_corpus(const std::vector<TrainingItem>& items) {
  EncodedCorpus corpus;
  corpus.lexicon = Lexicon::restaurant();
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& item : items) {
    EncodedItem e;
    for (const auto& w : item.words) e.words.push_back(corpus.lexicon.index_of(w));
    e.target = item.target.v;
    auto [it, fresh] = slot.emplace(item.semantics_text, corpus.distinct_targets.size());
    if (fresh) corpus.distinct_targets.push_back(item.target.v);
    corpus.own_target.push_back(it->second);
    corpus.encoded.push_back(std::move(e));
  }
  return corpus;
}

struct TrainedNet {
  std::uint64_t seed = 0;
  Srn net;
  std::vector<double> losses;
  EvalSummary eval;
};

// Seed-parallel training; each seed's run is independent and deterministic.
inline std::vector<TrainedNet> train_networks(const EncodedCorpus& corpus,
                                              const MeaningSpace& space,
                                              const PipelineConfig& cfg) {
  std::vector<TrainedNet> nets(cfg.train_seeds.size());
  auto run_one = [&](std::size_t i) {
    TrainConfig tc = cfg.train;
    tc.seed = cfg.train_seeds[i];
    Rng rng(tc.seed);
    TrainedNet out;
    out.seed = tc.seed;
    out.net = init_network(corpus.lexicon.size(), cfg.hidden_units, space.num_models(), tc, rng);
    out.losses = train(out.net, corpus.encoded, tc);
    out.eval = evaluate(out.net, corpus.encoded, corpus.distinct_targets, corpus.own_target, space);
    nets[i] = std::move(out);
  };
  unsigned threads = cfg.threads == 0 ? 1 : cfg.threads;
  if (threads <= 1) {
    for (std::size_t i = 0; i < nets.size(); ++i) run_one(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = 0; i < nets.size(); ++i)
      jobs.push_back(std::async(std::launch::async, run_one, i));
    for (auto& j : jobs) j.get();
  }
  return nets;
}

// ---------------------------------------------------------------------------
// Phenomena probes (negation, presupposition, anaphora, quantification).

struct PhenomenaResult {
  bool negation = false;
  bool presupposition = false;
  bool anaphora = false;
  bool quantification = false;
  std::string details;
};

inline std::vector<MeaningVector> tracked_vectors(const MeaningSpace& space,
                                                  const std::vector<std::string>& names) {
  std::vector<MeaningVector> out;
  for (const auto& n : names) out.push_back(proposition_vector(space, n));
  return out;
}

inline PhenomenaResult probe_phenomena(const Srn& net, const MeaningSpace& space,
                                       const Lexicon& lexicon) {
  PhenomenaResult r;
  std::ostringstream details;
  auto run = [&](const std::string& utterance, const std::vector<std::string>& props) {
    return trace(net, space, split_utterance(utterance), lexicon, tracked_vectors(space, props));
  };

  {  // negation: no order inferences after "will didnt order", referent stays
    auto t = run("will didnt order",
                 {"order(will,cola)", "order(will,water)", "order(will,fries)", "order(will,salad)",
                  "referent(will)"});
    const auto& last = t.back();
    double max_abs_order = 0;
    for (int i = 0; i < 4; ++i) max_abs_order = std::max(max_abs_order, std::abs(last.prop_inference[i]));
    double ref = last.prop_inference[4];
    r.negation = max_abs_order < 0.2 && ref > 0.8;
    details << "negation: max|inf(order)|=" << max_abs_order << " inf(referent(will))=" << ref
            << (r.negation ? " pass" : " FAIL") << "; ";
  }
  {  // presupposition: definite vs indefinite restaurant under negation
    auto t_def = run("elli didnt enter the restaurant", {"referent(restaurant)"});
    auto t_indef = run("elli didnt enter a restaurant", {"referent(restaurant)"});
    double def = t_def.back().prop_inference[0];
    double indef = t_indef.back().prop_inference[0];
    r.presupposition = def > 0.5 && indef < 0.0;
    details << "presupposition: definite=" << def << " indefinite=" << indef
            << (r.presupposition ? " pass" : " FAIL") << "; ";
  }
  {  // anaphora: "arrived" less surprising than "paid" after the pronoun
    auto t_arr = run("mike called the bartender he arrived", {});
    auto t_paid = run("mike called the bartender he paid", {});
    double s_arr = t_arr.back().surprisal_bits;
    double s_paid = t_paid.back().surprisal_bits;
    r.anaphora = s_arr < s_paid;
    details << "anaphora: S(arrived)=" << s_arr << " S(paid)=" << s_paid
            << (r.anaphora ? " pass" : " FAIL") << "; ";
  }
  {  // quantification: S(she) < S(he); entropy after cola < after water
    auto t_he = run("someone entered the bar he", {});
    auto t_she = run("someone entered the bar she", {});
    auto t_cola = run("someone entered the bar she ordered cola", {});
    auto t_water = run("someone entered the bar she ordered water", {});
    double s_he = t_he.back().surprisal_bits;
    double s_she = t_she.back().surprisal_bits;
    double h_cola = t_cola.back().entropy_bits;
    double h_water = t_water.back().entropy_bits;
    r.quantification = s_she < s_he && h_cola < h_water;
    details << "quantification: S(she)=" << s_she << " S(he)=" << s_he << " H(cola)=" << h_cola
            << " H(water)=" << h_water << (r.quantification ? " pass" : " FAIL");
  }
  r.details = details.str();
  return r;
}

// ---------------------------------------------------------------------------
// Figure trace inventory: the word-by-word probes reported in the paper-style
// analyses, emitted as CSV data tables by the CLI.

struct FigureTrace {
  std::string name;  // file stem
  std::string utterance;
  std::vector<std::string> tracked;
};

inline std::vector<FigureTrace> figure_traces() {
  const std::vector<std::string> referents = {
      "referent(mike)", "referent(will)",      "referent(elli)",   "referent(nancy)",
      "referent(bar)",  "referent(restaurant)", "referent(bartender)", "referent(waiter)"};
  std::vector<FigureTrace> figs;
  figs.push_back({"navigation_cola", "mike entered the bar he ordered cola",
                  {"enter(mike,bar)", "order(mike,cola)", "order(mike,fries)"}});
  figs.push_back({"navigation_fries", "mike entered the bar he ordered fries",
                  {"enter(mike,bar)", "order(mike,cola)", "order(mike,fries)"}});
  figs.push_back({"wordbyword_referents", "someone called the waiter she ordered cola", referents});
  figs.push_back({"negation_assertive", "will ordered water",
                  {"referent(will)", "order(will,cola)", "order(will,water)", "order(will,fries)",
                   "order(will,salad)"}});
  figs.push_back({"negation_negated", "will didnt order water",
                  {"referent(will)", "order(will,cola)", "order(will,water)", "order(will,fries)",
                   "order(will,salad)"}});
  for (const char* variant : {"entered a", "entered the", "didnt enter a", "didnt enter the"}) {
    std::string stem = variant;
    for (auto& c : stem)
      if (c == ' ') c = '_';
    figs.push_back({"presupposition_" + stem, "elli " + std::string(variant) + " restaurant",
                    {"referent(elli)", "referent(restaurant)", "enter(elli,restaurant)"}});
  }
  figs.push_back({"anaphora_pronoun", "mike called the bartender he",
                  {"referent(mike)", "referent(bartender)", "arrive(bartender)", "pay(mike)"}});
  figs.push_back({"anaphora_arrived", "mike called the bartender he arrived",
                  {"referent(mike)", "referent(bartender)", "arrive(bartender)", "pay(mike)"}});
  figs.push_back({"anaphora_paid", "mike called the bartender he paid",
                  {"referent(mike)", "referent(bartender)", "arrive(bartender)", "pay(mike)"}});
  const std::vector<std::string> enters = {"enter(mike,bar)", "enter(will,bar)", "enter(elli,bar)",
                                           "enter(nancy,bar)"};
  figs.push_back({"quantification_he", "someone entered the bar he", enters});
  figs.push_back({"quantification_she", "someone entered the bar she", enters});
  const std::vector<std::string> she_orders = {"enter(elli,bar)",   "enter(nancy,bar)",
                                               "order(elli,cola)",  "order(elli,water)",
                                               "order(nancy,cola)", "order(nancy,water)"};
  figs.push_back({"quantification_cola", "someone entered the bar she ordered cola", she_orders});
  figs.push_back({"quantification_water", "someone entered the bar she ordered water", she_orders});
  return figs;
}

// ---------------------------------------------------------------------------
// Full paper pipeline: sample, select, generate, train, probe.

struct PipelineResult {
  WorldSpec spec;
  MeaningSpace space_full;
  MeaningSpace space_reduced;
  SelectionReport selection;
  std::size_t sampler_restarts = 0;
  std::vector<TrainingItem> items;
  EncodedCorpus corpus;
  std::vector<TrainedNet> nets;
  std::vector<PhenomenaResult> phenomena;  // one per net
};

inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  PipelineResult r;
  r.spec = load_spec_file(cfg.spec_path);

  SamplerConfig sampler;
  sampler.models = cfg.sample_models;
  sampler.seed = cfg.sample_seed;
  sampler.restart_cap = cfg.restart_cap;
  sampler.threads = cfg.threads;
  r.space_full = sample_space(r.spec, sampler, &r.sampler_restarts);

  SelectionConfig select;
  select.k = cfg.select_k;
  select.iterations = cfg.select_iterations;
  select.seed = cfg.select_seed;
  r.space_reduced = select_models(r.space_full, select, &r.selection);

  r.items = generate_items(r.space_reduced, r.spec);
  r.corpus = encode_corpus(r.items);
  r.nets = train_networks(r.corpus, r.space_reduced, cfg);
  for (const auto& tn : r.nets)
    r.phenomena.push_back(probe_phenomena(tn.net, r.space_reduced, r.corpus.lexicon));
  return r;
}

}  // namespace dfs
