#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "dfs/pipeline.hpp"

namespace dfs {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string details;
};

// ---------------------------------------------------------------------------
// Random formula generator over a spec with a single sort; used by the
// complement-duality and algebra property suites. Independent of the
// complement/satisfies implementation it checks.

inline FormulaPtr random_formula(Rng& rng, const WorldSpec& spec, int depth,
                                 std::vector<std::pair<std::string, std::string>>& scope) {
  const auto& sorts = spec.sorts;
  if (depth <= 0 || rng.next_below(8) == 0) {
    // leaf: an atom over a constant or an in-scope variable, or top/bottom
    std::uint64_t leaf = rng.next_below(10);
    if (leaf == 8) return Formula::top();
    if (leaf == 9) return Formula::bottom();
    const auto& pred = spec.predicates[rng.next_below(spec.predicates.size())];
    std::vector<Term> args;
    for (const auto& arg_sort : pred.arg_sorts) {
      std::vector<const std::pair<std::string, std::string>*> fitting;
      for (const auto& v : scope)
        if (spec.sort_subsumes(arg_sort, v.second)) fitting.push_back(&v);
      if (!fitting.empty() && rng.next_below(2) == 0) {
        const auto* v = fitting[rng.next_below(fitting.size())];
        args.push_back(Term::variable(v->first, v->second));
      } else {
        const auto& constants = spec.find_sort(arg_sort)->constants;
        args.push_back(Term::constant(constants[rng.next_below(constants.size())], arg_sort));
      }
    }
    return Formula::atom(pred.name, std::move(args));
  }
  switch (rng.next_below(9)) {
    case 0: return Formula::negation(random_formula(rng, spec, depth - 1, scope));
    case 1:
      return Formula::conjunction(random_formula(rng, spec, depth - 1, scope),
                                  random_formula(rng, spec, depth - 1, scope));
    case 2:
      return Formula::disjunction(random_formula(rng, spec, depth - 1, scope),
                                  random_formula(rng, spec, depth - 1, scope));
    case 3:
      return Formula::exclusive_or(random_formula(rng, spec, depth - 1, scope),
                                   random_formula(rng, spec, depth - 1, scope));
    case 4:
      return Formula::implies(random_formula(rng, spec, depth - 1, scope),
                              random_formula(rng, spec, depth - 1, scope));
    case 5:
      return Formula::iff(random_formula(rng, spec, depth - 1, scope),
                          random_formula(rng, spec, depth - 1, scope));
    default: {
      bool universal = rng.next_below(2) == 0;
      const auto& sort = sorts[rng.next_below(sorts.size())];
      std::string var = "v" + std::to_string(scope.size());
      scope.emplace_back(var, sort.name);
      FormulaPtr body = random_formula(rng, spec, depth - 1, scope);
      scope.pop_back();
      return universal ? Formula::forall(var, sort.name, std::move(body))
                       : Formula::exists(var, sort.name, std::move(body));
    }
  }
}

inline FormulaPtr random_formula(Rng& rng, const WorldSpec& spec, int depth) {
  std::vector<std::pair<std::string, std::string>> scope;
  return random_formula(rng, spec, depth, scope);
}

// Tiny world with n unary ground atoms, for exhaustive partition checks.
inline WorldSpec tiny_spec(std::size_t num_constants) {
  std::string constants;
  for (std::size_t i = 0; i < num_constants; ++i) {
    if (i) constants += ", ";
    constants += 'a' + static_cast<char>(i);
  }
  return load_spec_string("sort thing = " + constants + "\npredicate p(thing)\nprob * = 0.5\n");
}

// Criterion 1: for every partition of the proposition set into a Light and
// a Dark model, the Dark World satisfies the complement of a formula exactly
// when the Light World does not satisfy the formula.
inline CriterionResult check_complement_duality(std::size_t formulas_per_world = 1200,
                                                std::uint64_t seed = 2024) {
  CriterionResult r{"1", "complement duality oracle", true, ""};
  Rng rng(seed);
  std::size_t checks = 0, failures = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    WorldSpec spec = tiny_spec(n);
    const auto& props = spec.propositions();
    for (std::size_t i = 0; i < formulas_per_world; ++i) {
      FormulaPtr f = random_formula(rng, spec, 4);
      FormulaPtr comp = complement(f);
      for (std::uint64_t mask = 0; mask < (1ull << props.size()); ++mask) {
        std::vector<std::string> light_atoms, dark_atoms;
        for (std::size_t p = 0; p < props.size(); ++p)
          ((mask >> p) & 1 ? light_atoms : dark_atoms).push_back(props[p].name);
        Model light(spec, light_atoms), dark(spec, dark_atoms);
        ++checks;
        if (satisfies(dark, comp) != !satisfies(light, f)) ++failures;
      }
    }
  }
  r.pass = failures == 0;
  std::ostringstream os;
  os << checks << " partition/formula checks, " << failures << " failures";
  r.details = os.str();
  return r;
}

// Criterion 2: on a 4-model toy space the component-sum definitions of prior
// and conjunctive probability coincide exactly with model counting, for all
// binary vectors and all pairs.
inline CriterionResult check_probability_equivalence() {
  CriterionResult r{"2", "probability equals set counting on the toy space", true, ""};
  MeaningSpace space({"p", "q", "r"}, 4);
  const bool matrix[4][3] = {{1, 0, 1}, {0, 1, 1}, {1, 1, 0}, {0, 0, 0}};
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t p = 0; p < 3; ++p)
      if (matrix[m][p]) space.set_bit(m, p);

  std::size_t checks = 0, failures = 0;
  auto vec = [&](unsigned bits) {
    MeaningVector v;
    v.binary = true;
    for (std::size_t m = 0; m < 4; ++m) v.v.push_back((bits >> m) & 1 ? 1.0 : 0.0);
    return v;
  };
  for (unsigned a = 0; a < 16; ++a) {
    double by_sum = probability(space, vec(a));
    double by_count = static_cast<double>(__builtin_popcount(a)) / 4.0;
    ++checks;
    if (by_sum != by_count) ++failures;
    for (unsigned b = 0; b < 16; ++b) {
      double conj = conj_probability(space, vec(a), vec(b));
      double count = static_cast<double>(__builtin_popcount(a & b)) / 4.0;
      ++checks;
      if (conj != count) ++failures;
    }
  }
  r.pass = failures == 0;
  r.details = std::to_string(checks) + " exact comparisons, " + std::to_string(failures) +
              " failures";
  return r;
}

// Criterion 3: algebra invariants as property suites over a sampled space.
inline CriterionResult check_algebra_invariants(const WorldSpec& spec, const MeaningSpace& space,
                                                std::size_t rounds = 400,
                                                std::uint64_t seed = 77) {
  CriterionResult r{"3", "meaning-space algebra invariants", true, ""};
  Rng rng(seed);
  std::size_t failures = 0;
  std::ostringstream why;
  const double max_entropy = std::log2(static_cast<double>(model_identifying_vectors(space).size()));

  auto random_real = [&]() {
    MeaningVector v;
    v.v.resize(space.num_models());
    for (auto& x : v.v) x = rng.next_unit();
    return v;
  };
  auto check = [&](bool ok, const char* what) {
    if (!ok) {
      ++failures;
      why << what << "; ";
    }
  };

  for (std::size_t i = 0; i < rounds; ++i) {
    FormulaPtr f = random_formula(rng, spec, 3);
    FormulaPtr g = random_formula(rng, spec, 3);
    auto vf = eval_formula(space, spec, f);
    auto vg = eval_formula(space, spec, g);
    check(eval_formula(space, spec,
                       Formula::negation(Formula::conjunction(f, g))) ==
              eval_formula(space, spec,
                           Formula::disjunction(Formula::negation(f), Formula::negation(g))),
          "De Morgan");
    check(eval_formula(space, spec, Formula::negation(Formula::negation(f))) == vf,
          "double negation");
    check(probability(space, eval_formula(space, spec, Formula::negation(f))) ==
              1.0 - probability(space, vf),
          "P(!f) = 1 - P(f)");
    double pf = probability(space, vf), pg = probability(space, vg);
    double conj = conj_probability(space, vf, vg);
    check(conj <= std::min(pf, pg) + 1e-12, "P(f&g) <= min");
    if (pg > 0) {
      double score = inference_score(space, vf, vg);
      check(score >= -1.0 - 1e-12 && score <= 1.0 + 1e-12, "inference range");
      bool entailed = cond_probability(space, vf, vg) == 1.0;
      // binary columns: P(f|g)=1 iff g's models are a subset of f's
      bool subset = true;
      for (std::size_t m = 0; m < space.num_models(); ++m)
        if (vg.v[m] == 1.0 && vf.v[m] != 1.0) subset = false;
      check(entailed == subset, "entailment iff conditional 1");
      if (pf > 0 && pf < 1.0) check(entailed == (score == 1.0), "score 1 iff entailed");
    }
    MeaningVector a = random_real();
    MeaningVector b = random_real();
    check(conj_probability(space, a, a) == probability(space, a), "P(a&a) = P(a)");
    if (probability(space, a) > 0) {
      double h = entropy(space, a);
      check(h >= -1e-9 && h <= max_entropy + 1e-9, "entropy range");
      check(surprisal(space, a, b) >= -1e-12, "surprisal nonnegative");
    }
  }

  // quantifier expansion equals the explicit connective chain
  const auto& sort = spec.sorts.front();
  for (std::size_t i = 0; i < 40 && !sort.constants.empty(); ++i) {
    std::vector<std::pair<std::string, std::string>> scope{{"qv", sort.name}};
    FormulaPtr body = random_formula(rng, spec, 2, scope);
    FormulaPtr all = Formula::forall("qv", sort.name, body);
    FormulaPtr some = Formula::exists("qv", sort.name, body);
    FormulaPtr conj, disj;
    for (const auto& c : sort.constants) {
      FormulaPtr inst = substitute(body, "qv", Term::constant(c, sort.name));
      conj = conj ? Formula::conjunction(conj, inst) : inst;
      disj = disj ? Formula::disjunction(disj, inst) : inst;
    }
    check(eval_formula(space, spec, all) == eval_formula(space, spec, conj),
          "forall = conjunction chain");
    check(eval_formula(space, spec, some) == eval_formula(space, spec, disj),
          "exists = disjunction chain");
  }

  r.pass = failures == 0;
  r.details = failures == 0 ? "all property suites passed"
                            : std::to_string(failures) + " failures: " + why.str();
  return r;
}

// ---------------------------------------------------------------------------
// Pipeline-level criteria (4..9) evaluated on a finished run.

inline CriterionResult check_sampler_soundness(const WorldSpec& spec, const MeaningSpace& space,
                                               std::size_t model_limit = 1000) {
  CriterionResult r{"4", "sampler soundness and totality", true, ""};
  auto ground = ground_constraints(spec);
  std::size_t checked = 0, violations = 0;
  std::size_t limit = std::min(model_limit, space.num_models());
  for (std::size_t m = 0; m < limit; ++m) {
    std::vector<std::string> atoms;
    for (std::size_t p = 0; p < space.num_props(); ++p)
      if (space.bit(m, p)) atoms.push_back(space.prop_names()[p]);
    Model model(spec, atoms);
    for (const auto& c : ground) {
      ++checked;
      if (!satisfies(model, c)) ++violations;
    }
  }
  r.pass = violations == 0;
  r.details = std::to_string(limit) + " models x " + std::to_string(ground.size()) +
              " ground constraints, " + std::to_string(violations) +
              " violations; every proposition decided by construction";
  return r;
}

inline CriterionResult check_directional_inference(const WorldSpec& spec,
                                                   const MeaningSpace& space) {
  CriterionResult r{"5", "directional world structure", true, ""};
  auto salad = eval_formula(space, spec, "order(mike,salad)");
  auto bar = eval_formula(space, spec, "enter(mike,bar)");
  auto restaurant = eval_formula(space, spec, "enter(mike,restaurant)");
  double neg = inference_score(space, salad, bar);
  double pos = inference_score(space, salad, restaurant);
  bool neg_ok = neg >= -0.39 - 0.15 && neg <= -0.39 + 0.15;
  bool pos_ok = pos >= 0.33 - 0.15 && pos <= 0.33 + 0.15;
  r.pass = neg_ok && pos_ok;
  std::ostringstream os;
  os << "inference(salad,bar)=" << neg << " (want -0.39 +/- 0.15), inference(salad,restaurant)="
     << pos << " (want +0.33 +/- 0.15)";
  r.details = os.str();
  return r;
}

inline CriterionResult check_selection(const SelectionReport& report,
                                       const MeaningSpace& full, const MeaningSpace& reduced) {
  CriterionResult r{"6", "model selection fidelity", true, ""};
  bool hard_ok = true;
  auto orig = inference_vector(full);
  auto red = inference_vector(reduced);
  for (std::size_t i = 0; i < orig.size(); ++i)
    if ((orig[i] == 1.0) != (red[i] == 1.0) || (orig[i] == -1.0) != (red[i] == -1.0))
      hard_ok = false;
  r.pass = report.best_rho >= 0.85 && hard_ok && reduced.num_models() == report.k;
  std::ostringstream os;
  os << "rho=" << report.best_rho << " (want >= 0.85), +/-1 sets " << (hard_ok ? "preserved" : "BROKEN")
     << ", survivors " << report.survivors << "/" << report.iterations;
  r.details = os.str();
  return r;
}

inline CriterionResult check_language(const std::vector<TrainingItem>& items) {
  CriterionResult r{"7", "language inventory", true, ""};
  std::unordered_set<std::string> utterances, semantics, vocabulary;
  bool nonzero = true;
  for (const auto& item : items) {
    utterances.insert(join_words(item.words));
    semantics.insert(item.semantics_text);
    for (const auto& w : item.words) vocabulary.insert(w);
    bool any = false;
    for (double x : item.target.v)
      if (x != 0.0) any = true;
    if (!any) nonzero = false;
  }
  r.pass = items.size() == 278 && utterances.size() == 278 && semantics.size() == 270 &&
           vocabulary.size() == 30 && nonzero;
  std::ostringstream os;
  os << items.size() << " items, " << utterances.size() << " unique utterances (want 278), "
     << semantics.size() << " unique semantics (want 270), " << vocabulary.size()
     << " vocabulary tokens (want 30), targets " << (nonzero ? "all non-zero" : "ZERO FOUND");
  r.details = os.str();
  return r;
}

inline CriterionResult check_training(const std::vector<TrainedNet>& nets) {
  CriterionResult r{"8", "network training metrics (2/3 seeds)", true, ""};
  std::size_t passing = 0;
  std::ostringstream os;
  for (const auto& tn : nets) {
    bool ok = tn.eval.top1_fraction >= 0.95 && tn.eval.mean_inference >= 0.80;
    if (ok) ++passing;
    os << "seed " << tn.seed << ": top1=" << tn.eval.top1_fraction
       << " cos=" << tn.eval.mean_cosine << " inf=" << tn.eval.mean_inference
       << (ok ? " pass; " : " fail; ");
  }
  r.pass = passing * 3 >= nets.size() * 2;  // at least 2 of 3
  r.details = os.str();
  return r;
}

inline std::vector<CriterionResult> check_phenomena(const std::vector<PhenomenaResult>& probes) {
  auto rule = [&](const char* id, const char* title, auto getter) {
    CriterionResult r{id, title, true, ""};
    std::size_t passing = 0;
    std::ostringstream os;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      bool ok = getter(probes[i]);
      if (ok) ++passing;
      os << "net" << i << (ok ? " pass; " : " fail; ");
    }
    r.pass = passing * 3 >= probes.size() * 2;
    r.details = os.str();
    return r;
  };
  std::vector<CriterionResult> out;
  out.push_back(rule("9a", "negation pattern (2/3 seeds)",
                     [](const PhenomenaResult& p) { return p.negation; }));
  out.push_back(rule("9b", "presupposition pattern (2/3 seeds)",
                     [](const PhenomenaResult& p) { return p.presupposition; }));
  out.push_back(rule("9c", "anaphora surprisal ordering (2/3 seeds)",
                     [](const PhenomenaResult& p) { return p.anaphora; }));
  out.push_back(rule("9d", "quantification surprisal/entropy ordering (2/3 seeds)",
                     [](const PhenomenaResult& p) { return p.quantification; }));
  return out;
}

// Every acceptance criterion against a finished pipeline run. Criteria 1-3
// are self-contained property suites; 4-9 read the run's artifacts.
inline std::vector<CriterionResult> check_all(const PipelineResult& run) {
  std::vector<CriterionResult> results;
  results.push_back(check_complement_duality());
  results.push_back(check_probability_equivalence());
  results.push_back(check_algebra_invariants(run.spec, run.space_reduced));
  results.push_back(check_sampler_soundness(run.spec, run.space_full));
  results.push_back(check_directional_inference(run.spec, run.space_full));
  results.push_back(check_selection(run.selection, run.space_full, run.space_reduced));
  results.push_back(check_language(run.items));
  results.push_back(check_training(run.nets));
  for (auto& r : check_phenomena(run.phenomena)) results.push_back(std::move(r));
  return results;
}

}  // namespace dfs
