#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "dfs/logic.hpp"
#include "dfs/meaning_space.hpp"
#include "dfs/rng.hpp"
#include "dfs/spec_loader.hpp"
#include "dfs/worldspec.hpp"

namespace dfs {

// Light World / Dark World pair under construction: the Light World
// satisfies the atoms decided true, the Dark World the atoms decided false.
struct WorldPair {
  Model light;
  Model dark;
};

struct SamplerConfig {
  std::size_t models = 10000;
  std::uint64_t seed = 42;
  std::size_t restart_cap = 10000;  // attempts per model before giving up
  unsigned threads = 1;             // sampling is per-model deterministic either way
};

struct RestartCapExceeded : Error {
  using Error::Error;
};

namespace detail {

inline void split_conjuncts(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->kind == Formula::Kind::And) {
    split_conjuncts(f->lhs, out);
    split_conjuncts(f->rhs, out);
  } else {
    out.push_back(f);
  }
}

}  // namespace detail

// The ground constraint list: every constraint is grounded and top-level
// conjunctions (universal quantifiers expand to these) are split into one
// constraint per instance. The split matters during sampling: consistency
// is judged per instance, so a falsified instance about one binding does
// not couple with a not-yet-satisfied instance about another.
inline std::vector<FormulaPtr> ground_constraints(const WorldSpec& spec) {
  std::vector<FormulaPtr> out;
  for (const auto& c : spec.constraints) detail::split_conjuncts(ground(c, spec), out);
  return out;
}

// A state of affairs is consistent when every constraint is either satisfied
// by the Light World or not falsified, i.e. its complement is not satisfied
// by the Dark World.
inline bool consistent(const WorldPair& pair, const std::vector<FormulaPtr>& ground_cs) {
  for (const auto& c : ground_cs)
    if (!satisfies(pair.light, c) && satisfies(pair.dark, complement(c))) return false;
  return true;
}

namespace detail {

// Ground constraints are evaluated millions of times during sampling, so
// they are flattened once into postfix programs over proposition indices.
// Opcodes are negative; non-negative entries push the bit of a proposition.
class Program {
 public:
  static constexpr std::int32_t kNot = -1, kAnd = -2, kOr = -3, kXor = -4, kImplies = -5,
                                kIff = -6, kTrue = -7, kFalse = -8;

  static Program compile(const FormulaPtr& ground_formula, const WorldSpec& spec) {
    Program p;
    p.emit(ground_formula, spec);
    return p;
  }

  bool eval(const std::vector<std::uint64_t>& bits) const {
    // Depth never exceeds the formula height; 64 is plenty for generated
    // constraint trees and is re-checked during emission.
    bool stack[64];
    int top = -1;
    for (std::int32_t op : code_) {
      if (op >= 0) {
        stack[++top] = (bits[static_cast<std::size_t>(op) >> 6] >> (op & 63)) & 1u;
        continue;
      }
      switch (op) {
        case kTrue: stack[++top] = true; break;
        case kFalse: stack[++top] = false; break;
        case kNot: stack[top] = !stack[top]; break;
        case kAnd: --top; stack[top] = stack[top] && stack[top + 1]; break;
        case kOr: --top; stack[top] = stack[top] || stack[top + 1]; break;
        case kXor: --top; stack[top] = stack[top] != stack[top + 1]; break;
        case kImplies: --top; stack[top] = !stack[top] || stack[top + 1]; break;
        case kIff: --top; stack[top] = stack[top] == stack[top + 1]; break;
      }
    }
    return stack[0];
  }

 private:
  void emit(const FormulaPtr& f, const WorldSpec& spec) {
    using K = Formula::Kind;
    switch (f->kind) {
      case K::Atom: {
        std::vector<std::string> args;
        args.reserve(f->args.size());
        for (const auto& t : f->args) {
          if (t.is_variable()) throw SpecError("cannot compile a non-ground formula");
          args.push_back(t.name);
        }
        const Proposition* p = spec.find_proposition(atom_name(f->pred, args));
        // Atoms outside the enumerated proposition set are false everywhere.
        code_.push_back(p ? static_cast<std::int32_t>(p->index) : kFalse);
        break;
      }
      case K::Top: code_.push_back(kTrue); break;
      case K::Bottom: code_.push_back(kFalse); break;
      case K::Not:
        emit(f->lhs, spec);
        code_.push_back(kNot);
        break;
      case K::Exists:
      case K::Forall:
        throw SpecError("cannot compile a quantified formula; ground it first");
      default:
        emit(f->lhs, spec);
        emit(f->rhs, spec);
        code_.push_back(f->kind == K::And       ? kAnd
                        : f->kind == K::Or      ? kOr
                        : f->kind == K::Xor     ? kXor
                        : f->kind == K::Implies ? kImplies
                                                : kIff);
        break;
    }
    check_depth();
  }
  void check_depth() const {
    int depth = 0, max_depth = 0;
    for (std::int32_t op : code_) {
      if (op >= 0 || op == kTrue || op == kFalse)
        ++depth;
      else if (op != kNot)
        --depth;
      if (depth > max_depth) max_depth = depth;
    }
    if (max_depth >= 64) throw SpecError("constraint formula too deep to compile");
  }

  std::vector<std::int32_t> code_;
};

}  // namespace detail

// What the sampler decided for one proposition; exposed for tests that
// replay decisions against the consistency predicate.
struct SamplerDecision {
  enum class Kind { Probabilistic, InferredTrue, InferredFalse };
  std::size_t prop_index;
  Kind kind;
  bool value;  // chosen truth for Probabilistic decisions
  std::vector<std::uint64_t> light_before;
  std::vector<std::uint64_t> dark_before;
};
using DecisionObserver = std::function<void(const SamplerDecision&)>;

// Incremental, inference-driven construction of Light/Dark world pairs.
// Prepares compiled constraints and per-proposition probability rules once;
// sample() then draws one model per call from the supplied stream.
class PreparedSampler {
 public:
  explicit PreparedSampler(const WorldSpec& spec) : spec_(spec) {
    for (const auto& g : ground_constraints(spec)) {
      light_.push_back(detail::Program::compile(g, spec));
      dark_complement_.push_back(detail::Program::compile(complement(g), spec));
    }
    // Per-proposition rule table: (compiled condition, probability) in rule
    // order, restricted to rules whose pattern unifies with the proposition.
    prob_rules_.resize(spec.propositions().size());
    for (const auto& p : spec.propositions()) {
      for (const auto& rule : spec.prob_constraints) {
        if (rule.catch_all) {
          prob_rules_[p.index].push_back(
              {detail::Program::compile(Formula::top(), spec), rule.probability});
          continue;
        }
        const Formula& pat = *rule.target;
        if (pat.pred != p.pred || pat.args.size() != p.args.size()) continue;
        bool match = true;
        FormulaPtr cond = rule.condition;
        for (std::size_t i = 0; i < pat.args.size() && match; ++i) {
          const Term& t = pat.args[i];
          if (t.is_variable()) {
            if (!spec.sort_contains(t.sort, p.args[i]))
              match = false;
            else
              cond = substitute(cond, t.name, Term::constant(p.args[i], t.sort));
          } else if (t.name != p.args[i]) {
            match = false;
          }
        }
        if (!match) continue;
        prob_rules_[p.index].push_back(
            {detail::Program::compile(ground(cond, spec), spec), rule.probability});
      }
    }
  }

  const WorldSpec& spec() const { return spec_; }

  Model sample(Rng& rng, std::size_t* restarts_out = nullptr,
               std::size_t restart_cap = 10000, const DecisionObserver& observer = {}) const {
    const std::size_t n = spec_.propositions().size();
    const std::size_t words = (n + 63) / 64;
    std::vector<std::uint64_t> light(words), dark(words);
    std::vector<std::size_t> undecided;
    std::size_t attempts = 0;

    for (;;) {
      if (++attempts > restart_cap)
        throw RestartCapExceeded("restart cap (" + std::to_string(restart_cap) +
                                 ") exceeded; the specification may be over-constrained");
      std::fill(light.begin(), light.end(), 0);
      std::fill(dark.begin(), dark.end(), 0);
      undecided.resize(n);
      for (std::size_t i = 0; i < n; ++i) undecided[i] = i;
      if (!is_consistent(light, dark)) continue;

      bool dead = false;
      while (!undecided.empty()) {
        std::size_t pick = rng.next_below(undecided.size());
        std::size_t p = undecided[pick];
        undecided[pick] = undecided.back();
        undecided.pop_back();

        set_bit(light, p);
        bool light_ok = is_consistent(light, dark);
        clear_bit(light, p);
        set_bit(dark, p);
        bool dark_ok = is_consistent(light, dark);
        clear_bit(dark, p);

        if (!light_ok && !dark_ok) {
          dead = true;
          break;
        }
        SamplerDecision decision;
        if (observer) {
          decision.prop_index = p;
          decision.light_before = light;
          decision.dark_before = dark;
        }
        if (light_ok && dark_ok) {
          double q = probability_of(p, light);
          bool value = rng.next_unit() < q;
          set_bit(value ? light : dark, p);
          if (observer) {
            decision.kind = SamplerDecision::Kind::Probabilistic;
            decision.value = value;
          }
        } else if (light_ok) {
          set_bit(light, p);
          if (observer) decision.kind = SamplerDecision::Kind::InferredTrue;
        } else {
          set_bit(dark, p);
          if (observer) decision.kind = SamplerDecision::Kind::InferredFalse;
        }
        if (observer) observer(decision);
        // Step-2 placement: the full constraint set is re-verified after
        // every assignment; a violation restarts the model.
        if (!is_consistent(light, dark)) {
          dead = true;
          break;
        }
      }
      if (dead) continue;
      if (restarts_out) *restarts_out += attempts - 1;
      return Model::from_bits(spec_, light);
    }
  }

  // Compiled first-match probability; equivalent to sampling_probability().
  double probability_of(std::size_t prop_index, const std::vector<std::uint64_t>& light) const {
    for (const auto& [cond, prob] : prob_rules_[prop_index])
      if (cond.eval(light)) return prob;
    throw SpecError("no probability rule matched proposition #" + std::to_string(prop_index));
  }

  bool is_consistent(const std::vector<std::uint64_t>& light,
                     const std::vector<std::uint64_t>& dark) const {
    for (std::size_t i = 0; i < light_.size(); ++i)
      if (!light_[i].eval(light) && dark_complement_[i].eval(dark)) return false;
    return true;
  }

 private:
  static void set_bit(std::vector<std::uint64_t>& bits, std::size_t i) {
    bits[i >> 6] |= 1ull << (i & 63);
  }
  static void clear_bit(std::vector<std::uint64_t>& bits, std::size_t i) {
    bits[i >> 6] &= ~(1ull << (i & 63));
  }

  const WorldSpec& spec_;
  std::vector<detail::Program> light_;
  std::vector<detail::Program> dark_complement_;
  std::vector<std::vector<std::pair<detail::Program, double>>> prob_rules_;
};

// Draws a single model. Every proposition ends up decided and all hard
// constraints hold in the result.
inline Model sample_model(const WorldSpec& spec, Rng& rng, std::size_t restart_cap = 10000,
                          const DecisionObserver& observer = {}) {
  PreparedSampler prepared(spec);
  return prepared.sample(rng, nullptr, restart_cap, observer);
}

// Samples cfg.models independent models, one RNG stream per model index, so
// the result is byte-identical for any thread count.
inline MeaningSpace sample_space(const WorldSpec& spec, const SamplerConfig& cfg,
                                 std::size_t* restarts_out = nullptr) {
  PreparedSampler prepared(spec);
  std::vector<std::string> names;
  names.reserve(spec.propositions().size());
  for (const auto& p : spec.propositions()) names.push_back(p.name);
  MeaningSpace space(std::move(names), cfg.models);

  unsigned threads = cfg.threads == 0 ? 1 : cfg.threads;
  if (threads > cfg.models) threads = static_cast<unsigned>(cfg.models ? cfg.models : 1);
  std::vector<std::size_t> restarts(threads, 0);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  // Workers write whole rows into their own slots; the space's packed
  // column words are only touched after the join.
  std::vector<std::vector<std::uint64_t>> rows(cfg.models);
  auto worker = [&](unsigned t) {
    try {
      for (std::size_t m = t; m < cfg.models; m += threads) {
        Rng rng = Rng::stream(cfg.seed, m);
        rows[m] = prepared.sample(rng, &restarts[t], cfg.restart_cap).bits();
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (std::size_t m = 0; m < cfg.models; ++m)
    for (const auto& p : spec.propositions())
      if ((rows[m][p.index >> 6] >> (p.index & 63)) & 1u) space.set_bit(m, p.index);
  if (restarts_out) {
    *restarts_out = 0;
    for (std::size_t r : restarts) *restarts_out += r;
  }
  return space;
}

}  // namespace dfs
