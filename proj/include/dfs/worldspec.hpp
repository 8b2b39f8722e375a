#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dfs/formula.hpp"

namespace dfs {

// A ground atom with its stable position in the proposition ordering.
struct Proposition {
  std::string pred;
  std::vector<std::string> args;
  std::size_t index = 0;
  std::string name;  // canonical text, e.g. "enter(mike,bar)"
};

inline std::string atom_name(const std::string& pred, const std::vector<std::string>& args) {
  std::string s = pred;
  if (!args.empty()) {
    s += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) s += ',';
      s += args[i];
    }
    s += ')';
  }
  return s;
}

// Probabilistic sampling rule: the first rule whose target pattern unifies
// with a proposition and whose condition holds in the Light World wins.
struct ProbConstraint {
  FormulaPtr target;     // Atom whose arguments are constants or sorted variables
  FormulaPtr condition;  // formula over the pattern variables; Top if unconditional
  double probability = 0.0;
  bool catch_all = false;  // `prob * = p`
};

// Declarative world description: sorts, predicate signatures, hard constraint
// schemas (already meta-expanded) and the ordered probabilistic constraints.
// Immutable once built by load_spec.
class WorldSpec {
 public:
  struct Sort {
    std::string name;
    std::vector<std::string> constants;  // declaration order
    bool is_union = false;
    std::vector<std::string> parts;  // union member sorts, in written order
  };
  struct Predicate {
    std::string name;
    std::vector<std::string> arg_sorts;
  };

  std::vector<Sort> sorts;
  std::vector<Predicate> predicates;
  std::vector<FormulaPtr> constraints;           // order as written
  std::vector<ProbConstraint> prob_constraints;  // order as written
  std::vector<std::string> excluded_atoms;       // `exclude` directives

  const Sort* find_sort(const std::string& name) const {
    auto it = sort_index_.find(name);
    return it == sort_index_.end() ? nullptr : &sorts[it->second];
  }
  const Predicate* find_predicate(const std::string& name) const {
    auto it = predicate_index_.find(name);
    return it == predicate_index_.end() ? nullptr : &predicates[it->second];
  }
  // Base sort a constant was declared in; empty if unknown constant.
  const std::string* constant_sort(const std::string& name) const {
    auto it = constant_sort_.find(name);
    return it == constant_sort_.end() ? nullptr : &it->second;
  }
  bool sort_contains(const std::string& sort, const std::string& constant) const {
    auto it = sort_members_.find(sort);
    return it != sort_members_.end() && it->second.count(constant) > 0;
  }
  // True when every constant of `inner` belongs to `outer`; governs whether a
  // variable of sort `inner` may fill an argument slot declared as `outer`.
  bool sort_subsumes(const std::string& outer, const std::string& inner) const {
    const Sort* in = find_sort(inner);
    if (!in) return false;
    for (const auto& c : in->constants)
      if (!sort_contains(outer, c)) return false;
    return true;
  }

  const std::vector<Proposition>& propositions() const { return propositions_; }
  const Proposition* find_proposition(const std::string& name) const {
    auto it = proposition_index_.find(name);
    return it == proposition_index_.end() ? nullptr : &propositions_[it->second];
  }

  // Registration interface used by the loader and by tests that build
  // specs programmatically. finalize() must be called before use.
  void add_sort(const std::string& name, std::vector<std::string> constants) {
    check_new_sort(name);
    Sort s{name, std::move(constants), false, {}};
    for (const auto& c : s.constants) {
      if (constant_sort_.count(c)) throw SpecError("duplicate constant declaration: " + c);
      constant_sort_[c] = name;
    }
    sort_members_[name] = {s.constants.begin(), s.constants.end()};
    sort_index_[name] = sorts.size();
    sorts.push_back(std::move(s));
  }
  void add_union_sort(const std::string& name, const std::vector<std::string>& parts) {
    check_new_sort(name);
    Sort s{name, {}, true, parts};
    auto& members = sort_members_[name];
    for (const auto& part : parts) {
      const Sort* ps = find_sort(part);
      if (!ps) throw SpecError("union sort " + name + " references undeclared sort " + part);
      for (const auto& c : ps->constants) {
        if (!members.insert(c).second)
          throw SpecError("union sort " + name + " lists constant " + c + " twice");
        s.constants.push_back(c);
      }
    }
    sort_index_[name] = sorts.size();
    sorts.push_back(std::move(s));
  }
  void add_predicate(const std::string& name, std::vector<std::string> arg_sorts) {
    if (predicate_index_.count(name)) throw SpecError("duplicate predicate declaration: " + name);
    for (const auto& s : arg_sorts)
      if (!find_sort(s)) throw SpecError("predicate " + name + " uses undeclared sort " + s);
    predicate_index_[name] = predicates.size();
    predicates.push_back(Predicate{name, std::move(arg_sorts)});
  }

  // Builds the cached proposition ordering. Call after all declarations.
  void finalize() {
    propositions_.clear();
    proposition_index_.clear();
    for (const auto& p : enumerate_propositions_impl()) {
      proposition_index_[p.name] = p.index;
      propositions_.push_back(p);
    }
  }

  // Deterministic enumeration: predicates in declaration order, argument
  // tuples odometer-style with constants in declaration order, minus any
  // excluded atoms. referent atoms appear through their own predicate.
  std::vector<Proposition> enumerate_propositions_impl() const {
    std::unordered_set<std::string> excluded(excluded_atoms.begin(), excluded_atoms.end());
    std::vector<Proposition> out;
    for (const auto& pred : predicates) {
      std::vector<const std::vector<std::string>*> domains;
      domains.reserve(pred.arg_sorts.size());
      bool empty_domain = false;
      for (const auto& s : pred.arg_sorts) {
        domains.push_back(&find_sort(s)->constants);
        if (domains.back()->empty()) empty_domain = true;
      }
      if (empty_domain) continue;
      std::vector<std::size_t> idx(domains.size(), 0);
      for (;;) {
        std::vector<std::string> args;
        args.reserve(domains.size());
        for (std::size_t i = 0; i < domains.size(); ++i) args.push_back((*domains[i])[idx[i]]);
        std::string name = atom_name(pred.name, args);
        if (!excluded.count(name)) {
          Proposition p;
          p.pred = pred.name;
          p.args = std::move(args);
          p.index = out.size();
          p.name = std::move(name);
          out.push_back(std::move(p));
        }
        if (domains.empty()) break;
        std::size_t i = domains.size();
        while (i > 0) {
          --i;
          if (++idx[i] < domains[i]->size()) break;
          idx[i] = 0;
          if (i == 0) goto next_pred;
        }
        continue;
      next_pred:
        break;
      }
    }
    return out;
  }

 private:
  void check_new_sort(const std::string& name) {
    if (sort_index_.count(name)) throw SpecError("duplicate sort declaration: " + name);
  }

  std::unordered_map<std::string, std::size_t> sort_index_;
  std::unordered_map<std::string, std::size_t> predicate_index_;
  std::unordered_map<std::string, std::string> constant_sort_;
  std::unordered_map<std::string, std::unordered_set<std::string>> sort_members_;
  std::vector<Proposition> propositions_;
  std::unordered_map<std::string, std::size_t> proposition_index_;
};

inline std::vector<Proposition> enumerate_propositions(const WorldSpec& spec) {
  return spec.enumerate_propositions_impl();
}

// First-order model over a WorldSpec: the fixed entity-per-constant universe
// plus the set of propositions it satisfies (closed world: everything else
// is false). Immutable after construction.
class Model {
 public:
  Model() = default;
  explicit Model(const WorldSpec& spec)
      : spec_(&spec), bits_((spec.propositions().size() + 63) / 64, 0) {}
  Model(const WorldSpec& spec, const std::vector<std::string>& true_atoms) : Model(spec) {
    for (const auto& a : true_atoms) {
      const Proposition* p = spec.find_proposition(a);
      if (!p) throw SpecError("atom not in the proposition set: " + a);
      bits_[p->index >> 6] |= 1ull << (p->index & 63);
    }
  }
  static Model from_bits(const WorldSpec& spec, std::vector<std::uint64_t> bits) {
    Model m(spec);
    m.bits_ = std::move(bits);
    return m;
  }

  const WorldSpec& spec() const { return *spec_; }
  const std::vector<std::uint64_t>& bits() const { return bits_; }
  bool contains(std::size_t prop_index) const {
    return (bits_[prop_index >> 6] >> (prop_index & 63)) & 1u;
  }
  std::vector<std::string> true_atoms() const {
    std::vector<std::string> out;
    for (const auto& p : spec_->propositions())
      if (contains(p.index)) out.push_back(p.name);
    return out;
  }

 private:
  const WorldSpec* spec_ = nullptr;
  std::vector<std::uint64_t> bits_;
};

}  // namespace dfs
