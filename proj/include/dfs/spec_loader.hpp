#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "dfs/logic.hpp"
#include "dfs/worldspec.hpp"

namespace dfs {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_trimmed(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline bool valid_identifier(const std::string& s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  return true;
}

[[noreturn]] inline void line_fail(std::size_t line_no, const std::string& msg) {
  throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

// Pattern side of a `prob` rule: pred(arg,...) where each arg is either a
// declared constant or `name:sort`.
inline FormulaPtr parse_prob_pattern(const std::string& text, const WorldSpec& spec,
                                     std::unordered_map<std::string, std::string>& vars,
                                     std::size_t line_no) {
  Lexer lex(text);
  Token head = lex.take();
  if (head.kind != Tok::Ident) line_fail(line_no, "expected a predicate in prob pattern");
  const WorldSpec::Predicate* pred = spec.find_predicate(head.text);
  if (!pred) line_fail(line_no, "unknown predicate " + head.text + " in prob pattern");
  std::vector<Term> args;
  if (lex.peek().kind == Tok::LParen) {
    lex.take();
    for (;;) {
      Token a = lex.take();
      if (a.kind != Tok::Ident) line_fail(line_no, "expected an argument in prob pattern");
      if (lex.peek().kind == Tok::Colon) {
        lex.take();
        Token s = lex.take();
        if (s.kind != Tok::Ident) line_fail(line_no, "expected a sort after ':'");
        if (!spec.find_sort(s.text)) line_fail(line_no, "unknown sort " + s.text);
        if (spec.constant_sort(a.text))
          line_fail(line_no, "pattern variable " + a.text + " collides with a constant");
        auto it = vars.find(a.text);
        if (it != vars.end() && it->second != s.text)
          line_fail(line_no, "pattern variable " + a.text + " declared with two sorts");
        vars[a.text] = s.text;
        args.push_back(Term::variable(a.text, s.text));
      } else {
        if (!spec.constant_sort(a.text)) line_fail(line_no, "unknown constant " + a.text);
        args.push_back(Term::constant(a.text, *spec.constant_sort(a.text)));
      }
      if (lex.peek().kind == Tok::Comma) {
        lex.take();
        continue;
      }
      if (lex.peek().kind != Tok::RParen) line_fail(line_no, "expected ')' in prob pattern");
      lex.take();
      break;
    }
  }
  if (lex.peek().kind != Tok::End) line_fail(line_no, "trailing input after prob pattern");
  if (args.size() != pred->arg_sorts.size())
    line_fail(line_no, "prob pattern arity mismatch for " + head.text);
  for (std::size_t i = 0; i < args.size(); ++i) {
    const Term& t = args[i];
    bool ok = t.is_variable() ? spec.sort_subsumes(pred->arg_sorts[i], t.sort)
                              : spec.sort_contains(pred->arg_sorts[i], t.name);
    if (!ok)
      line_fail(line_no, "pattern argument " + t.name + " does not fit sort " + pred->arg_sorts[i]);
  }
  return Formula::atom(head.text, std::move(args));
}

inline std::string fresh_variable(const WorldSpec& spec, std::string base) {
  while (spec.constant_sort(base)) base += '_';
  return base;
}

}  // namespace detail

// Loads and validates a world specification.
//
// Line-oriented format, `#` starts a comment:
//   sort person = mike, will, elli, nancy
//   sort order = food | drink                 # union of declared sorts
//   predicate enter(person, place)
//   constraint <formula>                      # order preserved
//   schema unary                              # P(x) -> referent(x) for all unary P
//   schema binary                             # R(x,y) -> referent(x) & referent(y)
//   prob <atom-pattern> given <formula> = <p> # first match wins
//   prob * = 0.6                              # catch-all, required exactly once
//   exclude <ground-atom>                     # drop from the enumeration
inline WorldSpec load_spec(std::istream& in) {
  WorldSpec spec;
  struct PendingConstraint {
    enum class Kind { Formula, SchemaUnary, SchemaBinary } kind;
    std::string text;
    std::size_t line_no;
  };
  std::vector<PendingConstraint> pending;
  struct PendingProb {
    std::string line;
    std::size_t line_no;
  };
  std::vector<PendingProb> pending_probs;
  std::vector<std::pair<std::string, std::size_t>> pending_excludes;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = detail::trim(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    std::string rest = detail::trim(line.substr(keyword.size()));

    if (keyword == "sort") {
      std::size_t eq = rest.find('=');
      if (eq == std::string::npos) detail::line_fail(line_no, "sort declaration needs '='");
      std::string name = detail::trim(rest.substr(0, eq));
      std::string rhs = detail::trim(rest.substr(eq + 1));
      if (!detail::valid_identifier(name)) detail::line_fail(line_no, "bad sort name " + name);
      bool is_union = rhs.find('|') != std::string::npos;
      std::vector<std::string> names =
          detail::split_trimmed(rhs, is_union ? '|' : ',');
      for (const auto& n : names)
        if (!detail::valid_identifier(n)) detail::line_fail(line_no, "bad identifier " + n);
      // A single-name right-hand side is a union alias when it names a sort.
      if (!is_union && names.size() == 1 && spec.find_sort(names[0])) is_union = true;
      try {
        if (is_union)
          spec.add_union_sort(name, names);
        else
          spec.add_sort(name, names);
      } catch (const SpecError& e) {
        detail::line_fail(line_no, e.what());
      }
    } else if (keyword == "predicate") {
      std::string name;
      std::vector<std::string> arg_sorts;
      std::size_t paren = rest.find('(');
      if (paren == std::string::npos) {
        name = rest;
      } else {
        name = detail::trim(rest.substr(0, paren));
        std::size_t close = rest.rfind(')');
        if (close == std::string::npos || close < paren)
          detail::line_fail(line_no, "unbalanced parentheses in predicate declaration");
        std::string inner = detail::trim(rest.substr(paren + 1, close - paren - 1));
        if (!inner.empty()) arg_sorts = detail::split_trimmed(inner, ',');
      }
      if (!detail::valid_identifier(name)) detail::line_fail(line_no, "bad predicate name " + name);
      try {
        spec.add_predicate(name, arg_sorts);
      } catch (const SpecError& e) {
        detail::line_fail(line_no, e.what());
      }
    } else if (keyword == "constraint") {
      pending.push_back({PendingConstraint::Kind::Formula, rest, line_no});
    } else if (keyword == "schema") {
      if (rest == "unary")
        pending.push_back({PendingConstraint::Kind::SchemaUnary, "", line_no});
      else if (rest == "binary")
        pending.push_back({PendingConstraint::Kind::SchemaBinary, "", line_no});
      else
        detail::line_fail(line_no, "schema must be 'unary' or 'binary'");
    } else if (keyword == "prob") {
      pending_probs.push_back({rest, line_no});
    } else if (keyword == "exclude") {
      pending_excludes.push_back({rest, line_no});
    } else {
      detail::line_fail(line_no, "unknown directive " + keyword);
    }
  }

  // Constraints, probabilistic rules and exclusions are resolved after all
  // declarations so that schema directives see every declared predicate.
  for (const auto& [text, no] : pending_excludes) {
    FormulaPtr atom;
    try {
      atom = parse_formula(text, spec);
    } catch (const ParseError& e) {
      detail::line_fail(no, e.what());
    }
    if (atom->kind != Formula::Kind::Atom || !is_ground(atom))
      detail::line_fail(no, "exclude expects a ground atom");
    std::vector<std::string> args;
    for (const auto& t : atom->args) args.push_back(t.name);
    spec.excluded_atoms.push_back(atom_name(atom->pred, args));
  }

  for (const auto& pc : pending) {
    if (pc.kind == PendingConstraint::Kind::Formula) {
      try {
        spec.constraints.push_back(parse_formula(pc.text, spec));
      } catch (const ParseError& e) {
        detail::line_fail(pc.line_no, e.what());
      }
      continue;
    }
    bool unary = pc.kind == PendingConstraint::Kind::SchemaUnary;
    const WorldSpec::Predicate* referent = spec.find_predicate("referent");
    if (!referent || referent->arg_sorts.size() != 1)
      detail::line_fail(pc.line_no, "schema directives require a unary referent predicate");
    const std::string& ref_sort = referent->arg_sorts[0];
    for (const auto& pred : spec.predicates) {
      if (pred.name == "referent") continue;
      if (pred.arg_sorts.size() != (unary ? 1u : 2u)) continue;
      for (const auto& s : pred.arg_sorts)
        if (!spec.sort_subsumes(ref_sort, s))
          detail::line_fail(pc.line_no, "schema argument sort " + s + " does not fit " + ref_sort);
      std::string x = detail::fresh_variable(spec, "x");
      if (unary) {
        auto body = Formula::implies(Formula::atom(pred.name, {Term::variable(x, pred.arg_sorts[0])}),
                                     Formula::atom("referent", {Term::variable(x, pred.arg_sorts[0])}));
        spec.constraints.push_back(Formula::forall(x, pred.arg_sorts[0], std::move(body)));
      } else {
        std::string y = detail::fresh_variable(spec, "y");
        auto head = Formula::atom(pred.name, {Term::variable(x, pred.arg_sorts[0]),
                                              Term::variable(y, pred.arg_sorts[1])});
        auto refs = Formula::conjunction(
            Formula::atom("referent", {Term::variable(x, pred.arg_sorts[0])}),
            Formula::atom("referent", {Term::variable(y, pred.arg_sorts[1])}));
        auto body = Formula::implies(std::move(head), std::move(refs));
        spec.constraints.push_back(Formula::forall(
            x, pred.arg_sorts[0], Formula::forall(y, pred.arg_sorts[1], std::move(body))));
      }
    }
  }

  for (const auto& [line, no] : pending_probs) {
    std::size_t eq = line.rfind('=');
    if (eq == std::string::npos) detail::line_fail(no, "prob rule needs '= <probability>'");
    std::string head = detail::trim(line.substr(0, eq));
    std::string prob_text = detail::trim(line.substr(eq + 1));
    double p = 0;
    try {
      std::size_t used = 0;
      p = std::stod(prob_text, &used);
      if (used != prob_text.size()) throw std::invalid_argument("");
    } catch (...) {
      detail::line_fail(no, "bad probability '" + prob_text + "'");
    }
    if (p < 0.0 || p > 1.0) detail::line_fail(no, "probability out of [0,1]");

    ProbConstraint pc;
    pc.probability = p;
    if (head == "*") {
      pc.catch_all = true;
      pc.target = nullptr;
      pc.condition = Formula::top();
    } else {
      // `<pattern> given <condition>`; the separator is the first top-level
      // occurrence of the word "given" after the pattern.
      std::size_t given = head.find(" given ");
      if (given == std::string::npos)
        detail::line_fail(no, "prob rule needs 'given <condition>' (use 'given top' if unconditional)");
      std::string pattern_text = detail::trim(head.substr(0, given));
      std::string cond_text = detail::trim(head.substr(given + 7));
      std::unordered_map<std::string, std::string> vars;
      pc.target = detail::parse_prob_pattern(pattern_text, spec, vars, no);
      try {
        pc.condition = parse_formula(cond_text, spec, vars);
      } catch (const ParseError& e) {
        detail::line_fail(no, e.what());
      }
    }
    spec.prob_constraints.push_back(std::move(pc));
  }

  std::size_t catch_alls = 0;
  for (const auto& pc : spec.prob_constraints)
    if (pc.catch_all) ++catch_alls;
  if (catch_alls != 1)
    throw SpecError(catch_alls == 0 ? "missing catch-all probability rule (prob * = <p>)"
                                    : "more than one catch-all probability rule");

  spec.finalize();
  return spec;
}

inline WorldSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open world spec: " + path);
  return load_spec(in);
}

inline WorldSpec load_spec_string(const std::string& text) {
  std::istringstream in(text);
  return load_spec(in);
}

// First-match probability lookup: scan the rules in order; a rule applies
// when its pattern unifies with `p` and its instantiated condition holds in
// the Light World (undecided atoms read as false).
inline double sampling_probability(const WorldSpec& spec, const Proposition& p, const Model& light) {
  for (const auto& rule : spec.prob_constraints) {
    detail::Env env;
    if (!rule.catch_all) {
      const Formula& pat = *rule.target;
      if (pat.pred != p.pred || pat.args.size() != p.args.size()) continue;
      bool match = true;
      for (std::size_t i = 0; i < pat.args.size() && match; ++i) {
        const Term& t = pat.args[i];
        if (t.is_variable()) {
          if (!spec.sort_contains(t.sort, p.args[i])) {
            match = false;
            break;
          }
          bool seen = false;
          for (const auto& [v, c] : env)
            if (v == t.name) {
              seen = true;
              if (c != p.args[i]) match = false;
            }
          if (!seen) env.emplace_back(t.name, p.args[i]);
        } else if (t.name != p.args[i]) {
          match = false;
        }
      }
      if (!match) continue;
      if (!detail::eval_in(light, rule.condition, env)) continue;
    }
    return rule.probability;
  }
  throw SpecError("no probability rule matched " + p.name + " (missing catch-all?)");
}

}  // namespace dfs
