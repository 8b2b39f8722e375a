#pragma once

#include <cctype>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dfs/formula.hpp"
#include "dfs/worldspec.hpp"

namespace dfs {

namespace detail {

enum class Tok { Ident, LParen, RParen, Comma, Colon, Bang, Amp, Pipe, Arrow, DArrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t pos) const {
    throw ParseError("col " + std::to_string(pos + 1) + ": " + msg);
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    tok_.pos = i_;
    if (i_ >= src_.size()) {
      tok_ = {Tok::End, "", i_};
      return;
    }
    char c = src_[i_];
    if (c >= 'a' && c <= 'z') {
      std::size_t start = i_;
      while (i_ < src_.size() && ((src_[i_] >= 'a' && src_[i_] <= 'z') ||
                                  (src_[i_] >= '0' && src_[i_] <= '9') || src_[i_] == '_'))
        ++i_;
      tok_ = {Tok::Ident, src_.substr(start, i_ - start), start};
      return;
    }
    switch (c) {
      case '(': tok_ = {Tok::LParen, "(", i_++}; return;
      case ')': tok_ = {Tok::RParen, ")", i_++}; return;
      case ',': tok_ = {Tok::Comma, ",", i_++}; return;
      case ':': tok_ = {Tok::Colon, ":", i_++}; return;
      case '!': tok_ = {Tok::Bang, "!", i_++}; return;
      case '&': tok_ = {Tok::Amp, "&", i_++}; return;
      case '|': tok_ = {Tok::Pipe, "|", i_++}; return;
      case '-':
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '>') {
          tok_ = {Tok::Arrow, "->", i_};
          i_ += 2;
          return;
        }
        fail("stray '-'", i_);
      case '<':
        if (i_ + 2 < src_.size() && src_[i_ + 1] == '-' && src_[i_ + 2] == '>') {
          tok_ = {Tok::DArrow, "<->", i_};
          i_ += 3;
          return;
        }
        fail("stray '<'", i_);
      default:
        fail(std::string("unexpected character '") + c + "'", i_);
    }
  }

  const std::string& src_;
  std::size_t i_ = 0;
  Token tok_{Tok::End, "", 0};
};

class FormulaParser {
 public:
  FormulaParser(const std::string& text, const WorldSpec& spec,
                const std::unordered_map<std::string, std::string>& outer_vars)
      : lex_(text), spec_(spec) {
    for (const auto& [name, sort] : outer_vars) bound_.emplace_back(name, sort);
  }

  FormulaPtr parse() {
    FormulaPtr f = parse_iff();
    if (lex_.peek().kind != Tok::End)
      lex_.fail("unexpected trailing input '" + lex_.peek().text + "'", lex_.peek().pos);
    return f;
  }

 private:
  FormulaPtr parse_iff() {
    FormulaPtr l = parse_implies();
    if (lex_.peek().kind == Tok::DArrow) {
      lex_.take();
      return Formula::iff(std::move(l), parse_iff());
    }
    return l;
  }
  FormulaPtr parse_implies() {
    FormulaPtr l = parse_or();
    if (lex_.peek().kind == Tok::Arrow) {
      lex_.take();
      return Formula::implies(std::move(l), parse_implies());
    }
    return l;
  }
  FormulaPtr parse_or() {
    FormulaPtr l = parse_and();
    for (;;) {
      if (lex_.peek().kind == Tok::Pipe) {
        lex_.take();
        l = Formula::disjunction(std::move(l), parse_and());
      } else if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "xor") {
        lex_.take();
        l = Formula::exclusive_or(std::move(l), parse_and());
      } else {
        return l;
      }
    }
  }
  FormulaPtr parse_and() {
    FormulaPtr l = parse_unary();
    while (lex_.peek().kind == Tok::Amp) {
      lex_.take();
      l = Formula::conjunction(std::move(l), parse_unary());
    }
    return l;
  }
  FormulaPtr parse_unary() {
    if (lex_.peek().kind == Tok::Bang) {
      lex_.take();
      return Formula::negation(parse_unary());
    }
    if (lex_.peek().kind == Tok::Ident &&
        (lex_.peek().text == "forall" || lex_.peek().text == "exists"))
      return parse_quantifier();
    return parse_primary();
  }
  FormulaPtr parse_quantifier() {
    Token q = lex_.take();
    Token var = expect(Tok::Ident, "quantifier variable");
    expect(Tok::Colon, "':' after quantifier variable");
    Token sort = expect(Tok::Ident, "sort name");
    if (!spec_.find_sort(sort.text)) lex_.fail("unknown sort " + sort.text, sort.pos);
    if (spec_.constant_sort(var.text))
      lex_.fail("variable " + var.text + " collides with a declared constant", var.pos);
    for (const auto& [name, _] : bound_)
      if (name == var.text) lex_.fail("variable " + var.text + " is already bound", var.pos);
    expect(Tok::LParen, "'(' before quantifier body");
    bound_.emplace_back(var.text, sort.text);
    FormulaPtr body = parse_iff();
    bound_.pop_back();
    expect(Tok::RParen, "')' after quantifier body");
    return q.text == "forall" ? Formula::forall(var.text, sort.text, std::move(body))
                              : Formula::exists(var.text, sort.text, std::move(body));
  }
  FormulaPtr parse_primary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::LParen) {
      lex_.take();
      FormulaPtr f = parse_iff();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind != Tok::Ident) lex_.fail("expected a formula, got '" + t.text + "'", t.pos);
    Token head = lex_.take();
    if (head.text == "top") return Formula::top();
    if (head.text == "bottom") return Formula::bottom();
    const WorldSpec::Predicate* pred = spec_.find_predicate(head.text);
    if (lex_.peek().kind != Tok::LParen) {
      if (!pred) lex_.fail("unknown predicate " + head.text, head.pos);
      if (!pred->arg_sorts.empty())
        lex_.fail("predicate " + head.text + " expects " +
                      std::to_string(pred->arg_sorts.size()) + " argument(s)",
                  head.pos);
      return Formula::atom(head.text);
    }
    if (!pred) lex_.fail("unknown predicate " + head.text, head.pos);
    lex_.take();  // (
    std::vector<Term> args;
    for (;;) {
      Token a = expect(Tok::Ident, "argument");
      args.push_back(resolve_term(a));
      if (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        continue;
      }
      expect(Tok::RParen, "')' after arguments");
      break;
    }
    if (args.size() != pred->arg_sorts.size())
      lex_.fail("predicate " + head.text + " expects " + std::to_string(pred->arg_sorts.size()) +
                    " argument(s), got " + std::to_string(args.size()),
                head.pos);
    for (std::size_t i = 0; i < args.size(); ++i) check_sort(head, args[i], pred->arg_sorts[i]);
    return Formula::atom(head.text, std::move(args));
  }

  Term resolve_term(const Token& t) {
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
      if (it->first == t.text) return Term::variable(t.text, it->second);
    const std::string* sort = spec_.constant_sort(t.text);
    if (!sort) lex_.fail("unknown constant or unbound variable " + t.text, t.pos);
    return Term::constant(t.text, *sort);
  }
  void check_sort(const Token& at, const Term& term, const std::string& sig_sort) {
    bool ok = term.is_variable() ? spec_.sort_subsumes(sig_sort, term.sort)
                                 : spec_.sort_contains(sig_sort, term.name);
    if (!ok)
      lex_.fail((term.is_variable() ? "variable " : "constant ") + term.name + " of sort " +
                    term.sort + " does not fit argument sort " + sig_sort,
                at.pos);
  }
  Token expect(Tok kind, const std::string& what) {
    if (lex_.peek().kind != kind)
      lex_.fail("expected " + what + ", got '" + lex_.peek().text + "'", lex_.peek().pos);
    return lex_.take();
  }

  Lexer lex_;
  const WorldSpec& spec_;
  std::vector<std::pair<std::string, std::string>> bound_;
};

}  // namespace detail

// Parses formula text against the spec's declarations. Rejects unknown
// symbols, arity and sort mismatches, and unbound variables, with positions.
inline FormulaPtr parse_formula(const std::string& text, const WorldSpec& spec,
                                const std::unordered_map<std::string, std::string>& outer_vars = {}) {
  return detail::FormulaParser(text, spec, outer_vars).parse();
}

// Quantifier elimination: forall becomes the conjunction, exists the
// disjunction, of the instantiated body over the sort's constants in
// declaration order (left-folded).
inline FormulaPtr ground(const FormulaPtr& f, const WorldSpec& spec) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Atom:
    case K::Top:
    case K::Bottom:
      return f;
    case K::Not: {
      auto b = ground(f->lhs, spec);
      return b == f->lhs ? f : Formula::negation(std::move(b));
    }
    case K::Exists:
    case K::Forall: {
      const WorldSpec::Sort* sort = spec.find_sort(f->var_sort);
      if (!sort) throw SpecError("unknown sort in quantifier: " + f->var_sort);
      if (sort->constants.empty())
        throw DomainError("empty quantifier domain for sort " + f->var_sort);
      FormulaPtr acc;
      for (const auto& c : sort->constants) {
        FormulaPtr inst = ground(substitute(f->lhs, f->var, Term::constant(c, f->var_sort)), spec);
        if (!acc)
          acc = std::move(inst);
        else
          acc = f->kind == K::Forall ? Formula::conjunction(std::move(acc), std::move(inst))
                                     : Formula::disjunction(std::move(acc), std::move(inst));
      }
      return acc;
    }
    default: {
      auto l = ground(f->lhs, spec);
      auto r = ground(f->rhs, spec);
      if (l == f->lhs && r == f->rhs) return f;
      auto g = std::make_shared<Formula>();
      g->kind = f->kind;
      g->lhs = std::move(l);
      g->rhs = std::move(r);
      return g;
    }
  }
}

namespace detail {

using Env = std::vector<std::pair<std::string, std::string>>;  // var -> constant

inline bool eval_in(const Model& m, const FormulaPtr& f, Env& env) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Atom: {
      std::string name = f->pred;
      if (!f->args.empty()) {
        name += '(';
        for (std::size_t i = 0; i < f->args.size(); ++i) {
          if (i) name += ',';
          const Term& t = f->args[i];
          if (t.is_variable()) {
            const std::string* value = nullptr;
            for (auto it = env.rbegin(); it != env.rend(); ++it)
              if (it->first == t.name) {
                value = &it->second;
                break;
              }
            if (!value) throw SpecError("unbound variable in satisfies: " + t.name);
            name += *value;
          } else {
            name += t.name;
          }
        }
        name += ')';
      }
      const Proposition* p = m.spec().find_proposition(name);
      return p && m.contains(p->index);  // closed world
    }
    case K::Top: return true;
    case K::Bottom: return false;
    case K::Not: return !eval_in(m, f->lhs, env);
    case K::And: return eval_in(m, f->lhs, env) && eval_in(m, f->rhs, env);
    case K::Or: return eval_in(m, f->lhs, env) || eval_in(m, f->rhs, env);
    case K::Xor: return eval_in(m, f->lhs, env) != eval_in(m, f->rhs, env);
    case K::Implies: return !eval_in(m, f->lhs, env) || eval_in(m, f->rhs, env);
    case K::Iff: return eval_in(m, f->lhs, env) == eval_in(m, f->rhs, env);
    case K::Exists:
    case K::Forall: {
      const WorldSpec::Sort* sort = m.spec().find_sort(f->var_sort);
      if (!sort) throw SpecError("unknown sort in quantifier: " + f->var_sort);
      if (sort->constants.empty())
        throw DomainError("empty quantifier domain for sort " + f->var_sort);
      bool want = f->kind == K::Exists;
      for (const auto& c : sort->constants) {
        env.emplace_back(f->var, c);
        bool v = eval_in(m, f->lhs, env);
        env.pop_back();
        if (v == want) return want;
      }
      return !want;
    }
  }
  throw Error("satisfies: unreachable");
}

}  // namespace detail

// Classical satisfaction with closed-world atoms; quantifiers range over the
// declared constants of their sort.
inline bool satisfies(const Model& m, const FormulaPtr& f) {
  detail::Env env;
  return detail::eval_in(m, f, env);
}

inline void collect_free_variables(const FormulaPtr& f, std::vector<std::string>& bound,
                                   std::vector<std::string>& out) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Atom:
      for (const auto& t : f->args) {
        if (!t.is_variable()) continue;
        bool is_bound = false;
        for (const auto& b : bound)
          if (b == t.name) is_bound = true;
        if (!is_bound) out.push_back(t.name);
      }
      return;
    case K::Top:
    case K::Bottom:
      return;
    case K::Not:
      collect_free_variables(f->lhs, bound, out);
      return;
    case K::Exists:
    case K::Forall:
      bound.push_back(f->var);
      collect_free_variables(f->lhs, bound, out);
      bound.pop_back();
      return;
    default:
      collect_free_variables(f->lhs, bound, out);
      collect_free_variables(f->rhs, bound, out);
      return;
  }
}

inline bool is_closed(const FormulaPtr& f) {
  std::vector<std::string> bound, free;
  collect_free_variables(f, bound, free);
  return free.empty();
}

}  // namespace dfs
