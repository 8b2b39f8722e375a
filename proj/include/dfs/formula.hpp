#pragma once

#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dfs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed formula text or world-spec file.
struct ParseError : Error {
  using Error::Error;
};
// Structurally valid input that violates a declaration or sort rule.
struct SpecError : Error {
  using Error::Error;
};
// Operation applied outside its domain (zero-probability conditioner etc.).
struct DomainError : Error {
  using Error::Error;
};

// A constant symbol or a quantifier-bound variable, both carrying a sort.
struct Term {
  enum class Kind { Constant, Variable };
  Kind kind = Kind::Constant;
  std::string name;
  std::string sort;

  static Term constant(std::string name, std::string sort) {
    return Term{Kind::Constant, std::move(name), std::move(sort)};
  }
  static Term variable(std::string name, std::string sort) {
    return Term{Kind::Variable, std::move(name), std::move(sort)};
  }
  bool is_variable() const { return kind == Kind::Variable; }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.name == b.name && a.sort == b.sort;
  }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable first-order formula tree. Quantifier-free formulas over ground
// atoms are the propositional fragment used throughout sampling.
struct Formula {
  enum class Kind { Atom, Top, Bottom, Not, And, Or, Xor, Implies, Iff, Exists, Forall };

  Kind kind;
  std::string pred;        // Atom
  std::vector<Term> args;  // Atom
  FormulaPtr lhs;          // Not/binary left / quantifier body
  FormulaPtr rhs;          // binary right
  std::string var;         // quantifiers
  std::string var_sort;    // quantifiers

  static FormulaPtr atom(std::string pred, std::vector<Term> args = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Atom;
    f->pred = std::move(pred);
    f->args = std::move(args);
    return f;
  }
  static FormulaPtr top() { return nullary(Kind::Top); }
  static FormulaPtr bottom() { return nullary(Kind::Bottom); }
  static FormulaPtr negation(FormulaPtr f) {
    auto r = std::make_shared<Formula>();
    r->kind = Kind::Not;
    r->lhs = std::move(f);
    return r;
  }
  static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b) { return binary(Kind::And, std::move(a), std::move(b)); }
  static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b) { return binary(Kind::Or, std::move(a), std::move(b)); }
  static FormulaPtr exclusive_or(FormulaPtr a, FormulaPtr b) { return binary(Kind::Xor, std::move(a), std::move(b)); }
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return binary(Kind::Implies, std::move(a), std::move(b)); }
  static FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return binary(Kind::Iff, std::move(a), std::move(b)); }
  static FormulaPtr exists(std::string var, std::string sort, FormulaPtr body) {
    return quantifier(Kind::Exists, std::move(var), std::move(sort), std::move(body));
  }
  static FormulaPtr forall(std::string var, std::string sort, FormulaPtr body) {
    return quantifier(Kind::Forall, std::move(var), std::move(sort), std::move(body));
  }

  bool is_quantifier() const { return kind == Kind::Exists || kind == Kind::Forall; }

 private:
  static FormulaPtr nullary(Kind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
  }
  static FormulaPtr binary(Kind k, FormulaPtr a, FormulaPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->lhs = std::move(a);
    f->rhs = std::move(b);
    return f;
  }
  static FormulaPtr quantifier(Kind k, std::string var, std::string sort, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->var = std::move(var);
    f->var_sort = std::move(sort);
    f->lhs = std::move(body);
    return f;
  }
};

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::Atom:
      return a->pred == b->pred && a->args == b->args;
    case Formula::Kind::Top:
    case Formula::Kind::Bottom:
      return true;
    case Formula::Kind::Not:
      return equal(a->lhs, b->lhs);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return a->var == b->var && a->var_sort == b->var_sort && equal(a->lhs, b->lhs);
    default:
      return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
}

namespace detail {

// Binding strength; higher binds tighter. `|` and `xor` share a level.
inline int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Iff: return 1;
    case Formula::Kind::Implies: return 2;
    case Formula::Kind::Or:
    case Formula::Kind::Xor: return 3;
    case Formula::Kind::And: return 4;
    default: return 5;  // atoms, constants, negation, quantifiers
  }
}

inline const char* connective(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::And: return " & ";
    case Formula::Kind::Or: return " | ";
    case Formula::Kind::Xor: return " xor ";
    case Formula::Kind::Implies: return " -> ";
    case Formula::Kind::Iff: return " <-> ";
    default: return "";
  }
}

inline void print_into(const FormulaPtr& f, std::ostream& os) {
  switch (f->kind) {
    case Formula::Kind::Atom: {
      os << f->pred;
      if (!f->args.empty()) {
        os << '(';
        for (std::size_t i = 0; i < f->args.size(); ++i) {
          if (i) os << ',';
          os << f->args[i].name;
        }
        os << ')';
      }
      return;
    }
    case Formula::Kind::Top: os << "top"; return;
    case Formula::Kind::Bottom: os << "bottom"; return;
    case Formula::Kind::Not: {
      os << '!';
      bool parens = precedence(f->lhs->kind) < 5 || f->lhs->is_quantifier();
      if (parens) os << '(';
      print_into(f->lhs, os);
      if (parens) os << ')';
      return;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      os << (f->kind == Formula::Kind::Exists ? "exists " : "forall ");
      os << f->var << ':' << f->var_sort << " (";
      print_into(f->lhs, os);
      os << ')';
      return;
    }
    default: {
      // The arrows are right-associative, everything else left-associative.
      int prec = precedence(f->kind);
      bool right_assoc = f->kind == Formula::Kind::Implies || f->kind == Formula::Kind::Iff;
      int lp = precedence(f->lhs->kind);
      int rp = precedence(f->rhs->kind);
      bool lparens = right_assoc ? lp <= prec : lp < prec;
      bool rparens = right_assoc ? rp < prec : rp <= prec;
      // A same-kind chain on the associative side keeps its shape without
      // parentheses; mixed `|`/`xor` at one level must be disambiguated.
      if (!right_assoc && lp == prec && f->lhs->kind != f->kind) lparens = true;
      if (lparens) os << '(';
      print_into(f->lhs, os);
      if (lparens) os << ')';
      os << connective(f->kind);
      if (rparens) os << '(';
      print_into(f->rhs, os);
      if (rparens) os << ')';
      return;
    }
  }
}

}  // namespace detail

// Canonical printer; parse_formula(print_formula(f)) reproduces f.
inline std::string print_formula(const FormulaPtr& f) {
  std::ostringstream os;
  detail::print_into(f, os);
  return os.str();
}

// Complement transform: the formula whose satisfaction in the Dark World
// witnesses falsehood in the Light World. Atoms map to themselves.
inline FormulaPtr complement(const FormulaPtr& f) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Atom: return f;
    case K::Top: return Formula::bottom();
    case K::Bottom: return Formula::top();
    case K::Not: return Formula::negation(complement(f->lhs));
    case K::And: return Formula::disjunction(complement(f->lhs), complement(f->rhs));
    case K::Or: return Formula::conjunction(complement(f->lhs), complement(f->rhs));
    case K::Xor: {
      auto cl = complement(f->lhs);
      auto cr = complement(f->rhs);
      return Formula::disjunction(Formula::conjunction(cl, cr),
                                  Formula::conjunction(Formula::negation(cl), Formula::negation(cr)));
    }
    case K::Implies:
      return Formula::conjunction(Formula::negation(complement(f->lhs)), complement(f->rhs));
    case K::Iff: {
      auto cl = complement(f->lhs);
      auto cr = complement(f->rhs);
      return Formula::disjunction(Formula::conjunction(Formula::negation(cl), cr),
                                  Formula::conjunction(cl, Formula::negation(cr)));
    }
    case K::Exists: return Formula::forall(f->var, f->var_sort, complement(f->lhs));
    case K::Forall: return Formula::exists(f->var, f->var_sort, complement(f->lhs));
  }
  throw Error("complement: unreachable");
}

// f with every free occurrence of `var` replaced by the constant `value`.
inline FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& value) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Atom: {
      bool hit = false;
      for (const auto& a : f->args)
        if (a.is_variable() && a.name == var) hit = true;
      if (!hit) return f;
      std::vector<Term> args = f->args;
      for (auto& a : args)
        if (a.is_variable() && a.name == var) a = value;
      return Formula::atom(f->pred, std::move(args));
    }
    case K::Top:
    case K::Bottom:
      return f;
    case K::Not: return Formula::negation(substitute(f->lhs, var, value));
    case K::Exists:
    case K::Forall: {
      if (f->var == var) return f;  // rebound below this point
      auto body = substitute(f->lhs, var, value);
      return f->kind == K::Exists ? Formula::exists(f->var, f->var_sort, body)
                                  : Formula::forall(f->var, f->var_sort, body);
    }
    default: {
      auto l = substitute(f->lhs, var, value);
      auto r = substitute(f->rhs, var, value);
      auto g = std::make_shared<Formula>();
      g->kind = f->kind;
      g->lhs = std::move(l);
      g->rhs = std::move(r);
      return g;
    }
  }
}

inline bool is_ground(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const auto& a : f->args)
        if (a.is_variable()) return false;
      return true;
    case Formula::Kind::Top:
    case Formula::Kind::Bottom:
      return true;
    case Formula::Kind::Not:
      return is_ground(f->lhs);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return false;
    default:
      return is_ground(f->lhs) && is_ground(f->rhs);
  }
}

}  // namespace dfs
