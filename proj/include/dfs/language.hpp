#pragma once

#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dfs/logic.hpp"
#include "dfs/meaning_space.hpp"
#include "dfs/worldspec.hpp"

namespace dfs {

// The 30 surface tokens of the restaurant language, in the fixed order used
// for the network's localist input units. "didnt" is a single token.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<std::string> words) : words_(std::move(words)) {
    for (std::size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = i;
  }

  static Lexicon restaurant() {
    return Lexicon({"mike", "will", "elli", "nancy", "bar", "restaurant", "bartender", "waiter",
                    "cola", "water", "fries", "salad", "entered", "enter", "called", "call",
                    "ordered", "order", "paid", "pay", "arrived", "arrive", "brought", "bring",
                    "didnt", "a", "the", "he", "she", "someone"});
  }

  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool contains(const std::string& w) const { return index_.count(w) > 0; }
  std::size_t index_of(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) throw DomainError("word not in lexicon: " + w);
    return it->second;
  }

  // mike and will are masculine, elli and nancy feminine; servers are
  // referred to with the masculine pronoun.
  static const char* pronoun_for_person(const std::string& person) {
    return person == "mike" || person == "will" ? "he" : "she";
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One utterance paired with its utterance-final semantics and the target
// meaning vector resolved against a given space.
struct TrainingItem {
  std::vector<std::string> words;
  FormulaPtr semantics;
  std::string semantics_text;
  MeaningVector target;
};

namespace detail {

struct LanguageBuilder {
  const MeaningSpace& space;
  const WorldSpec& spec;
  std::vector<TrainingItem> items;

  const std::vector<std::string>& sort(const char* name) const {
    const WorldSpec::Sort* s = spec.find_sort(name);
    if (!s) throw SpecError(std::string("language generation requires sort ") + name);
    return s->constants;
  }

  FormulaPtr atom(const std::string& pred, std::initializer_list<std::string> constants) const {
    std::vector<Term> args;
    for (const auto& c : constants) {
      const std::string* s = spec.constant_sort(c);
      if (!s) throw SpecError("language generation: unknown constant " + c);
      args.push_back(Term::constant(c, *s));
    }
    return Formula::atom(pred, std::move(args));
  }
  FormulaPtr referent(const std::string& c) const { return atom("referent", {c}); }

  void add(std::vector<std::string> words, FormulaPtr semantics) {
    TrainingItem item;
    item.words = std::move(words);
    item.semantics = std::move(semantics);
    item.semantics_text = print_formula(item.semantics);
    item.target = eval_formula(space, spec, item.semantics);
    double p = probability(space, item.target);
    if (p <= 0.0) {
      std::string u;
      for (const auto& w : item.words) u += (u.empty() ? "" : " ") + w;
      throw DomainError("utterance \"" + u + "\" describes an impossible situation (" +
                        item.semantics_text + " has zero probability in the space)");
    }
    items.push_back(std::move(item));
  }

  // Simple sentences: an assertive and a negated variant per binding. The
  // negated semantics conjoins the presupposed referents: the subject, plus
  // any argument introduced with a definite determiner or a name.
  void simple_rows() {
    const auto& persons = sort("person");
    const auto& places = sort("place");
    const auto& servers = sort("server");
    const auto& orders = sort("order");

    for (const auto& p : persons)  // "p entered a l" / "p didnt enter a l"
      for (const auto& l : places) {
        add({p, "entered", "a", l}, atom("enter", {p, l}));
        add({p, "didnt", "enter", "a", l},
            Formula::conjunction(Formula::negation(atom("enter", {p, l})), referent(p)));
      }
    for (const auto& p : persons)  // "p entered the l" / negation presupposes l
      for (const auto& l : places) {
        add({p, "entered", "the", l}, atom("enter", {p, l}));
        add({p, "didnt", "enter", "the", l},
            Formula::conjunction(
                Formula::conjunction(Formula::negation(atom("enter", {p, l})), referent(p)),
                referent(l)));
      }
    for (const auto& p : persons)
      for (const auto& s : servers) {
        add({p, "called", "the", s}, atom("call", {p, s}));
        add({p, "didnt", "call", "the", s},
            Formula::conjunction(
                Formula::conjunction(Formula::negation(atom("call", {p, s})), referent(p)),
                referent(s)));
      }
    for (const auto& p : persons)
      for (const auto& o : orders) {
        add({p, "ordered", o}, atom("order", {p, o}));
        add({p, "didnt", "order", o},
            Formula::conjunction(Formula::negation(atom("order", {p, o})), referent(p)));
      }
    for (const auto& p : persons) {
      add({p, "paid"}, atom("pay", {p}));
      add({p, "didnt", "pay"},
          Formula::conjunction(Formula::negation(atom("pay", {p})), referent(p)));
    }
    for (const auto& s : servers) {
      add({"the", s, "arrived"}, atom("arrive", {s}));
      add({"the", s, "didnt", "arrive"},
          Formula::conjunction(Formula::negation(atom("arrive", {s})), referent(s)));
    }
    for (const auto& s : servers)
      for (const auto& o : orders) {
        add({"the", s, "brought", o}, atom("bring", {s, o}));
        add({"the", s, "didnt", "bring", o},
            Formula::conjunction(Formula::negation(atom("bring", {s, o})), referent(s)));
      }
  }

  // Two-sentence utterances, concatenated without a boundary token. Named
  // subjects take their gendered pronoun; "someone" variants exist for both
  // pronouns and quantify over the matching gender sort. Clauses whose
  // pronoun refers to the server use "he" and quantify over all persons.
  void two_sentence_rows() {
    const auto& persons = sort("person");
    const auto& places = sort("place");
    const auto& servers = sort("server");
    const auto& orders = sort("order");
    const std::vector<std::pair<std::string, std::string>> place_server = {
        {"bar", "bartender"}, {"restaurant", "waiter"}};
    const std::vector<std::pair<std::string, std::string>> genders = {{"he", "male"},
                                                                      {"she", "female"}};
    auto var = [&](const char* sort_name) { return Term::variable("x", sort_name); };
    auto quantified = [&](const std::string& sort_name, FormulaPtr body) {
      return Formula::exists("x", sort_name, std::move(body));
    };

    // "[p|someone] entered the l he/she ordered o"
    for (const auto& p : persons)
      for (const auto& l : places)
        for (const auto& o : orders)
          add({p, "entered", "the", l, Lexicon::pronoun_for_person(p), "ordered", o},
              Formula::conjunction(atom("enter", {p, l}), atom("order", {p, o})));
    for (const auto& [pron, g] : genders)
      for (const auto& l : places)
        for (const auto& o : orders)
          add({"someone", "entered", "the", l, pron, "ordered", o},
              quantified(g, Formula::conjunction(
                                Formula::atom("enter", {var(g.c_str()), Term::constant(l, "place")}),
                                Formula::atom("order", {var(g.c_str()), Term::constant(o, "order")}))));

    // "[p|someone] entered the l he/she called the s" (matching servers only)
    for (const auto& p : persons)
      for (const auto& [l, s] : place_server)
        add({p, "entered", "the", l, Lexicon::pronoun_for_person(p), "called", "the", s},
            Formula::conjunction(atom("enter", {p, l}), atom("call", {p, s})));
    for (const auto& [pron, g] : genders)
      for (const auto& [l, s] : place_server)
        add({"someone", "entered", "the", l, pron, "called", "the", s},
            quantified(g, Formula::conjunction(
                              Formula::atom("enter", {var(g.c_str()), Term::constant(l, "place")}),
                              Formula::atom("call", {var(g.c_str()), Term::constant(s, "server")}))));

    // "[p|someone] called the s he/she ordered o"
    for (const auto& p : persons)
      for (const auto& s : servers)
        for (const auto& o : orders)
          add({p, "called", "the", s, Lexicon::pronoun_for_person(p), "ordered", o},
              Formula::conjunction(atom("call", {p, s}), atom("order", {p, o})));
    for (const auto& [pron, g] : genders)
      for (const auto& s : servers)
        for (const auto& o : orders)
          add({"someone", "called", "the", s, pron, "ordered", o},
              quantified(g, Formula::conjunction(
                                Formula::atom("call", {var(g.c_str()), Term::constant(s, "server")}),
                                Formula::atom("order", {var(g.c_str()), Term::constant(o, "order")}))));

    // "[p|someone] called the s he/she paid"
    for (const auto& p : persons)
      for (const auto& s : servers)
        add({p, "called", "the", s, Lexicon::pronoun_for_person(p), "paid"},
            Formula::conjunction(atom("call", {p, s}), atom("pay", {p})));
    for (const auto& [pron, g] : genders)
      for (const auto& s : servers)
        add({"someone", "called", "the", s, pron, "paid"},
            quantified(g, Formula::conjunction(
                              Formula::atom("call", {var(g.c_str()), Term::constant(s, "server")}),
                              Formula::atom("pay", {var(g.c_str())}))));

    // "[p|someone] called the s he brought o" ("he" = the server)
    for (const auto& p : persons)
      for (const auto& s : servers)
        for (const auto& o : orders)
          add({p, "called", "the", s, "he", "brought", o},
              Formula::conjunction(atom("call", {p, s}), atom("bring", {s, o})));
    for (const auto& s : servers)
      for (const auto& o : orders)
        add({"someone", "called", "the", s, "he", "brought", o},
            quantified("person",
                       Formula::conjunction(
                           Formula::atom("call", {var("person"), Term::constant(s, "server")}),
                           atom("bring", {s, o}))));

    // "[p|someone] called the s he arrived" ("he" = the server)
    for (const auto& p : persons)
      for (const auto& s : servers)
        add({p, "called", "the", s, "he", "arrived"},
            Formula::conjunction(atom("call", {p, s}), atom("arrive", {s})));
    for (const auto& s : servers)
      add({"someone", "called", "the", s, "he", "arrived"},
          quantified("person",
                     Formula::conjunction(
                         Formula::atom("call", {var("person"), Term::constant(s, "server")}),
                         atom("arrive", {s}))));
  }
};

}  // namespace detail

// Expands the full utterance inventory against a meaning space built from
// the restaurant spec: 278 unique utterances describing 270 unique
// situations over a 30-token vocabulary.
inline std::vector<TrainingItem> generate_items(const MeaningSpace& space, const WorldSpec& spec) {
  detail::LanguageBuilder builder{space, spec, {}};
  builder.simple_rows();
  builder.two_sentence_rows();

  const Lexicon lexicon = Lexicon::restaurant();
  std::unordered_set<std::string> utterances;
  for (const auto& item : builder.items) {
    std::string key;
    for (const auto& w : item.words) {
      if (!lexicon.contains(w)) throw SpecError("generated token not in lexicon: " + w);
      key += w;
      key += ' ';
    }
    if (!utterances.insert(key).second) throw SpecError("duplicate utterance generated: " + key);
  }
  return builder.items;
}

inline std::vector<std::string> split_utterance(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

inline std::string join_words(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s += ' ';
    s += w;
  }
  return s;
}

// Table lookup for the semantics of an utterance in the generated language.
inline const TrainingItem& semantics_of(const std::vector<TrainingItem>& items,
                                        const std::vector<std::string>& utterance) {
  for (const auto& item : items)
    if (item.words == utterance) return item;
  throw DomainError("utterance not in the language: " + join_words(utterance));
}

}  // namespace dfs
