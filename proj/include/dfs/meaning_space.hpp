#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "dfs/logic.hpp"
#include "dfs/worldspec.hpp"

namespace dfs {

// A point in the meaning space: one component per model, each in [0,1].
// Binary vectors are propositional meanings; real-valued vectors arise from
// network states and centroids.
struct MeaningVector {
  std::vector<double> v;
  bool binary = false;

  std::size_t size() const { return v.size(); }
  double operator[](std::size_t i) const { return v[i]; }

  friend bool operator==(const MeaningVector& a, const MeaningVector& b) { return a.v == b.v; }
};

// The sampled meaning space: an ordered proposition list crossed with an
// ordered model list, stored column-wise as bitsets over models.
class MeaningSpace {
 public:
  MeaningSpace() = default;
  MeaningSpace(std::vector<std::string> prop_names, std::size_t num_models)
      : props_(std::move(prop_names)), models_(num_models) {
    columns_.assign(props_.size(), std::vector<std::uint64_t>(word_count(), 0));
    for (std::size_t i = 0; i < props_.size(); ++i) index_[props_[i]] = i;
  }

  std::size_t num_models() const { return models_; }
  std::size_t num_props() const { return props_.size(); }
  const std::vector<std::string>& prop_names() const { return props_; }
  std::size_t word_count() const { return (models_ + 63) / 64; }

  bool bit(std::size_t model, std::size_t prop) const {
    return (columns_[prop][model >> 6] >> (model & 63)) & 1u;
  }
  void set_bit(std::size_t model, std::size_t prop) {
    columns_[prop][model >> 6] |= 1ull << (model & 63);
  }
  const std::vector<std::uint64_t>& column_bits(std::size_t prop) const { return columns_[prop]; }

  const std::size_t* find_prop(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &it->second;
  }
  std::size_t prop_index(const std::string& name) const {
    const std::size_t* i = find_prop(name);
    if (!i) throw DomainError("unknown proposition: " + name);
    return *i;
  }

  // Row i as the set of satisfied proposition indices, packed per prop.
  std::vector<std::uint64_t> row_bits(std::size_t model) const {
    std::vector<std::uint64_t> out((props_.size() + 63) / 64, 0);
    for (std::size_t p = 0; p < props_.size(); ++p)
      if (bit(model, p)) out[p >> 6] |= 1ull << (p & 63);
    return out;
  }

  MeaningSpace subset(const std::vector<std::size_t>& model_rows) const {
    MeaningSpace out(props_, model_rows.size());
    for (std::size_t r = 0; r < model_rows.size(); ++r)
      for (std::size_t p = 0; p < props_.size(); ++p)
        if (bit(model_rows[r], p)) out.set_bit(r, p);
    return out;
  }

 private:
  std::vector<std::string> props_;
  std::size_t models_ = 0;
  std::vector<std::vector<std::uint64_t>> columns_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline MeaningVector column_vector(const MeaningSpace& space, std::size_t prop) {
  MeaningVector out;
  out.binary = true;
  out.v.resize(space.num_models());
  for (std::size_t m = 0; m < space.num_models(); ++m) out.v[m] = space.bit(m, prop) ? 1.0 : 0.0;
  return out;
}

// v(p): 1 in every model that satisfies p, 0 elsewhere.
inline MeaningVector proposition_vector(const MeaningSpace& space, const std::string& prop_name) {
  return column_vector(space, space.prop_index(prop_name));
}

namespace detail {

inline std::vector<std::uint64_t> eval_bits(const MeaningSpace& space, const FormulaPtr& f) {
  using K = Formula::Kind;
  const std::size_t words = space.word_count();
  switch (f->kind) {
    case K::Atom: {
      std::vector<std::string> args;
      args.reserve(f->args.size());
      for (const auto& t : f->args) {
        if (t.is_variable()) throw SpecError("eval_formula: formula must be ground");
        args.push_back(t.name);
      }
      return space.column_bits(space.prop_index(atom_name(f->pred, args)));
    }
    case K::Top: {
      std::vector<std::uint64_t> out(words, ~0ull);
      return out;
    }
    case K::Bottom:
      return std::vector<std::uint64_t>(words, 0);
    case K::Not: {
      auto b = eval_bits(space, f->lhs);
      for (auto& w : b) w = ~w;
      return b;
    }
    case K::Exists:
    case K::Forall:
      throw SpecError("eval_formula: quantifier not grounded");
    default: {
      auto l = eval_bits(space, f->lhs);
      auto r = eval_bits(space, f->rhs);
      for (std::size_t i = 0; i < words; ++i) {
        switch (f->kind) {
          case K::And: l[i] &= r[i]; break;
          case K::Or: l[i] |= r[i]; break;
          case K::Xor: l[i] ^= r[i]; break;
          case K::Implies: l[i] = ~l[i] | r[i]; break;
          default: l[i] = ~(l[i] ^ r[i]); break;  // Iff
        }
      }
      return l;
    }
  }
}

}  // namespace detail

// Compositional evaluation: negation complements the column, conjunction
// takes the component-wise minimum, the other connectives derive classically
// and quantifiers expand by grounding. Component i is 1 iff model i
// satisfies the formula.
inline MeaningVector eval_formula(const MeaningSpace& space, const WorldSpec& spec,
                                  const FormulaPtr& f) {
  auto bits = detail::eval_bits(space, ground(f, spec));
  MeaningVector out;
  out.binary = true;
  out.v.resize(space.num_models());
  for (std::size_t m = 0; m < space.num_models(); ++m)
    out.v[m] = (bits[m >> 6] >> (m & 63)) & 1u ? 1.0 : 0.0;
  return out;
}

inline MeaningVector eval_formula(const MeaningSpace& space, const WorldSpec& spec,
                                  const std::string& text) {
  return eval_formula(space, spec, parse_formula(text, spec));
}

// P(a): the average component value. On binary vectors this is the fraction
// of models that satisfy a.
inline double probability(const MeaningSpace& space, const MeaningVector& a) {
  if (a.size() != space.num_models()) throw DomainError("meaning vector length mismatch");
  double s = 0;
  for (double x : a.v) s += x;
  return s / static_cast<double>(space.num_models());
}

// P(a ∧ b): component-wise product, except that the conjunction of a point
// with itself is its prior probability (the product t-norm is not
// idempotent on real-valued vectors).
inline double conj_probability(const MeaningSpace& space, const MeaningVector& a,
                               const MeaningVector& b) {
  if (a.size() != b.size()) throw DomainError("meaning vector length mismatch");
  if (a.v == b.v) return probability(space, a);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.v[i] * b.v[i];
  return s / static_cast<double>(space.num_models());
}

// P(a | b) = P(a ∧ b) / P(b).
inline double cond_probability(const MeaningSpace& space, const MeaningVector& a,
                               const MeaningVector& b) {
  double pb = probability(space, b);
  if (pb == 0.0) throw DomainError("conditional probability on a zero-probability conditioner");
  return conj_probability(space, a, b) / pb;
}

// Normalized change from prior to conditional probability, in [-1,+1].
// +1 means b entails a, -1 means b entails the negation of a.
inline double inference_score(const MeaningSpace& space, const MeaningVector& a,
                              const MeaningVector& b) {
  double pa = probability(space, a);
  double pab = cond_probability(space, a, b);
  if (pab > pa) return (pab - pa) / (1.0 - pa);
  if (pa == 0.0) return 0.0;  // P(a|b) is 0 here as well
  return (pab - pa) / pa;
}

// One binary vector per distinct model row, marking all rows equal to it.
// Duplicated rows share a vector; the vectors sum to the all-ones vector.
inline std::vector<MeaningVector> model_identifying_vectors(const MeaningSpace& space) {
  std::vector<MeaningVector> out;
  std::unordered_map<std::string, std::size_t> seen;  // row key -> output slot
  const std::size_t m = space.num_models();
  for (std::size_t row = 0; row < m; ++row) {
    auto bits = space.row_bits(row);
    std::string key(reinterpret_cast<const char*>(bits.data()),
                    bits.size() * sizeof(std::uint64_t));
    auto [it, fresh] = seen.emplace(std::move(key), out.size());
    if (fresh) {
      MeaningVector v;
      v.binary = true;
      v.v.assign(m, 0.0);
      out.push_back(std::move(v));
    }
    out[it->second].v[row] = 1.0;
  }
  return out;
}

// Shannon entropy, in bits, of the distribution over model-identifying
// vectors conditioned on a.
inline double entropy(const MeaningSpace& space, const MeaningVector& a) {
  double pa = probability(space, a);
  if (pa == 0.0) throw DomainError("entropy of a zero-probability point");
  double h = 0;
  for (const auto& vm : model_identifying_vectors(space)) {
    double p = conj_probability(space, vm, a) / pa;
    if (p > 0) h -= p * std::log2(p);
  }
  return h;
}

// S = -log2 P(next | prev); +infinity when the transition is impossible.
inline double surprisal(const MeaningSpace& space, const MeaningVector& prev,
                        const MeaningVector& next) {
  double p = cond_probability(space, next, prev);
  if (p == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log2(p);
}

inline MeaningVector all_ones_vector(const MeaningSpace& space) {
  MeaningVector v;
  v.binary = true;
  v.v.assign(space.num_models(), 1.0);
  return v;
}

}  // namespace dfs
