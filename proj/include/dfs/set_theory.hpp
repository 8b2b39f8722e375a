#pragma once

#include <vector>

#include "dfs/meaning_space.hpp"

namespace dfs {

// Sub-propositional meaning as a finite set of binary meaning vectors over
// one space, deduplicated by exact component equality.
class VectorSet {
 public:
  VectorSet() = default;
  explicit VectorSet(std::vector<MeaningVector> members) {
    for (auto& m : members) insert(std::move(m));
  }

  void insert(MeaningVector v) {
    for (const auto& m : members_)
      if (m.v == v.v) return;
    members_.push_back(std::move(v));
  }

  const std::vector<MeaningVector>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(const MeaningVector& v) const {
    for (const auto& m : members_)
      if (m.v == v.v) return true;
    return false;
  }

  friend bool operator==(const VectorSet& a, const VectorSet& b) {
    if (a.size() != b.size()) return false;
    for (const auto& m : a.members_)
      if (!b.contains(m)) return false;
    return true;
  }

 private:
  std::vector<MeaningVector> members_;
};

namespace detail {

inline MeaningVector vector_and(const MeaningVector& a, const MeaningVector& b) {
  MeaningVector out;
  out.binary = a.binary && b.binary;
  out.v.resize(a.v.size());
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

inline MeaningVector vector_not(const MeaningVector& a) {
  MeaningVector out;
  out.binary = a.binary;
  out.v.resize(a.v.size());
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = 1.0 - a.v[i];
  return out;
}

}  // namespace detail

// Disjunction of two sub-propositional meanings: set union.
inline VectorSet set_union(const VectorSet& a, const VectorSet& b) {
  VectorSet out = a;
  for (const auto& m : b.members()) out.insert(m);
  return out;
}

// Conjunction: every element of the first set conjoined with every element
// of the second. Zero vectors are kept; they record that a combination is
// contradictory.
inline VectorSet set_conjoin(const VectorSet& a, const VectorSet& b) {
  VectorSet out;
  for (const auto& x : a.members())
    for (const auto& y : b.members()) out.insert(detail::vector_and(x, y));
  return out;
}

// Negation: the conjunctive closure over the negations of all members --
// the single vector of models satisfying none of them.
inline VectorSet set_negate(const VectorSet& a) {
  if (a.empty()) throw DomainError("set_negate: empty set");
  MeaningVector acc;
  bool first = true;
  for (const auto& m : a.members()) {
    MeaningVector neg = detail::vector_not(m);
    acc = first ? std::move(neg) : detail::vector_and(acc, neg);
    first = false;
  }
  VectorSet out;
  out.insert(std::move(acc));
  return out;
}

// Asserts V into context C: keeps the vectors of V consistent with at least
// one element of the context (non-zero conjunctive probability).
inline VectorSet merge(const MeaningSpace& space, const VectorSet& context, const VectorSet& v) {
  VectorSet out;
  for (const auto& candidate : v.members()) {
    for (const auto& c : context.members()) {
      if (conj_probability(space, c, candidate) > 0.0) {
        out.insert(candidate);
        break;
      }
    }
  }
  return out;
}

// The point in meaning space between the members: the component-wise mean.
inline MeaningVector centroid(const VectorSet& a) {
  if (a.empty()) throw DomainError("centroid: empty set");
  MeaningVector out;
  out.v.assign(a.members().front().v.size(), 0.0);
  for (const auto& m : a.members())
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += m.v[i];
  bool binary = true;
  for (auto& x : out.v) {
    x /= static_cast<double>(a.size());
    if (x != 0.0 && x != 1.0) binary = false;
  }
  out.binary = binary;
  return out;
}

}  // namespace dfs
