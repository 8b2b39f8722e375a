#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dfs/meaning_space.hpp"
#include "dfs/rng.hpp"

namespace dfs {

struct SelectionConfig {
  std::size_t k = 150;
  std::size_t iterations = 50;
  std::uint64_t seed = 7;
};

struct SelectionReport {
  std::size_t k = 0;
  std::size_t iterations = 0;
  std::size_t rejected_zero_column = 0;
  std::size_t rejected_hard_constraints = 0;
  std::size_t survivors = 0;
  double best_rho = 0.0;
  std::size_t best_iteration = 0;  // 1-based; 0 when nothing survived
};

namespace detail {

inline std::size_t popcount_and(const std::vector<std::uint64_t>& a,
                                const std::vector<std::uint64_t>& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += __builtin_popcountll(a[i] & b[i]);
  return n;
}

inline std::size_t popcount(const std::vector<std::uint64_t>& a) {
  std::size_t n = 0;
  for (std::uint64_t w : a) n += __builtin_popcountll(w);
  return n;
}

}  // namespace detail

// Pairwise inference scores over all ordered proposition pairs, diagonal
// included, in row-major proposition order. Mirrors the meaning-space
// operations exactly (same arithmetic on the same intermediate values).
inline std::vector<double> inference_vector(const MeaningSpace& space) {
  const std::size_t n = space.num_props();
  const double m = static_cast<double>(space.num_models());
  std::vector<std::size_t> count(n);
  for (std::size_t i = 0; i < n; ++i) {
    count[i] = detail::popcount(space.column_bits(i));
    if (count[i] == 0)
      throw DomainError("inference_vector: proposition " + space.prop_names()[i] +
                        " is satisfied by no model");
  }
  std::vector<double> out;
  out.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    double pa = static_cast<double>(count[a]) / m;
    for (std::size_t b = 0; b < n; ++b) {
      double pb = static_cast<double>(count[b]) / m;
      double conj =
          static_cast<double>(detail::popcount_and(space.column_bits(a), space.column_bits(b))) / m;
      double pab = conj / pb;
      double score;
      if (pab > pa)
        score = (pab - pa) / (1.0 - pa);
      else
        score = (pab - pa) / pa;  // pa > 0 was checked above
      out.push_back(score);
    }
  }
  return out;
}

// Two-pass Pearson correlation coefficient.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw DomainError("pearson: length mismatch");
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return x == y ? 1.0 : 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Best-of-X random subset selection: draw a k-subset, reject it when some
// proposition loses all witnessing models or when the entailment structure
// (the exact +1/-1 entries of the inference vector) changes, and keep the
// survivor with the highest Pearson correlation to the full space.
inline MeaningSpace select_models(const MeaningSpace& space, const SelectionConfig& cfg,
                                  SelectionReport* report_out = nullptr) {
  if (cfg.k < 1 || cfg.k > space.num_models())
    throw DomainError("select_models: k must be in [1, number of models]");
  if (cfg.iterations < 1) throw DomainError("select_models: iterations must be >= 1");

  const std::vector<double> original = inference_vector(space);
  SelectionReport report;
  report.k = cfg.k;
  report.iterations = cfg.iterations;

  Rng rng(cfg.seed);
  std::vector<std::size_t> pool(space.num_models());
  std::vector<std::size_t> chosen;
  MeaningSpace best;
  bool have_best = false;

  for (std::size_t iter = 1; iter <= cfg.iterations; ++iter) {
    std::iota(pool.begin(), pool.end(), 0);
    chosen.clear();
    for (std::size_t i = 0; i < cfg.k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      chosen.push_back(pool[i]);
    }
    std::sort(chosen.begin(), chosen.end());
    MeaningSpace reduced = space.subset(chosen);

    bool informative = true;
    for (std::size_t p = 0; p < reduced.num_props() && informative; ++p)
      if (detail::popcount(reduced.column_bits(p)) == 0) informative = false;
    if (!informative) {
      ++report.rejected_zero_column;
      continue;
    }

    std::vector<double> inf = inference_vector(reduced);
    bool same_hard = true;
    for (std::size_t i = 0; i < inf.size(); ++i) {
      if ((inf[i] == 1.0) != (original[i] == 1.0) || (inf[i] == -1.0) != (original[i] == -1.0)) {
        same_hard = false;
        break;
      }
    }
    if (!same_hard) {
      ++report.rejected_hard_constraints;
      continue;
    }

    ++report.survivors;
    double rho = pearson(inf, original);
    if (!have_best || rho > report.best_rho) {
      have_best = true;
      report.best_rho = rho;
      report.best_iteration = iter;
      best = std::move(reduced);
    }
  }

  if (report_out) *report_out = report;
  if (!have_best)
    throw DomainError("select_models: no subset survived after " + std::to_string(cfg.iterations) +
                      " iterations (zero-column rejections: " +
                      std::to_string(report.rejected_zero_column) + ", hard-constraint rejections: " +
                      std::to_string(report.rejected_hard_constraints) + ")");
  return best;
}

}  // namespace dfs
