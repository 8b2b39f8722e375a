#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dfs/formula.hpp"
#include "dfs/language.hpp"
#include "dfs/meaning_space.hpp"
#include "dfs/rng.hpp"

namespace dfs {

struct TrainConfig {
  double learning_rate = 0.2;
  double momentum = 0.9;
  std::size_t epochs = 10000;
  double zero_error_radius = 0.05;
  double init_range = 0.5;  // weights start uniform in (-init_range, +init_range)
  // Per-component clamp on the momentum-smoothed epoch delta. Gradients are
  // raw sums over the epoch, so the bound sets the early-phase step size;
  // 0.05 converges on the 278-item corpus where larger bounds stall.
  double update_bound = 0.05;
  std::uint64_t seed = 1;
};

namespace detail {

// Row-major dense matrix; just enough for the network.
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double* row(std::size_t r) { return a.data() + r * cols; }
  const double* row(std::size_t r) const { return a.data() + r * cols; }
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

// Simple recurrent network: localist input, logistic hidden and output
// layers, and a context layer holding the previous hidden activation.
// Hidden and output layers have bias weights. The context resets to 0.5 per
// unit at the start of every utterance.
class Srn {
 public:
  Srn() = default;
  Srn(std::size_t input, std::size_t hidden, std::size_t output)
      : input_size(input),
        hidden_size(hidden),
        output_size(output),
        w_ih(input, hidden),  // stored input-major so a one-hot picks a row
        w_ch(hidden, hidden),
        w_ho(output, hidden),
        b_h(hidden, 0.0),
        b_o(output, 0.0),
        context(hidden, 0.5) {}

  std::size_t input_size = 0, hidden_size = 0, output_size = 0;
  detail::Mat w_ih;  // input -> hidden, indexed [input][hidden]
  detail::Mat w_ch;  // context -> hidden, indexed [hidden][hidden]
  detail::Mat w_ho;  // hidden -> output, indexed [output][hidden]
  std::vector<double> b_h, b_o;
  std::vector<double> context;
  TrainConfig config;

  void reset_context() { std::fill(context.begin(), context.end(), 0.5); }

  // Stateless core: activation flows input -> hidden -> output; the caller
  // owns the context vector.
  void propagate(const std::vector<double>& ctx, std::size_t word, std::vector<double>& hidden,
                 std::vector<double>& output) const {
    hidden.resize(hidden_size);
    output.resize(output_size);
    const double* in_row = w_ih.row(word);
    for (std::size_t j = 0; j < hidden_size; ++j) {
      double s = b_h[j] + in_row[j];
      const double* row = w_ch.row(j);
      for (std::size_t k = 0; k < hidden_size; ++k) s += row[k] * ctx[k];
      hidden[j] = detail::logistic(s);
    }
    for (std::size_t j = 0; j < output_size; ++j) {
      double s = b_o[j];
      const double* row = w_ho.row(j);
      for (std::size_t k = 0; k < hidden_size; ++k) s += row[k] * hidden[k];
      output[j] = detail::logistic(s);
    }
  }

  // One processing step: propagate, then copy the hidden pattern into the
  // context layer.
  std::vector<double> forward(std::size_t word) {
    if (word >= input_size) throw DomainError("word index out of range");
    std::vector<double> hidden, output;
    propagate(context, word, hidden, output);
    context = hidden;
    return output;
  }
};

// Weights and biases drawn uniformly from (-init_range, +init_range);
// context at the logistic midpoint.
inline Srn init_network(std::size_t input, std::size_t hidden, std::size_t output,
                        const TrainConfig& cfg, Rng& rng) {
  Srn net(input, hidden, output);
  net.config = cfg;
  auto draw = [&]() { return (rng.next_unit() * 2.0 - 1.0) * cfg.init_range; };
  for (auto& w : net.w_ih.a) w = draw();
  for (auto& w : net.w_ch.a) w = draw();
  for (auto& w : net.w_ho.a) w = draw();
  for (auto& w : net.b_h) w = draw();
  for (auto& w : net.b_o) w = draw();
  return net;
}

// A training item reduced to what the network consumes.
struct EncodedItem {
  std::vector<std::size_t> words;
  std::vector<double> target;  // utterance-final meaning vector
};

namespace detail {

struct Gradients {
  Mat ih, ch, ho;
  std::vector<double> bh, bo;

  explicit Gradients(const Srn& net)
      : ih(net.input_size, net.hidden_size),
        ch(net.hidden_size, net.hidden_size),
        ho(net.output_size, net.hidden_size),
        bh(net.hidden_size, 0.0),
        bo(net.output_size, 0.0) {}

  void clear() {
    std::fill(ih.a.begin(), ih.a.end(), 0.0);
    std::fill(ch.a.begin(), ch.a.end(), 0.0);
    std::fill(ho.a.begin(), ho.a.end(), 0.0);
    std::fill(bh.begin(), bh.end(), 0.0);
    std::fill(bo.begin(), bo.end(), 0.0);
  }
};

inline void apply_momentum_update(std::vector<double>& w, const std::vector<double>& g,
                                  std::vector<double>& velocity, const TrainConfig& cfg) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    double delta = cfg.learning_rate * g[i] + cfg.momentum * velocity[i];
    if (delta > cfg.update_bound) delta = cfg.update_bound;
    if (delta < -cfg.update_bound) delta = -cfg.update_bound;
    velocity[i] = delta;
    w[i] += delta;
  }
}

}  // namespace detail

// Bounded gradient descent with momentum. Per item the context is reset;
// per word the error (target minus output, components inside the zero error
// radius dropped) is backpropagated through the current step only, and
// gradients accumulate over the whole epoch. At the epoch end the momentum-
// smoothed delta, clamped per component to the update bound, is applied.
// Returns the per-epoch loss log (summed squared error per word, averaged
// over items).
inline std::vector<double> train(Srn& net, const std::vector<EncodedItem>& items,
                                 const TrainConfig& cfg) {
  net.config = cfg;
  detail::Gradients grad(net);
  detail::Gradients velocity(net);
  std::vector<double> ctx(net.hidden_size), hidden, output;
  std::vector<double> delta_o(net.output_size), delta_h(net.hidden_size);
  std::vector<double> losses;
  losses.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    grad.clear();
    double epoch_loss = 0.0;
    for (const auto& item : items) {
      std::fill(ctx.begin(), ctx.end(), 0.5);
      for (std::size_t word : item.words) {
        net.propagate(ctx, word, hidden, output);

        double word_loss = 0.0;
        for (std::size_t j = 0; j < net.output_size; ++j) {
          double e = item.target[j] - output[j];
          word_loss += e * e;
          if (e > -cfg.zero_error_radius && e < cfg.zero_error_radius) e = 0.0;
          delta_o[j] = e * output[j] * (1.0 - output[j]);
        }
        epoch_loss += word_loss;

        std::fill(delta_h.begin(), delta_h.end(), 0.0);
        for (std::size_t j = 0; j < net.output_size; ++j) {
          const double* row = net.w_ho.row(j);
          double* grow = grad.ho.row(j);
          const double d = delta_o[j];
          for (std::size_t k = 0; k < net.hidden_size; ++k) {
            delta_h[k] += row[k] * d;
            grow[k] += d * hidden[k];
          }
          grad.bo[j] += d;
        }
        for (std::size_t k = 0; k < net.hidden_size; ++k)
          delta_h[k] *= hidden[k] * (1.0 - hidden[k]);
        {
          double* grow = grad.ih.row(word);
          for (std::size_t k = 0; k < net.hidden_size; ++k) grow[k] += delta_h[k];
        }
        for (std::size_t j = 0; j < net.hidden_size; ++j) {
          double* grow = grad.ch.row(j);
          const double d = delta_h[j];
          for (std::size_t k = 0; k < net.hidden_size; ++k) grow[k] += d * ctx[k];
          grad.bh[j] += d;
        }
        ctx = hidden;
      }
    }
    detail::apply_momentum_update(net.w_ih.a, grad.ih.a, velocity.ih.a, cfg);
    detail::apply_momentum_update(net.w_ch.a, grad.ch.a, velocity.ch.a, cfg);
    detail::apply_momentum_update(net.w_ho.a, grad.ho.a, velocity.ho.a, cfg);
    detail::apply_momentum_update(net.b_h, grad.bh, velocity.bh, cfg);
    detail::apply_momentum_update(net.b_o, grad.bo, velocity.bo, cfg);
    losses.push_back(items.empty() ? 0.0 : epoch_loss / static_cast<double>(items.size()));
  }
  return losses;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct EvalItemResult {
  double cosine_to_target = 0.0;
  std::size_t rank = 0;  // 1 = own target is the nearest of all distinct targets
  double inference = 0.0;
};

struct EvalSummary {
  std::vector<EvalItemResult> per_item;
  double mean_cosine = 0.0;
  double mean_inference = 0.0;
  double top1_fraction = 0.0;
};

// Runs every utterance through the network and scores the utterance-final
// output against all distinct targets (cosine rank) and against its own
// target (cosine and inference score).
inline EvalSummary evaluate(const Srn& net, const std::vector<EncodedItem>& items,
                            const std::vector<std::vector<double>>& distinct_targets,
                            const std::vector<std::size_t>& own_target, const MeaningSpace& space) {
  EvalSummary summary;
  std::vector<double> ctx(net.hidden_size), hidden, output;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::fill(ctx.begin(), ctx.end(), 0.5);
    for (std::size_t w : items[i].words) {
      net.propagate(ctx, w, hidden, output);
      ctx = hidden;
    }
    EvalItemResult r;
    r.cosine_to_target = cosine(output, distinct_targets[own_target[i]]);
    r.rank = 1;
    for (std::size_t t = 0; t < distinct_targets.size(); ++t) {
      if (t == own_target[i]) continue;
      if (cosine(output, distinct_targets[t]) > r.cosine_to_target) ++r.rank;
    }
    MeaningVector out_vec{output, false};
    MeaningVector target_vec{items[i].target, true};
    r.inference = inference_score(space, target_vec, out_vec);
    summary.per_item.push_back(r);
    summary.mean_cosine += r.cosine_to_target;
    summary.mean_inference += r.inference;
    if (r.rank == 1) summary.top1_fraction += 1.0;
  }
  if (!items.empty()) {
    summary.mean_cosine /= static_cast<double>(items.size());
    summary.mean_inference /= static_cast<double>(items.size());
    summary.top1_fraction /= static_cast<double>(items.size());
  }
  return summary;
}

// Word-by-word record of the network's trajectory through meaning space.
struct TraceRecord {
  std::string word;
  MeaningVector output;
  double surprisal_bits = 0.0;
  double entropy_bits = 0.0;
  std::vector<double> prop_inference;  // one score per tracked proposition
};

// Feeds an utterance from a reset context and reports, per word, the
// surprisal of the transition (from the all-ones state before the first
// word), the entropy of the new state, and the inference score of every
// tracked proposition. The network's own context state is not touched.
inline std::vector<TraceRecord> trace(const Srn& net, const MeaningSpace& space,
                                      const std::vector<std::string>& utterance,
                                      const Lexicon& lexicon,
                                      const std::vector<MeaningVector>& tracked) {
  std::vector<TraceRecord> records;
  std::vector<double> ctx(net.hidden_size, 0.5), hidden, output;
  MeaningVector prev = all_ones_vector(space);
  for (const auto& word : utterance) {
    net.propagate(ctx, lexicon.index_of(word), hidden, output);
    ctx = hidden;
    TraceRecord rec;
    rec.word = word;
    rec.output = MeaningVector{output, false};
    rec.surprisal_bits = surprisal(space, prev, rec.output);
    rec.entropy_bits = entropy(space, rec.output);
    for (const auto& p : tracked) rec.prop_inference.push_back(inference_score(space, p, rec.output));
    prev = rec.output;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace dfs
