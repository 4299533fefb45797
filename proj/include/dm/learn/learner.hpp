#pragma once

// Off-policy actor-critic updates with the imitation variants.
//
// Per sample, with detached target y = r + gamma * sum_a pi(a|s') Q(s',a):
//   critic   lambda_q  * (Q(s,a) - y)^2
//   actor   -lambda_pi * rho * A * log pi(a|s),  rho = min(c, pi(a|s)/mu(a|s))
//                                                A = Q(s,a) - sum_a pi Q  (detached)
//   entropy -lambda_ent * H(pi(.|s))
// ILfOS adds  lambda_il * [ max_a(Q(s,a) + margin * 1{a != a_E}) - Q(s,a_E) ]
// over valid actions; behaviour cloning trains the cross-entropy alone.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dm/learn/replay.hpp"
#include "dm/nn/adam.hpp"
#include "dm/nn/graph.hpp"
#include "dm/policy/policy.hpp"

namespace dm {

struct LossWeights {
  double lambda_q = 0.5;
  double lambda_pi = 1.0;
  double lambda_il = 1.0;
  double lambda_ent = 0.01;
  double margin = std::log(2.0); // ILfOS margin penalty
  double temperature = 1.0;      // Boltzmann exploration
  double gamma = 0.99;
  double ratio_clip = 10.0; // truncation of the off-policy ratio
};

struct LossReport {
  double l_q = 0, l_pi = 0, l_il = 0, l_ent = 0;
  double total() const { return l_q + l_pi + l_il + l_ent; } // already weighted
};

enum class SelectMode { Boltzmann, Greedy };

struct ActionChoice {
  int index = -1;
  double prob = 0.0;
};

inline ActionChoice select_action(const PolicyOutput& out, Rng& rng, SelectMode mode,
                                  double temperature = 1.0) {
  bool any = false;
  for (uint8_t v : out.valid) any |= v != 0;
  if (!any) throw std::logic_error("select_action: all actions masked");

  std::vector<double> probs = nn::masked_softmax_values(out.logits, out.valid, temperature);
  if (mode == SelectMode::Greedy) {
    size_t best = 0;
    bool seen = false;
    for (size_t i = 0; i < out.logits.size(); ++i) {
      if (!out.valid[i]) continue;
      if (!seen || out.logits[i] > out.logits[best]) {
        best = i;
        seen = true;
      }
    }
    return {static_cast<int>(best), probs[best]};
  }
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0;
  size_t last_valid = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (!out.valid[i]) continue;
    last_valid = i;
    acc += probs[i];
    if (u < acc) return {static_cast<int>(i), probs[i]};
  }
  return {static_cast<int>(last_valid), probs[last_valid]}; // rounding tail
}

namespace detail {

struct BatchLoss {
  nn::Graph::Var total = -1;
  LossReport report;
};

enum class LossMode { Acer, AcerMargin, CrossEntropy };

inline BatchLoss build_batch_loss(nn::Graph& g, PolicyNet& policy,
                                  const std::vector<const Transition*>& batch,
                                  const LossWeights& w, Rng& rng, LossMode mode) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<nn::Graph::Var> losses;
  losses.reserve(batch.size());
  LossReport rep;

  for (const Transition* t : batch) {
    const auto& mask = policy.valid_mask(t->features.domain);
    GraphOut out = policy.forward(g, t->features, /*train=*/true, &rng);
    auto logp = g.masked_log_softmax(out.logits, mask);

    if (mode == LossMode::CrossEntropy) {
      if (t->oracle_action < 0) throw std::invalid_argument("bc_update: missing oracle action");
      auto ce = g.scale(g.pick(logp, static_cast<size_t>(t->oracle_action)), -1.0);
      rep.l_il += g.scalar(ce);
      losses.push_back(ce);
      continue;
    }

    // bootstrap target from the live network, detached, eval mode
    double y = t->reward;
    if (!t->terminal) {
      PolicyOutput next = policy.eval(t->next_features);
      std::vector<double> next_probs = nn::masked_softmax_values(next.logits, next.valid);
      for (size_t a = 0; a < next_probs.size(); ++a)
        if (next.valid[a]) y += w.gamma * next_probs[a] * next.q[a];
    }

    const size_t a = static_cast<size_t>(t->action);
    auto critic = g.square(g.sub(g.pick(out.q, a), g.constant(y)));

    // advantage and truncated ratio from detached values
    const std::vector<double>& qv = g.value(out.q);
    std::vector<double> probs = nn::masked_softmax_values(g.value(out.logits), mask);
    double v = 0;
    for (size_t i = 0; i < probs.size(); ++i)
      if (mask[i]) v += probs[i] * qv[i];
    const double advantage = qv[a] - v;
    const double rho = std::min(w.ratio_clip, probs[a] / std::max(t->behavior_prob, 1e-12));

    auto actor = g.scale(g.pick(logp, a), -rho * advantage);
    auto probs_var = g.exp(logp);
    auto neg_entropy = g.dot(probs_var, logp);

    auto sample = g.add(g.add(g.scale(critic, w.lambda_q), g.scale(actor, w.lambda_pi)),
                        g.scale(neg_entropy, w.lambda_ent));

    rep.l_q += g.scalar(critic);
    rep.l_pi += g.scalar(actor);
    rep.l_ent += g.scalar(neg_entropy);

    if (mode == LossMode::AcerMargin) {
      if (t->oracle_action < 0)
        throw std::invalid_argument("ilfos_update: missing oracle action");
      const size_t ae = static_cast<size_t>(t->oracle_action);
      std::vector<double> bump(mask.size(), nn::kMaskValue);
      for (size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) bump[i] = (i == ae) ? 0.0 : w.margin;
      auto margin =
          g.sub(g.vmax(g.add(out.q, g.input(std::move(bump)))), g.pick(out.q, ae));
      rep.l_il += g.scalar(margin);
      sample = g.add(sample, g.scale(margin, w.lambda_il));
    }
    losses.push_back(sample);
  }

  const double n = static_cast<double>(batch.size());
  if (mode == LossMode::CrossEntropy) {
    rep.l_il = rep.l_il / n; // plain cross-entropy, reported under the IL term
  } else {
    rep.l_q = w.lambda_q * rep.l_q / n;
    rep.l_pi = w.lambda_pi * rep.l_pi / n;
    rep.l_ent = w.lambda_ent * rep.l_ent / n;
    rep.l_il = w.lambda_il * rep.l_il / n;
  }
  return {g.mean_of(std::move(losses)), rep};
}

inline LossReport run_update(PolicyNet& policy, const std::vector<const Transition*>& batch,
                             const LossWeights& w, nn::Adam& opt, Rng& rng, LossMode mode) {
  policy.params().zero_grads();
  nn::Graph g;
  detail::BatchLoss loss = detail::build_batch_loss(g, policy, batch, w, rng, mode);
  g.backward(loss.total);
  opt.step(policy.params());
  return loss.report;
}

} // namespace detail

inline LossReport acer_update(PolicyNet& policy, const std::vector<const Transition*>& batch,
                              const LossWeights& w, nn::Adam& opt, Rng& rng) {
  return detail::run_update(policy, batch, w, opt, rng, detail::LossMode::Acer);
}

inline LossReport bc_update(PolicyNet& policy, const std::vector<const Transition*>& batch,
                            const LossWeights& w, nn::Adam& opt, Rng& rng) {
  return detail::run_update(policy, batch, w, opt, rng, detail::LossMode::CrossEntropy);
}

inline LossReport ilfos_update(PolicyNet& policy, const std::vector<const Transition*>& batch,
                               const LossWeights& w, nn::Adam& opt, Rng& rng) {
  return detail::run_update(policy, batch, w, opt, rng, detail::LossMode::AcerMargin);
}

} // namespace dm
