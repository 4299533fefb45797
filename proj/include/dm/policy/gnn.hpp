#pragma once

// GNN policies over the DIP node structure: slot nodes (S) plus one
// slot-independent node (I), fully connected with typed edges S2S, S2I and
// I2S. All S-nodes share their embedder, relation and head weights, so the
// parameter count does not depend on the number of slots.
//
// Forward pass (one message-passing round, mean aggregation, residual self
// connection):
//   h_s^0 = relu(W_S x_s + b_S)          h_I^0 = relu(W_I x_d + b_I)
//   h_s^1 = relu(mean_{s' != s} W_S2S h_{s'}^0 + W_I2S h_I^0 + h_s^0)
//   h_I^1 = relu(mean_s W_S2I h_s^0 + h_I^0)
// Slot logits/Q come from a shared per-slot head on h_s^1 (2 outputs: request
// and inform; the slot's kind selects the relevant one), general logits/Q
// from a head on h_I^1.

#include <map>
#include <string>
#include <vector>

#include "dm/policy/policy.hpp"

namespace dm {

inline constexpr size_t kGnnNodeHidden = 32;

namespace detail {

struct GnnCore {
  nn::Parameter *W_S = nullptr, *b_S = nullptr, *W_I = nullptr, *b_I = nullptr;
  nn::Parameter *W_S2S = nullptr, *W_S2I = nullptr, *W_I2S = nullptr;
  nn::Parameter *pi_S = nullptr, *pi_S_b = nullptr, *pi_I = nullptr, *pi_I_b = nullptr;
  nn::Parameter *q_S = nullptr, *q_S_b = nullptr, *q_I = nullptr, *q_I_b = nullptr;
  size_t slot_dim = 0, indep_dim = 0, n_general = 0;

  void build(nn::ParamStore& ps, const std::string& prefix, size_t slot_in, size_t indep_in,
             size_t general_out, std::mt19937_64& rng) {
    slot_dim = slot_in;
    indep_dim = indep_in;
    n_general = general_out;
    const size_t H = kGnnNodeHidden;
    W_S = ps.add(prefix + "/W_S", {H, slot_in}, rng, slot_in);
    b_S = ps.add(prefix + "/b_S", {H}, rng, slot_in);
    W_I = ps.add(prefix + "/W_I", {H, indep_in}, rng, indep_in);
    b_I = ps.add(prefix + "/b_I", {H}, rng, indep_in);
    W_S2S = ps.add(prefix + "/W_S2S", {H, H}, rng, H);
    W_S2I = ps.add(prefix + "/W_S2I", {H, H}, rng, H);
    W_I2S = ps.add(prefix + "/W_I2S", {H, H}, rng, H);
    pi_S = ps.add(prefix + "/pi_S", {2, H}, rng, H);
    pi_S_b = ps.add(prefix + "/pi_S_b", {2}, rng, H);
    pi_I = ps.add(prefix + "/pi_I", {general_out, H}, rng, H);
    pi_I_b = ps.add(prefix + "/pi_I_b", {general_out}, rng, H);
    q_S = ps.add(prefix + "/q_S", {2, H}, rng, H);
    q_S_b = ps.add(prefix + "/q_S_b", {2}, rng, H);
    q_I = ps.add(prefix + "/q_I", {general_out, H}, rng, H);
    q_I_b = ps.add(prefix + "/q_I_b", {general_out}, rng, H);
  }

  // slot_kinds[i] selects the relevant head output: 0 = request, 1 = inform
  GraphOut forward(nn::Graph& g, const StateFeatures& f, const std::vector<int>& slot_kinds,
                   double dropout, bool train, Rng* rng) const {
    const size_t n = f.n_slots;
    assert(n >= 1 && "GNN needs at least one slot node");
    assert(f.slots.size() == n * slot_dim);

    auto maybe_dropout = [&](nn::Graph::Var v) {
      return train ? g.dropout(v, dropout, *rng, true) : v;
    };

    std::vector<nn::Graph::Var> h0(n);
    for (size_t i = 0; i < n; ++i) {
      auto x = g.input(std::span<const uint8_t>(f.slots.data() + i * slot_dim, slot_dim));
      h0[i] = maybe_dropout(g.relu(g.affine(W_S, b_S, x)));
    }
    auto hI0 = maybe_dropout(
        g.relu(g.affine(W_I, b_I, g.input(std::span<const uint8_t>(f.independent)))));

    std::vector<nn::Graph::Var> s2s(n);
    for (size_t i = 0; i < n; ++i) s2s[i] = g.matvec(W_S2S, h0[i]);
    auto i2s = g.matvec(W_I2S, hI0);

    std::vector<nn::Graph::Var> h1(n);
    for (size_t i = 0; i < n; ++i) {
      nn::Graph::Var msg;
      if (n == 1) {
        msg = g.zeros(kGnnNodeHidden); // single-slot domains get a zero S2S message
      } else {
        std::vector<nn::Graph::Var> others;
        others.reserve(n - 1);
        for (size_t j = 0; j < n; ++j)
          if (j != i) others.push_back(s2s[j]);
        msg = g.mean_of(std::move(others));
      }
      h1[i] = maybe_dropout(g.relu(g.add(g.add(msg, i2s), h0[i])));
    }
    std::vector<nn::Graph::Var> s2i(n);
    for (size_t i = 0; i < n; ++i) s2i[i] = g.matvec(W_S2I, h0[i]);
    auto hI1 = maybe_dropout(g.relu(g.add(g.mean_of(std::move(s2i)), hI0)));

    std::vector<nn::Graph::Var> logit_parts, q_parts;
    logit_parts.reserve(n + 1);
    q_parts.reserve(n + 1);
    for (size_t i = 0; i < n; ++i) {
      const size_t pick = static_cast<size_t>(slot_kinds[i]);
      logit_parts.push_back(g.pick(g.affine(pi_S, pi_S_b, h1[i]), pick));
      q_parts.push_back(g.pick(g.affine(q_S, q_S_b, h1[i]), pick));
    }
    logit_parts.push_back(g.affine(pi_I, pi_I_b, hI1));
    q_parts.push_back(g.affine(q_I, q_I_b, hI1));
    return GraphOut{g.concat(logit_parts), g.concat(q_parts)};
  }
};

} // namespace detail

// Shared scaffolding for HGNN (one core per domain) and UHGNN (single core).
class GnnPolicyBase : public PolicyNet {
public:
  GnnPolicyBase(const Ontology& ont, bool unique_core, uint64_t seed)
      : ont_(&ont), unique_core_(unique_core) {
    std::mt19937_64 rng(seed);
    const size_t slot_in = dip_slot_dim(ont);
    const size_t indep_in = dip_independent_dim(ont);
    const size_t general_out = ont.general_system_intents.size();
    if (unique_core) {
      shared_.build(params_, "uhgnn", slot_in, indep_in, general_out, rng);
    } else {
      for (const auto& d : ont.domains) {
        detail::GnnCore core;
        core.build(params_, "hgnn/" + d.name, slot_in, indep_in, general_out, rng);
        cores_.emplace(d.name, core);
      }
    }
    for (const auto& d : ont.domains) {
      spaces_.emplace(d.name, build_action_space(ont, d.name));
      std::vector<int> kinds;
      for (const auto& s : d.slots) kinds.push_back(s.is_constraint() ? 0 : 1);
      slot_kinds_.emplace(d.name, std::move(kinds));
    }
  }

  std::string kind() const override { return unique_core_ ? "UHGNN" : "HGNN"; }
  const Ontology& ontology() const override { return *ont_; }
  nn::ParamStore& params() override { return params_; }

  StateFeatures featurize(const BeliefState& belief, const std::string& domain) const override {
    return encode_dip(dip_state(project(belief, domain), *ont_), domain);
  }
  size_t action_dim(const std::string& domain) const override {
    return spaces_.at(domain).size();
  }
  const std::vector<uint8_t>& valid_mask(const std::string& domain) const override {
    return spaces_.at(domain).valid;
  }

  GraphOut forward(nn::Graph& g, const StateFeatures& f, bool train, Rng* rng) override {
    const detail::GnnCore& core = unique_core_ ? shared_ : cores_.at(f.domain);
    return core.forward(g, f, slot_kinds_.at(f.domain), dropout_rate_, train, rng);
  }

  std::vector<DialogueAct> expand(size_t action_idx, const BeliefState& belief,
                                  const std::string& domain) const override {
    return to_master(*ont_, spaces_.at(domain), action_idx, belief);
  }
  int oracle_action_index(const std::vector<DialogueAct>& oracle_acts,
                          const std::string& domain) const override {
    if (oracle_acts.empty()) return -1;
    return act_to_action_index(*ont_, spaces_.at(domain), oracle_acts.front());
  }
  std::string action_label(size_t action_idx, const std::string& domain) const override {
    return dm::action_label(*ont_, spaces_.at(domain), action_idx);
  }

private:
  const Ontology* ont_;
  bool unique_core_;
  nn::ParamStore params_;
  detail::GnnCore shared_;
  std::map<std::string, detail::GnnCore> cores_;
  std::map<std::string, ActionSpace> spaces_;
  std::map<std::string, std::vector<int>> slot_kinds_;
};

class HgnnPolicy final : public GnnPolicyBase {
public:
  HgnnPolicy(const Ontology& ont, uint64_t seed) : GnnPolicyBase(ont, false, seed) {}
};

class UhgnnPolicy final : public GnnPolicyBase {
public:
  UhgnnPolicy(const Ontology& ont, uint64_t seed) : GnnPolicyBase(ont, true, seed) {}
};

} // namespace dm
