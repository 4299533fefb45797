#pragma once

// Feed-forward policies over the DIP parametrisation: FNN (one padded network
// for all domains) and HFNN (one exactly-sized network per domain).

#include <map>
#include <string>
#include <vector>

#include "dm/policy/policy.hpp"

namespace dm {

inline constexpr size_t kFnnHidden = 128;

namespace detail {

// Shared two-hidden-layer trunk with twin pi/Q heads.
struct FnnCore {
  nn::Parameter *W0 = nullptr, *b0 = nullptr, *W1 = nullptr, *b1 = nullptr;
  nn::Parameter *pi_W = nullptr, *pi_b = nullptr, *q_W = nullptr, *q_b = nullptr;
  size_t in_dim = 0, out_dim = 0;

  void build(nn::ParamStore& ps, const std::string& prefix, size_t in, size_t out,
             std::mt19937_64& rng) {
    in_dim = in;
    out_dim = out;
    W0 = ps.add(prefix + "/W0", {kFnnHidden, in}, rng, in);
    b0 = ps.add(prefix + "/b0", {kFnnHidden}, rng, in);
    W1 = ps.add(prefix + "/W1", {kFnnHidden, kFnnHidden}, rng, kFnnHidden);
    b1 = ps.add(prefix + "/b1", {kFnnHidden}, rng, kFnnHidden);
    pi_W = ps.add(prefix + "/pi_W", {out, kFnnHidden}, rng, kFnnHidden);
    pi_b = ps.add(prefix + "/pi_b", {out}, rng, kFnnHidden);
    q_W = ps.add(prefix + "/q_W", {out, kFnnHidden}, rng, kFnnHidden);
    q_b = ps.add(prefix + "/q_b", {out}, rng, kFnnHidden);
  }

  GraphOut forward(nn::Graph& g, nn::Graph::Var x, double dropout, bool train,
                   Rng* rng) const {
    auto h0 = g.relu(g.affine(W0, b0, x));
    if (train) h0 = g.dropout(h0, dropout, *rng, true);
    auto h1 = g.relu(g.affine(W1, b1, h0));
    if (train) h1 = g.dropout(h1, dropout, *rng, true);
    return GraphOut{g.affine(pi_W, pi_b, h1), g.affine(q_W, q_b, h1)};
  }
};

} // namespace detail

inline size_t max_slot_count(const Ontology& ont) {
  size_t m = 0;
  for (const auto& d : ont.domains) m = std::max(m, d.slots.size());
  return m;
}

// FNN: DIP input projected to the active domain, zero-padded to the maximum
// slot count so a single network serves every domain. Padding slots are
// masked out of the action space.
class FnnPolicy final : public PolicyNet {
public:
  FnnPolicy(const Ontology& ont, uint64_t seed) : ont_(&ont), max_slots_(max_slot_count(ont)) {
    std::mt19937_64 rng(seed);
    const size_t in = dip_independent_dim(ont) + dip_slot_dim(ont) * max_slots_;
    const size_t out = max_slots_ + ont.general_system_intents.size();
    core_.build(params_, "fnn", in, out, rng);
    for (const auto& d : ont.domains) build_masks(d);
  }

  std::string kind() const override { return "FNN"; }
  const Ontology& ontology() const override { return *ont_; }
  nn::ParamStore& params() override { return params_; }

  StateFeatures featurize(const BeliefState& belief, const std::string& domain) const override {
    return encode_dip(dip_state(project(belief, domain), *ont_), domain);
  }
  size_t action_dim(const std::string&) const override { return core_.out_dim; }
  const std::vector<uint8_t>& valid_mask(const std::string& domain) const override {
    return masks_.at(domain);
  }

  GraphOut forward(nn::Graph& g, const StateFeatures& f, bool train, Rng* rng) override {
    const size_t slot_dim = dip_slot_dim(*ont_);
    std::vector<double> x;
    x.reserve(core_.in_dim);
    for (uint8_t v : f.independent) x.push_back(v);
    for (uint8_t v : f.slots) x.push_back(v);
    x.resize(core_.in_dim, 0.0); // zero padding up to the maximal slot count
    (void)slot_dim;
    return core_.forward(g, g.input(std::move(x)), dropout_rate_, train, rng);
  }

  std::vector<DialogueAct> expand(size_t action_idx, const BeliefState& belief,
                                  const std::string& domain) const override {
    return to_master(*ont_, local_space(domain), to_local(action_idx, domain), belief);
  }
  int oracle_action_index(const std::vector<DialogueAct>& oracle_acts,
                          const std::string& domain) const override {
    if (oracle_acts.empty()) return -1;
    int local = act_to_action_index(*ont_, local_space(domain), oracle_acts.front());
    return local < 0 ? -1 : static_cast<int>(to_padded(static_cast<size_t>(local), domain));
  }
  std::string action_label(size_t action_idx, const std::string& domain) const override {
    return dm::action_label(*ont_, local_space(domain), to_local(action_idx, domain));
  }

private:
  const Ontology* ont_;
  size_t max_slots_;
  nn::ParamStore params_;
  detail::FnnCore core_;
  std::map<std::string, ActionSpace> spaces_;
  std::map<std::string, std::vector<uint8_t>> masks_;

  const ActionSpace& local_space(const std::string& domain) const { return spaces_.at(domain); }
  void build_masks(const DomainSchema& d) {
    ActionSpace sp = build_action_space(*ont_, d.name);
    std::vector<uint8_t> mask(core_.out_dim, 0);
    const size_t n = d.slots.size();
    for (size_t i = 0; i < n; ++i) mask[i] = sp.valid[i];
    for (size_t g = 0; g < ont_->general_system_intents.size(); ++g)
      mask[max_slots_ + g] = sp.valid[n + g];
    spaces_.emplace(d.name, std::move(sp));
    masks_.emplace(d.name, std::move(mask));
  }
  // padded index <-> per-domain action space index
  size_t to_local(size_t padded, const std::string& domain) const {
    const size_t n = ont_->domain(domain).slots.size();
    if (padded < n) return padded;
    if (padded >= max_slots_) return n + (padded - max_slots_);
    throw std::logic_error("padding action is masked");
  }
  size_t to_padded(size_t local, const std::string& domain) const {
    const size_t n = ont_->domain(domain).slots.size();
    return local < n ? local : max_slots_ + (local - n);
  }
};

// HFNN: hierarchical policy, one exactly-sized FNN per domain behind the
// domain-selection step.
class HfnnPolicy final : public PolicyNet {
public:
  HfnnPolicy(const Ontology& ont, uint64_t seed) : ont_(&ont) {
    std::mt19937_64 rng(seed);
    for (const auto& d : ont.domains) {
      detail::FnnCore core;
      const size_t in = dip_independent_dim(ont) + dip_slot_dim(ont) * d.slots.size();
      const size_t out = d.slots.size() + ont.general_system_intents.size();
      core.build(params_, "hfnn/" + d.name, in, out, rng);
      cores_.emplace(d.name, core);
      spaces_.emplace(d.name, build_action_space(ont, d.name));
    }
  }

  std::string kind() const override { return "HFNN"; }
  const Ontology& ontology() const override { return *ont_; }
  nn::ParamStore& params() override { return params_; }

  StateFeatures featurize(const BeliefState& belief, const std::string& domain) const override {
    return encode_dip(dip_state(project(belief, domain), *ont_), domain);
  }
  size_t action_dim(const std::string& domain) const override {
    return cores_.at(domain).out_dim;
  }
  const std::vector<uint8_t>& valid_mask(const std::string& domain) const override {
    return spaces_.at(domain).valid;
  }

  GraphOut forward(nn::Graph& g, const StateFeatures& f, bool train, Rng* rng) override {
    const detail::FnnCore& core = cores_.at(f.domain);
    std::vector<double> x;
    x.reserve(core.in_dim);
    for (uint8_t v : f.independent) x.push_back(v);
    for (uint8_t v : f.slots) x.push_back(v);
    assert(x.size() == core.in_dim);
    return core.forward(g, g.input(std::move(x)), dropout_rate_, train, rng);
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
  nn::ParamStore params_;
  std::map<std::string, detail::FnnCore> cores_;
  std::map<std::string, ActionSpace> spaces_;
};

} // namespace dm
