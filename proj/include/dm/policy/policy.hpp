#pragma once

// Policy interface shared by the five architectures. A policy owns its
// parameters, knows how to featurize a belief for its own input layout, and
// exposes masked logits plus Q-values over its per-domain action layout.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dm/belief.hpp"
#include "dm/featurize.hpp"
#include "dm/nn/graph.hpp"
#include "dm/nn/tensor.hpp"
#include "dm/ontology.hpp"

namespace dm {

// Compact (binary) feature record, exact for every parametrisation used here;
// this is what replay buffers store.
struct StateFeatures {
  std::string domain;
  std::vector<uint8_t> independent;  // slot-independent DIP vector
  std::vector<uint8_t> slots;        // n_slots x slot_dim, row-major
  uint32_t n_slots = 0;
  std::vector<uint8_t> flat;         // native parametrisation only
};

inline StateFeatures encode_dip(const DipState& dip, const std::string& domain) {
  StateFeatures f;
  f.domain = domain;
  f.independent.reserve(dip.independent.size());
  for (double v : dip.independent) f.independent.push_back(static_cast<uint8_t>(v));
  f.n_slots = static_cast<uint32_t>(dip.slots.size());
  for (const auto& [name, vec] : dip.slots) {
    (void)name;
    for (double v : vec) f.slots.push_back(static_cast<uint8_t>(v));
  }
  return f;
}

inline StateFeatures encode_flat(const std::vector<double>& flat, const std::string& domain) {
  StateFeatures f;
  f.domain = domain;
  f.flat.reserve(flat.size());
  for (double v : flat) f.flat.push_back(static_cast<uint8_t>(v));
  return f;
}

struct GraphOut {
  nn::Graph::Var logits = -1;
  nn::Graph::Var q = -1;
};

struct PolicyOutput {
  std::vector<double> logits;
  std::vector<double> q;
  std::vector<uint8_t> valid;
};

class PolicyNet {
public:
  virtual ~PolicyNet() = default;

  virtual std::string kind() const = 0;
  virtual const Ontology& ontology() const = 0;
  virtual nn::ParamStore& params() = 0;

  double dropout_rate() const { return dropout_rate_; }
  void set_dropout(double rate) { dropout_rate_ = rate; }

  virtual StateFeatures featurize(const BeliefState& belief,
                                  const std::string& domain) const = 0;
  virtual size_t action_dim(const std::string& domain) const = 0;
  virtual const std::vector<uint8_t>& valid_mask(const std::string& domain) const = 0;
  virtual GraphOut forward(nn::Graph& g, const StateFeatures& f, bool train, Rng* rng) = 0;

  virtual std::vector<DialogueAct> expand(size_t action_idx, const BeliefState& belief,
                                          const std::string& domain) const = 0;
  // supervision target: the policy-space index best matching an oracle turn
  virtual int oracle_action_index(const std::vector<DialogueAct>& oracle_acts,
                                  const std::string& domain) const = 0;
  virtual std::string action_label(size_t action_idx, const std::string& domain) const = 0;

  PolicyOutput eval(const StateFeatures& f) {
    nn::Graph g;
    GraphOut out = forward(g, f, /*train=*/false, nullptr);
    return PolicyOutput{g.value(out.logits), g.value(out.q), valid_mask(f.domain)};
  }

protected:
  double dropout_rate_ = 0.1;
};

} // namespace dm
