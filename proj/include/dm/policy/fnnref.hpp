#pragma once

// FNN-REF: the native-parametrisation baseline. Input is the flat multi-domain
// state; output is a fixed catalogue of composite actions harvested from
// oracle self-play (each entry is one oracle turn's summary-act combination).

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dm/dialogue.hpp"
#include "dm/episode.hpp"
#include "dm/policy/fnn.hpp"
#include "dm/policy/policy.hpp"

namespace dm {

inline constexpr uint64_t kCatalogueSeed = 917;
inline constexpr int kCatalogueDialogues = 1000;

// Canonical composite entry: sorted summary-act descriptors
//   "request:<domain>.<slot>" | "inform:<domain>.<slot>" | "general:<intent>"
using CompositeAction = std::vector<std::string>;

inline std::string composite_item(const DialogueAct& a) {
  if (a.domain == kGeneralDomain) return "general:" + a.intent;
  return a.intent + ":" + a.domain + "." + a.slot;
}

inline CompositeAction canonical_composite(const std::vector<DialogueAct>& acts) {
  CompositeAction c;
  for (const auto& a : acts) c.push_back(composite_item(a));
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

inline std::vector<CompositeAction> build_composite_catalogue(
    const Ontology& ont, int n_dialogues = kCatalogueDialogues, uint64_t seed = kCatalogueSeed,
    int max_domains = 2) {
  std::set<CompositeAction> combos;
  Rng rng(seed);
  struct Collector final : SystemAgent {
    OracleAgent oracle;
    std::set<CompositeAction>* out;
    std::vector<DialogueAct> act(const BeliefState& b, const std::string& d) override {
      auto acts = oracle.act(b, d);
      out->insert(canonical_composite(acts));
      return acts;
    }
  } collector;
  collector.out = &combos;
  for (int i = 0; i < n_dialogues; ++i) {
    UserGoal goal = sample_goal(ont, rng, max_domains);
    AgendaUser user(ont, goal);
    run_episode(collector, user, ont);
  }
  return {combos.begin(), combos.end()};
}

inline nlohmann::ordered_json catalogue_to_json(const std::vector<CompositeAction>& cat) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& combo : cat) j.push_back(combo);
  return j;
}

inline std::vector<CompositeAction> catalogue_from_json(const nlohmann::ordered_json& j) {
  std::vector<CompositeAction> cat;
  for (const auto& combo : j) cat.push_back(combo.get<CompositeAction>());
  return cat;
}

inline void save_catalogue(const std::vector<CompositeAction>& cat, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write catalogue: " + path);
  out << catalogue_to_json(cat).dump(1) << "\n";
}

inline std::vector<CompositeAction> load_catalogue(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalogue: " + path);
  nlohmann::ordered_json j;
  in >> j;
  return catalogue_from_json(j);
}

class FnnRefPolicy final : public PolicyNet {
public:
  FnnRefPolicy(const Ontology& ont, uint64_t seed,
               std::vector<CompositeAction> catalogue = {})
      : ont_(&ont),
        catalogue_(catalogue.empty() ? build_composite_catalogue(ont) : std::move(catalogue)) {
    std::mt19937_64 rng(seed);
    core_.build(params_, "fnnref", flat_dim(ont), catalogue_.size(), rng);
    mask_.assign(catalogue_.size(), 1);
    for (size_t i = 0; i < catalogue_.size(); ++i) lookup_[catalogue_[i]] = i;
    for (const auto& d : ont.domains) spaces_.emplace(d.name, build_action_space(ont, d.name));
  }

  std::string kind() const override { return "FNN-REF"; }
  const Ontology& ontology() const override { return *ont_; }
  nn::ParamStore& params() override { return params_; }
  const std::vector<CompositeAction>& catalogue() const { return catalogue_; }

  StateFeatures featurize(const BeliefState& belief, const std::string& domain) const override {
    return encode_flat(flat_state(belief, *ont_), domain);
  }
  size_t action_dim(const std::string&) const override { return catalogue_.size(); }
  const std::vector<uint8_t>& valid_mask(const std::string&) const override { return mask_; }

  GraphOut forward(nn::Graph& g, const StateFeatures& f, bool train, Rng* rng) override {
    return core_.forward(g, g.input(std::span<const uint8_t>(f.flat)), dropout_rate_, train, rng);
  }

  std::vector<DialogueAct> expand(size_t action_idx, const BeliefState& belief,
                                  const std::string& domain) const override {
    std::vector<DialogueAct> acts;
    for (const std::string& item : catalogue_.at(action_idx)) {
      const auto sep = item.find(':');
      const std::string intent = item.substr(0, sep);
      const std::string rest = item.substr(sep + 1);
      if (intent == "general") {
        // offers/bookings execute against the currently active domain
        const ActionSpace& sp = spaces_.at(domain);
        int idx = act_to_action_index(*ont_, sp, general_act(rest));
        if (idx >= 0 && sp.valid[static_cast<size_t>(idx)]) {
          for (auto& a : to_master(*ont_, sp, static_cast<size_t>(idx), belief))
            acts.push_back(std::move(a));
        } else if (rest == "book") {
          acts.push_back(general_act("nobook"));
        } else if (rest == "offer") {
          acts.push_back(general_act("nooffer"));
        } else {
          acts.push_back(general_act(rest));
        }
      } else {
        const auto dot = rest.find('.');
        const std::string dom = rest.substr(0, dot);
        const std::string slot = rest.substr(dot + 1);
        const ActionSpace& sp = spaces_.at(dom);
        int idx = act_to_action_index(*ont_, sp, slot_act(intent, dom, slot));
        if (idx >= 0)
          for (auto& a : to_master(*ont_, sp, static_cast<size_t>(idx), belief))
            acts.push_back(std::move(a));
      }
    }
    return acts;
  }

  int oracle_action_index(const std::vector<DialogueAct>& oracle_acts,
                          const std::string&) const override {
    CompositeAction combo = canonical_composite(oracle_acts);
    auto it = lookup_.find(combo);
    if (it != lookup_.end()) return static_cast<int>(it->second);
    // unseen combination: fall back to the entry with maximal overlap
    size_t best = 0, best_overlap = 0;
    for (size_t i = 0; i < catalogue_.size(); ++i) {
      size_t overlap = 0;
      for (const auto& item : catalogue_[i])
        overlap += std::find(combo.begin(), combo.end(), item) != combo.end();
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = i;
      }
    }
    return static_cast<int>(best);
  }

  std::string action_label(size_t action_idx, const std::string&) const override {
    std::string s = "{";
    for (const auto& item : catalogue_.at(action_idx)) {
      if (s.size() > 1) s += ", ";
      s += item;
    }
    return s + "}";
  }

private:
  const Ontology* ont_;
  std::vector<CompositeAction> catalogue_;
  nn::ParamStore params_;
  detail::FnnCore core_;
  std::vector<uint8_t> mask_;
  std::map<CompositeAction, size_t> lookup_;
  std::map<std::string, ActionSpace> spaces_;
};

} // namespace dm
