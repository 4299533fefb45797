#pragma once

// Transition collection: a system agent that plays either the policy
// (Boltzmann or greedy) or the oracle serialized through the policy's action
// space, records one transition per system turn, and optionally queries the
// oracle for a supervision label on every visited state.

#include <utility>
#include <vector>

#include "dm/episode.hpp"
#include "dm/learn/learner.hpp"
#include "dm/learn/replay.hpp"
#include "dm/oracle.hpp"
#include "dm/policy/policy.hpp"

namespace dm {

class TransitionCollector final : public SystemAgent {
public:
  struct Options {
    bool demo = false;          // oracle rolls out the whole episode
    bool greedy = false;        // evaluation mode, no exploration
    bool oracle_labels = false; // attach the expert action to every transition
    double temperature = 1.0;
  };

  TransitionCollector(PolicyNet& policy, Rng& rng, Options opt)
      : policy_(&policy), rng_(&rng), opt_(opt) {}

  std::vector<DialogueAct> act(const BeliefState& belief, const std::string& domain) override {
    StateFeatures f = policy_->featurize(belief, domain);
    finish_pending(&f);

    int action;
    double mu;
    if (opt_.demo) {
      action = policy_->oracle_action_index(oracle_act(belief, domain), domain);
      mu = 1.0; // the teacher is deterministic
    } else {
      PolicyOutput out = policy_->eval(f);
      ActionChoice choice = select_action(
          out, *rng_, opt_.greedy ? SelectMode::Greedy : SelectMode::Boltzmann,
          opt_.temperature);
      action = choice.index;
      mu = choice.prob;
    }

    pending_ = Transition{};
    pending_.features = std::move(f);
    pending_.action = action;
    pending_.behavior_prob = mu;
    pending_.oracle_generated = opt_.demo;
    if (opt_.oracle_labels || opt_.demo)
      pending_.oracle_action =
          opt_.demo ? action : policy_->oracle_action_index(oracle_act(belief, domain), domain);
    has_pending_ = true;

    return policy_->expand(static_cast<size_t>(action), belief, domain);
  }

  void on_reward(double reward, bool terminal) override {
    if (!has_pending_) return;
    pending_.reward = reward;
    pending_.terminal = terminal;
    if (terminal) finish_pending(nullptr);
  }

  std::vector<Transition>& transitions() { return transitions_; }

private:
  PolicyNet* policy_;
  Rng* rng_;
  Options opt_;
  Transition pending_;
  bool has_pending_ = false;
  std::vector<Transition> transitions_;

  void finish_pending(const StateFeatures* next) {
    if (!has_pending_) return;
    if (next) pending_.next_features = *next;
    transitions_.push_back(std::move(pending_));
    pending_ = Transition{};
    has_pending_ = false;
  }
};

struct CollectStats {
  EpisodeResult result;
  bool demo = false;
  size_t transitions = 0;
};

// One episode of experience into the buffer. With probability `mix` the whole
// episode is a demonstration rolled out by the oracle; labels are attached
// when `oracle_labels` is set (behaviour cloning and ILfOS).
inline CollectStats collect_episode(PolicyNet& policy, const Ontology& ont, ReplayBuffer& buffer,
                                    Rng& rng, double mix, bool oracle_labels, int max_domains,
                                    int patience) {
  CollectStats stats;
  stats.demo = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < mix;

  UserGoal goal = sample_goal(ont, rng, max_domains);
  AgendaUser user(ont, goal, patience);
  TransitionCollector collector(
      policy, rng, {.demo = stats.demo, .greedy = false, .oracle_labels = oracle_labels});
  stats.result = run_episode(collector, user, ont);
  stats.transitions = collector.transitions().size();
  for (auto& t : collector.transitions()) buffer.push(std::move(t));
  return stats;
}

} // namespace dm
