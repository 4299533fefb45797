#pragma once

// The environment loop binding simulator, tracker and system agent, plus the
// reward scheme and evaluation metrics.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dm/acts.hpp"
#include "dm/belief.hpp"
#include "dm/dialogue.hpp"
#include "dm/ontology.hpp"
#include "dm/oracle.hpp"

namespace dm {

struct SystemAgent {
  virtual ~SystemAgent() = default;
  virtual std::vector<DialogueAct> act(const BeliefState& belief, const std::string& domain) = 0;
  // reward of the turn this agent just played; terminal when the user ended
  // the dialogue in response
  virtual void on_reward(double /*reward*/, bool /*terminal*/) {}
};

struct OracleAgent final : SystemAgent {
  std::vector<DialogueAct> act(const BeliefState& belief, const std::string& domain) override {
    return oracle_act(belief, domain);
  }
};

// ---------------------------------------------------------------------------

struct EpisodeResult {
  int turns = 0; // system turns
  std::map<std::string, bool> solved;
  std::set<std::pair<std::string, std::string>> requested; // objective goal requests
  std::set<std::pair<std::string, std::string>> informed;  // system-provided
  std::map<std::string, bool> book_ok;                     // per book task
  bool success = false;
  bool complete = false;
  double total_reward = 0.0;

  double inform_precision() const {
    size_t inter = 0;
    for (const auto& p : informed) inter += requested.count(p);
    if (informed.empty()) return requested.empty() ? 1.0 : 0.0;
    return static_cast<double>(inter) / static_cast<double>(informed.size());
  }
  double inform_recall() const {
    if (requested.empty()) return 1.0;
    size_t inter = 0;
    for (const auto& p : informed) inter += requested.count(p);
    return static_cast<double>(inter) / static_cast<double>(requested.size());
  }
  double inform_f1() const {
    double p = inform_precision(), r = inform_recall();
    return (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  bool all_books_ok() const {
    for (const auto& [d, ok] : book_ok)
      if (!ok) return false;
    return true;
  }
};

// Objective judge: tracks what the system actually provided against the
// user's (live) goal.
class EpisodeJudge {
public:
  // the goal reference must stay live; relaxations show up through it
  EpisodeJudge(const Ontology& ont, const UserGoal& goal) : ont_(&ont), goal_(&goal) {
    for (const auto& g : goal.domains) {
      for (const auto& s : g.request_slots) result_.requested.insert({g.domain, s});
      if (g.book_constraints) result_.book_ok[g.domain] = false;
      result_.solved[g.domain] = false;
    }
  }

  void observe_system(const std::vector<DialogueAct>& acts, const std::string& active_domain,
                      const BeliefState& belief) {
    for (const DialogueAct& a : acts) {
      if (a.intent == "inform") {
        const SlotDef* s = ont_->domain(a.domain).find_slot(a.slot);
        if (s && !s->is_constraint()) result_.informed.insert({a.domain, a.slot});
      } else if (a.intent == "book") {
        auto it = result_.book_ok.find(active_domain);
        if (it != result_.book_ok.end() && !it->second)
          it->second = booking_meets_goal(active_domain, belief);
      }
    }
  }

  // find task: a consistent offer on the table and every goal request
  // informed; book task: a booking that met the constraints when made
  bool solved(const std::string& domain, const BeliefState& belief) const {
    const DomainGoal* g = goal_of(domain);
    if (!g) return false;
    if (!offer_consistent(*g, belief)) return false;
    for (const auto& s : g->request_slots)
      if (!result_.informed.count({domain, s})) return false;
    if (g->book_constraints) {
      auto it = result_.book_ok.find(domain);
      if (it == result_.book_ok.end() || !it->second) return false;
    }
    return true;
  }

  void mark_solved(const std::string& domain) { result_.solved[domain] = true; }
  bool already_solved(const std::string& domain) const {
    auto it = result_.solved.find(domain);
    return it != result_.solved.end() && it->second;
  }
  bool all_solved() const {
    for (const auto& [d, s] : result_.solved)
      if (!s) return false;
    return true;
  }
  EpisodeResult& result() { return result_; }

private:
  const Ontology* ont_;
  const UserGoal* goal_;
  EpisodeResult result_;

  const DomainGoal* goal_of(const std::string& domain) const {
    for (const auto& g : goal_->domains)
      if (g.domain == domain) return &g;
    return nullptr;
  }
  bool offer_consistent(const DomainGoal& g, const BeliefState& belief) const {
    const DomainBelief& db = belief.of(g.domain);
    if (db.offered.empty()) return false;
    const Entity* e = ont_->domain(g.domain).entity_by_name(db.offered);
    if (!e) return false;
    for (const auto& [slot, value] : g.find_constraints) {
      if (value == kDontcare) continue;
      auto it = e->find(slot);
      if (it == e->end() || it->second != value) return false;
    }
    return true;
  }
  bool booking_meets_goal(const std::string& domain, const BeliefState& belief) const {
    const DomainGoal* g = goal_of(domain);
    if (!g || !g->book_constraints) return false;
    if (!offer_consistent(*g, belief)) return false;
    const DomainBelief& db = belief.of(domain);
    for (const auto& [slot, value] : *g->book_constraints)
      if (db.constraints.at(slot) != value) return false;
    return true;
  }
};

// Per-turn reward: +5 when the active domain transitions to solved (awarded
// once per domain), -1 otherwise; the terminal turn additionally gains +40
// when every goal domain is solved.
inline double turn_reward(EpisodeJudge& judge, const std::string& active_domain,
                          const BeliefState& belief, bool terminal) {
  double r = -1.0;
  // transitions of non-active domains are tracked but never rewarded
  for (const auto& g : belief.ont->domains) {
    if (g.name == active_domain) continue;
    if (!judge.already_solved(g.name) && judge.solved(g.name, belief))
      judge.mark_solved(g.name);
  }
  if (!judge.already_solved(active_domain) && judge.solved(active_domain, belief)) {
    judge.mark_solved(active_domain);
    r = 5.0;
  }
  if (terminal && judge.all_solved()) r += 40.0;
  return r;
}

using TrajectorySink =
    std::function<void(int turn, const std::vector<DialogueAct>& user_acts,
                       const std::vector<DialogueAct>& system_acts, double reward,
                       const BeliefState& belief)>;

inline EpisodeResult run_episode(SystemAgent& agent, AgendaUser& user, const Ontology& ont,
                                 const TrajectorySink& sink = {}) {
  BeliefState belief(ont);
  EpisodeJudge judge(ont, user.goal());

  auto [user_acts, user_done] = user.step({});
  while (true) {
    belief = update(belief, user_acts);
    if (user_done) {
      if (sink) sink(judge.result().turns + 1, user_acts, {}, 0.0, belief);
      break;
    }
    const std::string domain = select_domain(belief, user_acts);
    belief.active_domain = domain;

    std::vector<DialogueAct> system_acts = agent.act(belief, domain);
    apply_system_acts(belief, system_acts, domain);
    judge.observe_system(system_acts, domain, belief);

    auto [next_user_acts, next_done] = user.step(system_acts);
    double r = turn_reward(judge, domain, belief, next_done);
    judge.result().turns += 1;
    judge.result().total_reward += r;
    agent.on_reward(r, next_done);
    if (sink) sink(judge.result().turns, user_acts, system_acts, r, belief);

    user_acts = std::move(next_user_acts);
    user_done = next_done;
  }

  EpisodeResult res = judge.result();
  res.complete = user.satisfied_exit();
  res.success = res.inform_recall() == 1.0 && res.all_books_ok();
  return res;
}

// ---------------------------------------------------------------------------

struct MetricsReport {
  size_t episodes = 0;
  double inform_precision = 0, inform_recall = 0, inform_f1 = 0;
  double book_rate = 0; // over book tasks
  double success = 0, complete = 0;
  double avg_turns_success = 0, avg_turns_all = 0;
  double avg_reward = 0;
};

inline MetricsReport metrics(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw std::invalid_argument("metrics: no episodes");
  MetricsReport r;
  r.episodes = results.size();
  size_t book_tasks = 0, book_ok = 0, successes = 0;
  double turns_success = 0;
  for (const auto& e : results) {
    r.inform_precision += e.inform_precision();
    r.inform_recall += e.inform_recall();
    r.inform_f1 += e.inform_f1();
    r.success += e.success;
    r.complete += e.complete;
    r.avg_turns_all += e.turns;
    r.avg_reward += e.total_reward;
    for (const auto& [d, ok] : e.book_ok) {
      (void)d;
      ++book_tasks;
      book_ok += ok;
    }
    if (e.success) {
      ++successes;
      turns_success += e.turns;
    }
  }
  const double n = static_cast<double>(results.size());
  r.inform_precision /= n;
  r.inform_recall /= n;
  r.inform_f1 /= n;
  r.success /= n;
  r.complete /= n;
  r.avg_turns_all /= n;
  r.avg_reward /= n;
  r.book_rate = book_tasks ? static_cast<double>(book_ok) / static_cast<double>(book_tasks) : 1.0;
  r.avg_turns_success = successes ? turns_success / static_cast<double>(successes) : 0.0;
  return r;
}

} // namespace dm
