#pragma once

// User goals and the agenda-based simulated user. The user keeps a stack of
// pending acts derived from its goal, reacts to system acts by pushing
// responses, and speaks up to two acts per turn, one domain at a time.

#include <cassert>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dm/acts.hpp"
#include "dm/ontology.hpp"

namespace dm {

struct DomainGoal {
  std::string domain;
  std::map<std::string, std::string> find_constraints; // slot -> value
  std::vector<std::string> request_slots;              // schema order
  std::optional<std::map<std::string, std::string>> book_constraints;
};

struct UserGoal {
  std::vector<DomainGoal> domains; // visit order
};

// Samples 1..max_domains distinct domains; constraints are copied from a
// database entity so the conjunction is always satisfiable.
inline UserGoal sample_goal(const Ontology& ont, Rng& rng, int max_domains) {
  assert(max_domains >= 1);
  auto unif = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  UserGoal goal;
  const int n_avail = static_cast<int>(ont.domains.size());
  const int n_domains = unif(1, std::min(max_domains, n_avail));
  std::vector<int> order(static_cast<size_t>(n_avail));
  for (int i = 0; i < n_avail; ++i) order[static_cast<size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);

  for (int k = 0; k < n_domains; ++k) {
    const DomainSchema& d = ont.domains[static_cast<size_t>(order[static_cast<size_t>(k)])];
    DomainGoal g;
    g.domain = d.name;
    const Entity& seed = d.database[static_cast<size_t>(
        unif(0, static_cast<int>(d.database.size()) - 1))];

    auto find_slots = d.slots_of(SlotKind::ConstraintFind);
    if (!find_slots.empty()) {
      int n_constraints = unif(1, static_cast<int>(find_slots.size()));
      std::vector<size_t> idx(find_slots.size());
      for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<size_t>(n_constraints));
      std::sort(idx.begin(), idx.end()); // keep schema order
      for (size_t i : idx)
        g.find_constraints[find_slots[i]->name] = seed.at(find_slots[i]->name);
    }

    auto req_slots = d.slots_of(SlotKind::Requestable);
    if (!req_slots.empty()) {
      int n_req = unif(1, static_cast<int>(req_slots.size()));
      std::vector<size_t> idx(req_slots.size());
      for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<size_t>(n_req));
      std::sort(idx.begin(), idx.end());
      for (size_t i : idx) g.request_slots.push_back(req_slots[i]->name);
    }

    auto book_slots = d.slots_of(SlotKind::ConstraintBook);
    if (!book_slots.empty() && unif(0, 1) == 1) {
      std::map<std::string, std::string> book;
      for (const SlotDef* s : book_slots)
        book[s->name] = s->values[static_cast<size_t>(
            unif(0, static_cast<int>(s->values.size()) - 1))];
      g.book_constraints = std::move(book);
    }

    assert(!query(d, g.find_constraints).empty());
    goal.domains.push_back(std::move(g));
  }
  return goal;
}

// ---------------------------------------------------------------------------

class AgendaUser {
public:
  AgendaUser(const Ontology& ont, UserGoal goal, int patience = 40)
      : ont_(&ont), goal_(std::move(goal)), patience_(patience) {
    state_.resize(goal_.domains.size());
    for (size_t i = 0; i < goal_.domains.size(); ++i)
      state_[i].book_wanted = goal_.domains[i].book_constraints.has_value();
  }

  bool terminated() const { return terminated_; }
  bool all_satisfied() const {
    for (size_t i = 0; i < goal_.domains.size(); ++i)
      if (!satisfied(i)) return false;
    return true;
  }
  const UserGoal& goal() const { return goal_; } // live: relaxations show up here
  int turns_taken() const { return turns_; }

  // Processes the system acts, then speaks. Returns (acts, done).
  std::pair<std::vector<DialogueAct>, bool> step(const std::vector<DialogueAct>& system_acts) {
    assert(!terminated_);
    bool system_reqmore = false;
    const int cur_before = current_domain();
    for (const DialogueAct& a : system_acts)
      system_reqmore |= process_system_act(a, cur_before);

    ++turns_;
    if (all_satisfied()) {
      terminated_ = true;
      satisfied_exit_ = true;
      std::vector<DialogueAct> acts;
      acts.push_back(general_act(system_reqmore ? "reqmore-answer" : "thank"));
      acts.push_back(general_act("bye"));
      return {acts, true};
    }
    if (turns_ > patience_) {
      terminated_ = true;
      return {{general_act("bye")}, true};
    }

    const int cur = current_domain();
    if (cur >= 0) {
      load_initial(static_cast<size_t>(cur));
      if (!has_pending_for(static_cast<size_t>(cur))) nudge(static_cast<size_t>(cur));
    }
    std::vector<DialogueAct> acts = pop_turn();
    if (acts.empty()) acts.push_back(general_act("thank")); // should not happen
    return {acts, false};
  }

  bool satisfied_exit() const { return satisfied_exit_; } // user-side completion

private:
  struct DomainState {
    bool offer_received = false;
    std::string offered_name;
    std::set<std::string> requests_answered;
    bool booked = false;
    bool book_wanted = false;
    bool informs_loaded = false;
    bool requests_loaded = false;
    bool book_loaded = false;
    std::vector<std::string> inform_order; // most recent last, for relaxation
  };

  const Ontology* ont_;
  UserGoal goal_;
  std::vector<DomainState> state_;
  std::vector<DialogueAct> agenda_; // back = top of stack
  int patience_;
  int turns_ = 0;
  bool terminated_ = false;
  bool satisfied_exit_ = false;

  int goal_index(const std::string& domain) const {
    for (size_t i = 0; i < goal_.domains.size(); ++i)
      if (goal_.domains[i].domain == domain) return static_cast<int>(i);
    return -1;
  }
  bool satisfied(size_t i) const {
    const DomainGoal& g = goal_.domains[i];
    const DomainState& st = state_[i];
    if (!st.offer_received) return false;
    for (const auto& s : g.request_slots)
      if (!st.requests_answered.count(s)) return false;
    if (st.book_wanted && !st.booked) return false;
    return true;
  }
  int current_domain() const {
    for (size_t i = 0; i < goal_.domains.size(); ++i)
      if (!satisfied(i)) return static_cast<int>(i);
    return -1;
  }

  void push(DialogueAct a) { // skip exact duplicates already pending
    for (const auto& x : agenda_)
      if (x == a) return;
    agenda_.push_back(std::move(a));
  }
  void push_pending_requests(size_t i) {
    const DomainGoal& g = goal_.domains[i];
    // reverse so pops come out in goal order
    for (auto it = g.request_slots.rbegin(); it != g.request_slots.rend(); ++it)
      if (!state_[i].requests_answered.count(*it))
        push(slot_act("request", g.domain, *it));
  }
  void push_book_informs(size_t i) {
    const DomainGoal& g = goal_.domains[i];
    if (!g.book_constraints) return;
    for (auto it = g.book_constraints->rbegin(); it != g.book_constraints->rend(); ++it)
      push(slot_act("inform", g.domain, it->first, it->second));
  }
  void load_initial(size_t i) {
    DomainState& st = state_[i];
    const DomainGoal& g = goal_.domains[i];
    if (!st.informs_loaded) {
      st.informs_loaded = true;
      for (auto it = g.find_constraints.rbegin(); it != g.find_constraints.rend(); ++it)
        push(slot_act("inform", g.domain, it->first, it->second));
      if (g.find_constraints.empty() && !st.requests_loaded) {
        // nothing to constrain on; open with the requests themselves
        st.requests_loaded = true;
        push_pending_requests(i);
      }
    }
  }
  void nudge(size_t i) {
    DomainState& st = state_[i];
    const DomainGoal& g = goal_.domains[i];
    if (st.offer_received) {
      bool pending = false;
      for (const auto& s : g.request_slots)
        if (!st.requests_answered.count(s)) pending = true;
      if (pending) {
        push_pending_requests(i);
        return;
      }
      if (st.book_wanted && !st.booked) {
        push_book_informs(i);
        return;
      }
    }
    // no offer yet: repeat the latest constraint, or a request for
    // constraint-free domains
    if (!st.inform_order.empty()) {
      const std::string& s = st.inform_order.back();
      push(slot_act("inform", g.domain, s, g.find_constraints.at(s)));
    } else if (!g.find_constraints.empty()) {
      auto it = g.find_constraints.begin();
      push(slot_act("inform", g.domain, it->first, it->second));
    } else {
      push_pending_requests(i);
    }
  }
  bool has_pending_for(size_t i) const {
    for (auto it = agenda_.rbegin(); it != agenda_.rend(); ++it)
      if (it->domain == goal_.domains[i].domain) return true;
    return false;
  }

  // goal find constraints the offered entity fails; an unresolvable entity
  // name violates everything still unmet
  std::vector<std::string> violated_constraints(const DomainGoal& g,
                                                const std::string& entity_name) const {
    std::vector<std::string> out;
    const DomainSchema& schema = ont_->domain(g.domain);
    const Entity* e = schema.entity_by_name(entity_name);
    for (const auto& s : schema.slots) {
      if (s.kind != SlotKind::ConstraintFind) continue;
      auto it = g.find_constraints.find(s.name);
      if (it == g.find_constraints.end() || it->second == kDontcare) continue;
      if (!e || e->at(s.name) != it->second) out.push_back(s.name);
    }
    return out;
  }

  // Returns true when the act was a reqmore.
  bool process_system_act(const DialogueAct& a, int cur) {
    if (a.intent == "inform") {
      int gi = goal_index(a.domain);
      if (gi < 0) return false;
      const DomainGoal& g = goal_.domains[static_cast<size_t>(gi)];
      if (std::find(g.request_slots.begin(), g.request_slots.end(), a.slot) !=
          g.request_slots.end())
        state_[static_cast<size_t>(gi)].requests_answered.insert(a.slot);
      return false;
    }
    if (a.intent == "request") {
      int gi = goal_index(a.domain);
      if (gi < 0) return false;
      const DomainGoal& g = goal_.domains[static_cast<size_t>(gi)];
      std::string value = kDontcare;
      if (auto it = g.find_constraints.find(a.slot); it != g.find_constraints.end())
        value = it->second;
      else if (g.book_constraints)
        if (auto bt = g.book_constraints->find(a.slot); bt != g.book_constraints->end())
          value = bt->second;
      push(slot_act("inform", a.domain, a.slot, value));
      return false;
    }
    if (cur < 0) return a.intent == "reqmore";
    DomainState& st = state_[static_cast<size_t>(cur)];
    DomainGoal& g = goal_.domains[static_cast<size_t>(cur)];
    if (a.intent == "offer") {
      // accept only an offer consistent with the whole goal; otherwise
      // re-assert the violated constraints
      std::vector<std::string> violated = violated_constraints(g, a.value);
      if (violated.empty()) {
        st.offer_received = true;
        st.offered_name = a.value;
        if (!st.requests_loaded) {
          st.requests_loaded = true;
          push_pending_requests(static_cast<size_t>(cur));
        }
        if (st.book_wanted && !st.book_loaded) {
          st.book_loaded = true;
          push_book_informs(static_cast<size_t>(cur));
        }
      } else {
        for (auto it = violated.rbegin(); it != violated.rend(); ++it)
          push(slot_act("inform", g.domain, *it, g.find_constraints.at(*it)));
      }
    } else if (a.intent == "book") {
      st.booked = true;
    } else if (a.intent == "nooffer") {
      // relax the most recently informed constraint and re-inform it
      for (auto it = st.inform_order.rbegin(); it != st.inform_order.rend(); ++it) {
        auto ct = g.find_constraints.find(*it);
        if (ct != g.find_constraints.end() && ct->second != kDontcare) {
          ct->second = kDontcare;
          push(slot_act("inform", g.domain, *it, kDontcare));
          break;
        }
      }
    } else if (a.intent == "nobook") {
      if (st.book_wanted && !st.booked && g.book_constraints) {
        auto it = g.book_constraints->begin();
        push(slot_act("inform", g.domain, it->first, it->second));
      }
    } else if (a.intent == "reqmore") {
      return true;
    }
    return false;
  }

  std::vector<DialogueAct> pop_turn() {
    std::vector<DialogueAct> acts;
    std::string turn_domain;
    while (static_cast<int>(acts.size()) < 2 && !agenda_.empty()) {
      DialogueAct& top = agenda_.back();
      // drop stale items
      int gi = goal_index(top.domain);
      bool stale = false;
      if (gi >= 0) {
        if (satisfied(static_cast<size_t>(gi))) stale = true;
        if (top.intent == "request" &&
            state_[static_cast<size_t>(gi)].requests_answered.count(top.slot))
          stale = true;
      }
      if (stale) {
        agenda_.pop_back();
        continue;
      }
      if (!turn_domain.empty() && top.domain != turn_domain) break; // one domain per turn
      DialogueAct a = top;
      agenda_.pop_back();
      turn_domain = a.domain;
      if (a.intent == "inform" && gi >= 0) {
        DomainGoal& g = goal_.domains[static_cast<size_t>(gi)];
        if (g.find_constraints.count(a.slot)) {
          auto& order = state_[static_cast<size_t>(gi)].inform_order;
          order.erase(std::remove(order.begin(), order.end(), a.slot), order.end());
          order.push_back(a.slot);
        }
      }
      acts.push_back(std::move(a));
    }
    return acts;
  }
};

} // namespace dm
