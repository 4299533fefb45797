#pragma once

// Deterministic dialogue-state tracking. All components are exact 0/1 flags
// or exact values; the per-domain match count is recomputed from the database
// after every update.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dm/acts.hpp"
#include "dm/ontology.hpp"

namespace dm {

struct DomainBelief {
  std::map<std::string, std::string> constraints; // every constraint slot, "none" until set
  std::map<std::string, bool> requested;          // requestable slot -> pending
  std::string offered;                            // offered entity name, empty if none
  bool booked = false;
  std::string book_ref;
  size_t match_count = 0;

  bool operator==(const DomainBelief&) const = default;
};

struct BeliefState {
  const Ontology* ont = nullptr;
  std::vector<DomainBelief> domains; // ontology order
  bool terminated = false;           // f1
  std::vector<DialogueAct> last_user_acts;
  std::vector<DialogueAct> last_system_acts;
  std::string active_domain; // empty until first selection

  explicit BeliefState(const Ontology& o) : ont(&o) {
    domains.resize(o.domains.size());
    for (size_t i = 0; i < o.domains.size(); ++i) {
      const DomainSchema& d = o.domains[i];
      for (const auto& s : d.slots) {
        if (s.is_constraint())
          domains[i].constraints[s.name] = kNone;
        else
          domains[i].requested[s.name] = false;
      }
      domains[i].match_count = d.database.size(); // empty query matches all
    }
  }

  const DomainBelief& of(const std::string& domain) const {
    int i = ont->domain_index(domain);
    if (i < 0) throw OntologyError("unknown domain: " + domain);
    return domains[static_cast<size_t>(i)];
  }
  DomainBelief& of(const std::string& domain) {
    int i = ont->domain_index(domain);
    if (i < 0) throw OntologyError("unknown domain: " + domain);
    return domains[static_cast<size_t>(i)];
  }

  bool operator==(const BeliefState& o) const {
    return domains == o.domains && terminated == o.terminated &&
           last_user_acts == o.last_user_acts && last_system_acts == o.last_system_acts &&
           active_domain == o.active_domain;
  }

  void recompute_match_count(size_t domain_idx) {
    const DomainSchema& d = ont->domains[domain_idx];
    std::map<std::string, std::string> find_constraints;
    for (const auto& s : d.slots)
      if (s.kind == SlotKind::ConstraintFind) {
        const std::string& v = domains[domain_idx].constraints.at(s.name);
        if (v != kNone) find_constraints[s.name] = v;
      }
    domains[domain_idx].match_count = query(d, find_constraints).size();
  }
};

// Pure function of (belief, acts): inform sets the constraint belief, request
// flags the slot, bye sets the terminated flag. Stores the acts as the last
// user turn and refreshes the match counts of touched domains.
inline BeliefState update(const BeliefState& belief, const std::vector<DialogueAct>& user_acts) {
  BeliefState out = belief;
  std::vector<size_t> touched;
  for (const DialogueAct& a : user_acts) {
    validate_act(*out.ont, a, /*user_side=*/true);
    if (a.intent == "bye") {
      out.terminated = true;
    } else if (a.intent == "inform") {
      size_t di = static_cast<size_t>(out.ont->domain_index(a.domain));
      const SlotDef* s = out.ont->domains[di].find_slot(a.slot);
      if (s->is_constraint()) {
        out.domains[di].constraints[a.slot] = a.value; // last value wins
        if (s->kind == SlotKind::ConstraintFind) touched.push_back(di);
      }
    } else if (a.intent == "request") {
      size_t di = static_cast<size_t>(out.ont->domain_index(a.domain));
      const SlotDef* s = out.ont->domains[di].find_slot(a.slot);
      if (!s->is_constraint()) out.domains[di].requested[a.slot] = true;
    }
    // hello/thank/reqmore-answer/dontcare only live in the act history
  }
  for (size_t di : touched) out.recompute_match_count(di);
  out.last_user_acts = user_acts;
  return out;
}

// System-side bookkeeping: stores the turn's system acts, clears request
// flags the system just answered, and records offers/bookings against the
// active domain (general system acts carry no domain of their own).
inline void apply_system_acts(BeliefState& belief, const std::vector<DialogueAct>& system_acts,
                              const std::string& active_domain) {
  for (const DialogueAct& a : system_acts) {
    validate_act(*belief.ont, a, /*user_side=*/false);
    if (a.intent == "inform") {
      size_t di = static_cast<size_t>(belief.ont->domain_index(a.domain));
      auto it = belief.domains[di].requested.find(a.slot);
      if (it != belief.domains[di].requested.end()) it->second = false;
    } else if (a.intent == "offer") {
      belief.of(active_domain).offered = a.value;
    } else if (a.intent == "book") {
      DomainBelief& db = belief.of(active_domain);
      db.booked = true;
      db.book_ref = a.value;
    }
  }
  belief.last_system_acts = system_acts;
}

// The domain of the most recent domain-bearing user act; sticky otherwise.
// Before any domain was ever mentioned, falls back to the first ontology
// domain.
inline std::string select_domain(const BeliefState& belief,
                                 const std::vector<DialogueAct>& user_acts) {
  for (auto it = user_acts.rbegin(); it != user_acts.rend(); ++it)
    if (it->domain != kGeneralDomain) return it->domain;
  if (!belief.active_domain.empty()) return belief.active_domain;
  return belief.ont->domains.front().name;
}

// Restriction of the belief to one domain plus the global fields.
struct DomainView {
  std::string domain;
  const DomainSchema* schema = nullptr;
  std::map<std::string, std::string> constraints;
  std::map<std::string, bool> requested;
  std::string offered;
  bool booked = false;
  size_t match_count = 0;
  bool terminated = false;
  std::vector<DialogueAct> last_user_acts;
  std::vector<DialogueAct> last_system_acts;
};

inline DomainView project(const BeliefState& belief, const std::string& domain) {
  const DomainBelief& db = belief.of(domain);
  DomainView v;
  v.domain = domain;
  v.schema = &belief.ont->domain(domain);
  v.constraints = db.constraints;
  v.requested = db.requested;
  v.offered = db.offered;
  v.booked = db.booked;
  v.match_count = db.match_count;
  v.terminated = belief.terminated;
  v.last_user_acts = belief.last_user_acts;
  v.last_system_acts = belief.last_system_acts;
  return v;
}

inline DomainView project(const DomainView& view, const std::string& domain) {
  assert(view.domain == domain);
  (void)domain;
  return view; // restriction is idempotent
}

// Stable-order digest for trajectory logs.
inline nlohmann::ordered_json belief_digest(const BeliefState& belief) {
  nlohmann::ordered_json j;
  j["active"] = belief.active_domain;
  j["terminated"] = belief.terminated;
  nlohmann::ordered_json jd;
  for (size_t i = 0; i < belief.ont->domains.size(); ++i) {
    const DomainSchema& schema = belief.ont->domains[i];
    const DomainBelief& db = belief.domains[i];
    nlohmann::ordered_json entry;
    nlohmann::ordered_json constraints;
    for (const auto& s : schema.slots)
      if (s.is_constraint()) constraints[s.name] = db.constraints.at(s.name);
    entry["constraints"] = constraints;
    nlohmann::ordered_json requested = nlohmann::ordered_json::array();
    for (const auto& s : schema.slots)
      if (!s.is_constraint() && db.requested.at(s.name)) requested.push_back(s.name);
    entry["requested"] = requested;
    entry["offered"] = db.offered;
    entry["booked"] = db.booked;
    entry["matches"] = db.match_count;
    jd[schema.name] = entry;
  }
  j["domains"] = jd;
  return j;
}

} // namespace dm
