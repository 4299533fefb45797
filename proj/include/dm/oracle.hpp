#pragma once

// Handcrafted rule-based system policy, used as the imitation teacher and as
// the evaluation anchor.

#include <string>
#include <vector>

#include "dm/acts.hpp"
#include "dm/belief.hpp"
#include "dm/ontology.hpp"

namespace dm {

inline constexpr size_t kOracleNarrowThreshold = 5; // aligned with the top f3 bin

// Deterministic rule cascade over the active domain:
//   1. pending requests + an offer on the table  -> inform from the offer
//   2. too many matches, unfilled find slot      -> request the first one
//   3. matches and no offer yet                  -> offer the first match
//   4. book intent, unfilled book slot           -> request the first one
//   5. book intent, all book slots filled        -> book the offered entity
//   6. zero matches                              -> nooffer
//   7. user said bye                             -> bye
inline std::vector<DialogueAct> oracle_act(const BeliefState& belief,
                                           const std::string& active_domain) {
  if (belief.terminated) return {general_act("bye")};

  const Ontology& ont = *belief.ont;
  const DomainSchema& schema = ont.domain(active_domain);
  const DomainBelief& db = belief.of(active_domain);
  std::vector<DialogueAct> acts;

  const Entity* offered = db.offered.empty() ? nullptr : schema.entity_by_name(db.offered);

  std::map<std::string, std::string> find_constraints;
  for (const auto& s : schema.slots)
    if (s.kind == SlotKind::ConstraintFind && db.constraints.at(s.name) != kNone)
      find_constraints[s.name] = db.constraints.at(s.name);
  // an offer goes stale when later informs contradict it
  bool offer_ok = offered != nullptr;
  for (const auto& [slot, value] : find_constraints)
    if (offer_ok && value != kDontcare && offered->at(slot) != value) offer_ok = false;

  // pending requests, the ones voiced this turn first: the policies only see
  // the last turn's acts, so the freshest request is the natural lead act
  std::vector<std::string> pending;
  auto fresh = [&](const std::string& slot) {
    for (const auto& a : belief.last_user_acts)
      if (a.intent == "request" && a.domain == active_domain && a.slot == slot) return true;
    return false;
  };
  for (const auto& s : schema.slots)
    if (!s.is_constraint() && db.requested.at(s.name) && fresh(s.name))
      pending.push_back(s.name);
  for (const auto& s : schema.slots)
    if (!s.is_constraint() && db.requested.at(s.name) && !fresh(s.name))
      pending.push_back(s.name);

  if (!pending.empty() && offered) {
    for (const auto& s : pending)
      acts.push_back(slot_act("inform", active_domain, s, offered->at(s)));
  } else {
    const std::string* unfilled_find = nullptr;
    for (const auto& s : schema.slots)
      if (s.kind == SlotKind::ConstraintFind && db.constraints.at(s.name) == kNone) {
        unfilled_find = &s.name;
        break;
      }
    if (db.match_count > kOracleNarrowThreshold && unfilled_find) {
      acts.push_back(slot_act("request", active_domain, *unfilled_find));
    } else if (db.match_count >= 1 && !offer_ok) {
      auto matches = query(schema, find_constraints);
      acts.push_back(general_act("offer", schema.database[matches.front()].at(kEntityNameKey)));
      offered = &schema.database[matches.front()];
    }
  }

  bool book_intent = false;
  const std::string* unfilled_book = nullptr;
  for (const auto& s : schema.slots)
    if (s.kind == SlotKind::ConstraintBook) {
      if (db.constraints.at(s.name) != kNone)
        book_intent = true;
      else if (!unfilled_book)
        unfilled_book = &s.name;
    }
  if (book_intent && !db.booked) {
    if (unfilled_book) {
      acts.push_back(slot_act("request", active_domain, *unfilled_book));
    } else if (offered) {
      size_t idx = 0;
      for (size_t i = 0; i < schema.database.size(); ++i)
        if (&schema.database[i] == offered) idx = i;
      acts.push_back(general_act("book", booking_reference(active_domain, idx)));
    }
  }

  if (acts.empty() && db.match_count == 0) acts.push_back(general_act("nooffer"));
  if (acts.empty()) acts.push_back(general_act("reqmore"));
  return acts;
}

} // namespace dm
