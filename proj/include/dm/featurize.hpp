#pragma once

// State parametrisations and the summary/master action abstraction.
//
// flat_state:  (+) one-hot constraint beliefs across all domains
//              (+) multi-hot last user acts (+) last system acts
//              (+) [terminated] (+) per-domain booked bits (+) per-domain degree
// dip_state:   one slot-independent vector for the active domain plus one
//              fixed-size vector per slot node; dimensions never depend on the
//              domain or slot.

#include <cstdint>
#include <string>
#include <vector>

#include "dm/acts.hpp"
#include "dm/belief.hpp"
#include "dm/ontology.hpp"

namespace dm {

struct DipState {
  std::vector<double> independent;
  std::vector<std::pair<std::string, std::vector<double>>> slots; // schema order
};

inline size_t dip_independent_dim(const Ontology& ont) {
  return ont.general_user_intents.size() + ont.general_system_intents.size() + 1 + 1 + 6;
}
inline size_t dip_slot_dim(const Ontology& ont) {
  return ont.slot_user_intents.size() + ont.slot_system_intents.size() + 3;
}

namespace detail {

inline void append_general_acts(std::vector<double>& out, const std::vector<DialogueAct>& acts,
                                const std::vector<std::string>& catalogue) {
  for (const auto& intent : catalogue) {
    double bit = 0;
    for (const auto& a : acts)
      if (a.domain == kGeneralDomain && a.intent == intent) bit = 1;
    out.push_back(bit);
  }
}

inline void append_slot_acts(std::vector<double>& out, const std::vector<DialogueAct>& acts,
                             const std::vector<std::string>& catalogue,
                             const std::string& domain, const std::string& slot) {
  for (const auto& intent : catalogue) {
    double bit = 0;
    for (const auto& a : acts)
      if (a.intent == intent && a.domain == domain && a.slot == slot) bit = 1;
    out.push_back(bit);
  }
}

} // namespace detail

inline DipState dip_state(const DomainView& view, const Ontology& ont) {
  DipState s;
  s.independent.reserve(dip_independent_dim(ont));
  detail::append_general_acts(s.independent, view.last_user_acts, ont.general_user_intents);
  detail::append_general_acts(s.independent, view.last_system_acts, ont.general_system_intents);
  s.independent.push_back(view.terminated ? 1.0 : 0.0);
  s.independent.push_back((!view.offered.empty() || view.booked) ? 1.0 : 0.0);
  for (double x : degree_pointer(view.match_count)) s.independent.push_back(x);

  for (const auto& slot : view.schema->slots) {
    std::vector<double> v;
    v.reserve(dip_slot_dim(ont));
    detail::append_slot_acts(v, view.last_user_acts, ont.slot_user_intents, view.domain,
                             slot.name);
    detail::append_slot_acts(v, view.last_system_acts, ont.slot_system_intents, view.domain,
                             slot.name);
    // known-value indicator: any assignment other than "none" (dontcare counts)
    double known = 0;
    if (slot.is_constraint() && view.constraints.at(slot.name) != kNone) known = 1;
    v.push_back(known);
    // slot class: find (1,0), book (0,0), requestable (0,1)
    v.push_back(slot.kind == SlotKind::ConstraintFind ? 1.0 : 0.0);
    v.push_back(slot.kind == SlotKind::Requestable ? 1.0 : 0.0);
    s.slots.emplace_back(slot.name, std::move(v));
  }
  return s;
}

inline size_t flat_dim(const Ontology& ont) {
  size_t dim = 0;
  size_t total_slots = 0;
  for (const auto& d : ont.domains) {
    for (const auto& s : d.slots) {
      if (s.is_constraint()) dim += s.values.size() + 2;
      ++total_slots;
    }
  }
  dim += ont.general_user_intents.size() + ont.slot_user_intents.size() * total_slots;
  dim += ont.general_system_intents.size() + ont.slot_system_intents.size() * total_slots;
  dim += 1;                       // terminated
  dim += ont.domains.size();      // booked bits
  dim += ont.domains.size() * 6;  // degree vectors
  return dim;
}

inline std::vector<double> flat_state(const BeliefState& belief, const Ontology& ont) {
  std::vector<double> out;
  out.reserve(flat_dim(ont));
  for (size_t di = 0; di < ont.domains.size(); ++di) {
    const DomainSchema& d = ont.domains[di];
    for (const auto& s : d.slots) {
      if (!s.is_constraint()) continue;
      const std::string& v = belief.domains[di].constraints.at(s.name);
      for (const auto& val : s.values) out.push_back(v == val ? 1.0 : 0.0);
      out.push_back(v == kDontcare ? 1.0 : 0.0);
      out.push_back(v == kNone ? 1.0 : 0.0);
    }
  }
  auto append_acts = [&](const std::vector<DialogueAct>& acts,
                         const std::vector<std::string>& general,
                         const std::vector<std::string>& per_slot) {
    detail::append_general_acts(out, acts, general);
    for (const auto& d : ont.domains)
      for (const auto& s : d.slots)
        detail::append_slot_acts(out, acts, per_slot, d.name, s.name);
  };
  append_acts(belief.last_user_acts, ont.general_user_intents, ont.slot_user_intents);
  append_acts(belief.last_system_acts, ont.general_system_intents, ont.slot_system_intents);
  out.push_back(belief.terminated ? 1.0 : 0.0);
  for (const auto& db : belief.domains)
    out.push_back((!db.offered.empty() || db.booked) ? 1.0 : 0.0);
  for (const auto& db : belief.domains)
    for (double x : degree_pointer(db.match_count)) out.push_back(x);
  return out;
}

// ---------------------------------------------------------------------------
// Summary actions. Each slot exposes exactly one action (request for
// constraint slots, inform for requestable ones), followed by the general
// system intents. book/nobook are masked in domains without book slots.

struct SummaryAction {
  enum class Type { Request, Inform, General };
  Type type = Type::General;
  int slot_index = -1;    // Request/Inform
  int general_index = -1; // General

  bool operator==(const SummaryAction&) const = default;
};

struct ActionSpace {
  std::string domain;
  std::vector<SummaryAction> actions;
  std::vector<uint8_t> valid;

  size_t size() const { return actions.size(); }
};

inline ActionSpace build_action_space(const Ontology& ont, const std::string& domain) {
  const DomainSchema& d = ont.domain(domain);
  ActionSpace sp;
  sp.domain = domain;
  const bool has_book = d.count_of(SlotKind::ConstraintBook) > 0;
  for (size_t i = 0; i < d.slots.size(); ++i) {
    SummaryAction a;
    a.type = d.slots[i].is_constraint() ? SummaryAction::Type::Request
                                        : SummaryAction::Type::Inform;
    a.slot_index = static_cast<int>(i);
    sp.actions.push_back(a);
    sp.valid.push_back(1);
  }
  for (size_t g = 0; g < ont.general_system_intents.size(); ++g) {
    SummaryAction a;
    a.type = SummaryAction::Type::General;
    a.general_index = static_cast<int>(g);
    sp.actions.push_back(a);
    const std::string& intent = ont.general_system_intents[g];
    bool ok = has_book || (intent != "book" && intent != "nobook");
    sp.valid.push_back(ok ? 1 : 0);
  }
  return sp;
}

inline std::string action_label(const Ontology& ont, const ActionSpace& sp, size_t idx) {
  const SummaryAction& a = sp.actions.at(idx);
  const DomainSchema& d = ont.domain(sp.domain);
  switch (a.type) {
    case SummaryAction::Type::Request:
      return "request(" + d.slots[static_cast<size_t>(a.slot_index)].name + ")";
    case SummaryAction::Type::Inform:
      return "inform(" + d.slots[static_cast<size_t>(a.slot_index)].name + ")";
    case SummaryAction::Type::General:
      return ont.general_system_intents[static_cast<size_t>(a.general_index)];
  }
  return "?";
}

// Index of the summary action matching a concrete act, or -1.
inline int act_to_action_index(const Ontology& ont, const ActionSpace& sp,
                               const DialogueAct& act) {
  const DomainSchema& d = ont.domain(sp.domain);
  for (size_t i = 0; i < sp.actions.size(); ++i) {
    const SummaryAction& a = sp.actions[i];
    if (a.type == SummaryAction::Type::General) {
      if (act.domain == kGeneralDomain &&
          ont.general_system_intents[static_cast<size_t>(a.general_index)] == act.intent)
        return static_cast<int>(i);
    } else if (act.domain == sp.domain &&
               d.slots[static_cast<size_t>(a.slot_index)].name == act.slot) {
      if (a.type == SummaryAction::Type::Request && act.intent == "request")
        return static_cast<int>(i);
      if (a.type == SummaryAction::Type::Inform && act.intent == "inform")
        return static_cast<int>(i);
    }
  }
  return -1;
}

// Restores values: summary action -> concrete dialogue acts in context.
inline std::vector<DialogueAct> to_master(const Ontology& ont, const ActionSpace& sp,
                                          size_t action_idx, const BeliefState& belief) {
  if (action_idx >= sp.actions.size()) throw std::logic_error("to_master: bad action index");
  if (!sp.valid[action_idx]) throw std::logic_error("to_master: masked action");
  const SummaryAction& a = sp.actions[action_idx];
  const DomainSchema& schema = ont.domain(sp.domain);
  const DomainBelief& db = belief.of(sp.domain);

  if (a.type == SummaryAction::Type::Request)
    return {slot_act("request", sp.domain, schema.slots[static_cast<size_t>(a.slot_index)].name)};

  auto current_matches = [&] {
    std::map<std::string, std::string> c;
    for (const auto& s : schema.slots)
      if (s.kind == SlotKind::ConstraintFind && db.constraints.at(s.name) != kNone)
        c[s.name] = db.constraints.at(s.name);
    return query(schema, c);
  };
  auto resolve_entity = [&]() -> std::pair<const Entity*, size_t> {
    if (!db.offered.empty())
      for (size_t i = 0; i < schema.database.size(); ++i)
        if (schema.database[i].at(kEntityNameKey) == db.offered)
          return {&schema.database[i], i};
    auto matches = current_matches();
    if (matches.empty()) return {nullptr, 0};
    return {&schema.database[matches.front()], matches.front()};
  };

  if (a.type == SummaryAction::Type::Inform) {
    auto [e, idx] = resolve_entity();
    (void)idx;
    if (!e) return {general_act("nooffer")}; // nothing to draw a value from
    const std::string& slot = schema.slots[static_cast<size_t>(a.slot_index)].name;
    return {slot_act("inform", sp.domain, slot, e->at(slot))};
  }

  const std::string& intent = ont.general_system_intents[static_cast<size_t>(a.general_index)];
  if (intent == "offer") {
    auto matches = current_matches();
    if (matches.empty()) return {general_act("nooffer")};
    return {general_act("offer", schema.database[matches.front()].at(kEntityNameKey))};
  }
  if (intent == "book") {
    auto [e, idx] = resolve_entity();
    if (!e) return {general_act("nobook")};
    return {general_act("book", booking_reference(sp.domain, idx))};
  }
  return {general_act(intent)};
}

} // namespace dm
