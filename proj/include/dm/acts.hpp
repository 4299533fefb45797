#pragma once

// Dialogue acts: the wire unit between user, tracker and policy.

#include <stdexcept>
#include <string>
#include <vector>

#include "dm/ontology.hpp"

namespace dm {

struct DialogueAct {
  std::string intent;
  std::string domain; // domain name, or "general" for general intents
  std::string slot;   // empty for general intents
  std::string value;  // empty when the act carries no value

  bool operator==(const DialogueAct& o) const = default;
};

inline DialogueAct general_act(const std::string& intent, const std::string& value = "") {
  return {intent, kGeneralDomain, "", value};
}
inline DialogueAct slot_act(const std::string& intent, const std::string& domain,
                            const std::string& slot, const std::string& value = "") {
  return {intent, domain, slot, value};
}

inline std::string to_string(const DialogueAct& a) {
  std::string s = a.intent;
  if (a.domain != kGeneralDomain) {
    s += "[" + a.domain + "." + a.slot;
    if (!a.value.empty()) s += "=" + a.value;
    s += "]";
  } else if (!a.value.empty()) {
    s += "[" + a.value + "]";
  }
  return s;
}

// Per-slot intents carry a slot; general intents carry none, and an act's
// domain is "general" exactly when its intent is general.
inline void validate_act(const Ontology& ont, const DialogueAct& a, bool user_side) {
  const auto& general = user_side ? ont.general_user_intents : ont.general_system_intents;
  const auto& per_slot = user_side ? ont.slot_user_intents : ont.slot_system_intents;
  const bool is_general =
      std::find(general.begin(), general.end(), a.intent) != general.end();
  const bool is_slot =
      std::find(per_slot.begin(), per_slot.end(), a.intent) != per_slot.end();
  if (!is_general && !is_slot)
    throw std::invalid_argument("unknown intent: " + a.intent);
  if (is_general) {
    if (a.domain != kGeneralDomain)
      throw std::invalid_argument("general act must use domain 'general': " + to_string(a));
    if (!a.slot.empty())
      throw std::invalid_argument("general act must not carry a slot: " + to_string(a));
  } else {
    if (a.domain == kGeneralDomain)
      throw std::invalid_argument("per-slot act needs a domain: " + to_string(a));
    const DomainSchema& d = ont.domain(a.domain);
    if (!d.find_slot(a.slot))
      throw std::invalid_argument("unknown slot " + a.slot + " in domain " + a.domain);
  }
}

} // namespace dm
