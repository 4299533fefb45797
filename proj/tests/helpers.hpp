#pragma once

// Shared fixtures for the unit suites.

#include <map>
#include <string>
#include <vector>

#include "dm/dialogue.hpp"
#include "dm/episode.hpp"
#include "dm/ontology.hpp"

namespace dmtest {

// Two constraint-free domains with one requestable slot each; handy for
// scripting exact reward patterns.
inline dm::Ontology tiny_ontology() {
  dm::Ontology ont;
  for (const std::string& name : {"alpha", "beta"}) {
    dm::DomainSchema d;
    d.name = name;
    d.slots = {{"phone", dm::SlotKind::Requestable, {}}};
    dm::Entity e;
    e[dm::kEntityNameKey] = name + "-00";
    e["phone"] = "0122300000";
    d.database.push_back(e);
    ont.domains.push_back(d);
  }
  return ont;
}

// One domain, two constraint-find slots, a book slot and a request slot; the
// database is small enough for exhaustive checks.
inline dm::Ontology toy_booking_ontology() {
  dm::Ontology ont;
  dm::DomainSchema d;
  d.name = "inn";
  d.slots = {
      {"area", dm::SlotKind::ConstraintFind, {"north", "south"}},
      {"price", dm::SlotKind::ConstraintFind, {"cheap", "dear"}},
      {"day", dm::SlotKind::ConstraintBook, {"monday", "tuesday"}},
      {"phone", dm::SlotKind::Requestable, {}},
  };
  int i = 0;
  for (const char* area : {"north", "north", "south"}) {
    dm::Entity e;
    e[dm::kEntityNameKey] = "inn-0" + std::to_string(i);
    e["area"] = area;
    e["price"] = (i == 1) ? "dear" : "cheap";
    e["phone"] = "012230000" + std::to_string(i);
    d.database.push_back(e);
    ++i;
  }
  ont.domains.push_back(d);
  return ont;
}

// Plays a fixed script of system turns, then repeats the last one.
struct ScriptedAgent final : dm::SystemAgent {
  std::vector<std::vector<dm::DialogueAct>> script;
  size_t next = 0;
  std::vector<double> rewards;

  explicit ScriptedAgent(std::vector<std::vector<dm::DialogueAct>> s) : script(std::move(s)) {}

  std::vector<dm::DialogueAct> act(const dm::BeliefState&, const std::string&) override {
    const auto& turn = script[std::min(next, script.size() - 1)];
    ++next;
    return turn;
  }
  void on_reward(double r, bool) override { rewards.push_back(r); }
};

} // namespace dmtest
