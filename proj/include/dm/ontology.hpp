#pragma once

// Domains, slots, value sets and the synthetic databases. Everything that
// defines vector dimensions (one-hot layouts, action spaces) is anchored here.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dm {

using Rng = std::mt19937_64;

inline constexpr const char* kNone = "none";         // slot not yet specified
inline constexpr const char* kDontcare = "dontcare"; // user has no preference
inline constexpr const char* kGeneralDomain = "general";
inline constexpr const char* kEntityNameKey = "name"; // reserved entity field

struct OntologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SlotKind { ConstraintFind, ConstraintBook, Requestable };

inline const char* to_string(SlotKind k) {
  switch (k) {
    case SlotKind::ConstraintFind: return "constraint-find";
    case SlotKind::ConstraintBook: return "constraint-book";
    case SlotKind::Requestable: return "requestable";
  }
  return "?";
}

inline SlotKind slot_kind_from_string(const std::string& s) {
  if (s == "constraint-find") return SlotKind::ConstraintFind;
  if (s == "constraint-book") return SlotKind::ConstraintBook;
  if (s == "requestable") return SlotKind::Requestable;
  throw OntologyError("unknown slot kind: " + s);
}

struct SlotDef {
  std::string name;
  SlotKind kind = SlotKind::Requestable;
  std::vector<std::string> values; // constraint slots only; empty for requestable

  bool is_constraint() const { return kind != SlotKind::Requestable; }
  bool has_value(const std::string& v) const {
    return std::find(values.begin(), values.end(), v) != values.end();
  }
};

// One database record: slot name -> value for every constraint-find and
// requestable slot, plus the reserved "name" key.
using Entity = std::map<std::string, std::string>;

struct DomainSchema {
  std::string name;
  std::vector<SlotDef> slots; // fixed order; defines node indexing
  std::vector<Entity> database;

  const SlotDef* find_slot(const std::string& slot_name) const {
    for (const auto& s : slots)
      if (s.name == slot_name) return &s;
    return nullptr;
  }
  int slot_index(const std::string& slot_name) const {
    for (size_t i = 0; i < slots.size(); ++i)
      if (slots[i].name == slot_name) return static_cast<int>(i);
    return -1;
  }
  std::vector<const SlotDef*> slots_of(SlotKind k) const {
    std::vector<const SlotDef*> out;
    for (const auto& s : slots)
      if (s.kind == k) out.push_back(&s);
    return out;
  }
  size_t count_of(SlotKind k) const {
    size_t n = 0;
    for (const auto& s : slots) n += (s.kind == k);
    return n;
  }
  const Entity* entity_by_name(const std::string& entity_name) const {
    for (const auto& e : database) {
      auto it = e.find(kEntityNameKey);
      if (it != e.end() && it->second == entity_name) return &e;
    }
    return nullptr;
  }
};

struct Ontology {
  std::vector<DomainSchema> domains;
  // Fixed intent catalogues; they define one-hot dimensions and never change
  // after load.
  std::vector<std::string> general_user_intents = {"hello", "bye", "thank",
                                                   "reqmore-answer", "dontcare"};
  std::vector<std::string> general_system_intents = {"offer",  "book",    "nooffer",
                                                     "nobook", "reqmore", "bye"};
  std::vector<std::string> slot_user_intents = {"inform", "request"};
  std::vector<std::string> slot_system_intents = {"inform", "request"};

  const DomainSchema* find_domain(const std::string& d) const {
    for (const auto& dom : domains)
      if (dom.name == d) return &dom;
    return nullptr;
  }
  const DomainSchema& domain(const std::string& d) const {
    const DomainSchema* p = find_domain(d);
    if (!p) throw OntologyError("unknown domain: " + d);
    return *p;
  }
  int domain_index(const std::string& d) const {
    for (size_t i = 0; i < domains.size(); ++i)
      if (domains[i].name == d) return static_cast<int>(i);
    return -1;
  }
  bool is_general_user_intent(const std::string& intent) const {
    return std::find(general_user_intents.begin(), general_user_intents.end(),
                     intent) != general_user_intents.end();
  }
  bool is_general_system_intent(const std::string& intent) const {
    return std::find(general_system_intents.begin(), general_system_intents.end(),
                     intent) != general_system_intents.end();
  }
  // Restriction to a subset of domains (order follows `names`).
  Ontology restrict(const std::vector<std::string>& names) const {
    Ontology out = *this;
    out.domains.clear();
    for (const auto& n : names) out.domains.push_back(domain(n));
    return out;
  }
};

inline void validate_ontology(const Ontology& ont) {
  if (ont.domains.empty()) throw OntologyError("ontology has no domains");
  std::set<std::string> domain_names;
  for (const auto& d : ont.domains) {
    if (!domain_names.insert(d.name).second)
      throw OntologyError("duplicate domain name: " + d.name);
    std::set<std::string> slot_names;
    for (const auto& s : d.slots) {
      if (!slot_names.insert(s.name).second)
        throw OntologyError("domain " + d.name + ": duplicate slot name: " + s.name);
      if (s.name == kEntityNameKey)
        throw OntologyError("domain " + d.name + ": slot name '" +
                            std::string(kEntityNameKey) + "' is reserved");
      if (s.is_constraint()) {
        if (s.values.empty())
          throw OntologyError("domain " + d.name + ": constraint slot " + s.name +
                              " has empty value set");
        std::set<std::string> vals;
        for (const auto& v : s.values) {
          if (v == kNone || v == kDontcare)
            throw OntologyError("domain " + d.name + ": slot " + s.name +
                                ": reserved token in value set: " + v);
          if (!vals.insert(v).second)
            throw OntologyError("domain " + d.name + ": slot " + s.name +
                                ": duplicate value: " + v);
        }
      } else if (!s.values.empty()) {
        throw OntologyError("domain " + d.name + ": requestable slot " + s.name +
                            " must not declare a value set");
      }
    }
    // every entity covers every constraint-find and requestable slot
    for (size_t ei = 0; ei < d.database.size(); ++ei) {
      const Entity& e = d.database[ei];
      if (!e.count(kEntityNameKey))
        throw OntologyError("domain " + d.name + ": entity #" + std::to_string(ei) +
                            " lacks a name");
      for (const auto& s : d.slots) {
        if (s.kind == SlotKind::ConstraintBook) continue;
        auto it = e.find(s.name);
        if (it == e.end())
          throw OntologyError("domain " + d.name + ": entity " +
                              e.at(kEntityNameKey) + " missing slot " + s.name);
        if (s.kind == SlotKind::ConstraintFind && !s.has_value(it->second))
          throw OntologyError("domain " + d.name + ": entity " +
                              e.at(kEntityNameKey) + ": value '" + it->second +
                              "' not in value set of slot " + s.name);
      }
    }
  }
}

// Entities matching all constraints exactly; "dontcare" matches anything.
// Result preserves database order.
inline std::vector<size_t> query(const DomainSchema& d,
                                 const std::map<std::string, std::string>& constraints) {
  for (const auto& [slot, value] : constraints) {
    (void)value;
    if (!d.find_slot(slot)) throw OntologyError("query: unknown slot " + slot + " in domain " + d.name);
  }
  std::vector<size_t> out;
  for (size_t i = 0; i < d.database.size(); ++i) {
    const Entity& e = d.database[i];
    bool ok = true;
    for (const auto& [slot, value] : constraints) {
      if (value == kDontcare || value == kNone) continue;
      auto it = e.find(slot);
      if (it == e.end() || it->second != value) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

// Deterministic booking reference for a database entity.
inline std::string booking_reference(const std::string& domain, size_t entity_idx) {
  return "REF-" + domain + "-" + std::to_string(entity_idx);
}

// Bins [count==0, ==1, ==2, ==3, ==4, >=5]; exactly one coordinate set.
inline std::array<double, 6> degree_pointer(size_t count) {
  std::array<double, 6> v{};
  v[std::min<size_t>(count, 5)] = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// File format (JSON): { "domains": [ { "name", "slots": [...], "database":
// [...] } ] }. Saving is canonical so load -> save -> load is the identity.

inline Ontology ontology_from_json(const nlohmann::ordered_json& j) {
  Ontology ont;
  if (!j.contains("domains") || !j["domains"].is_array())
    throw OntologyError("ontology file: missing 'domains' array");
  for (const auto& jd : j["domains"]) {
    DomainSchema d;
    d.name = jd.at("name").get<std::string>();
    for (const auto& js : jd.at("slots")) {
      SlotDef s;
      s.name = js.at("name").get<std::string>();
      s.kind = slot_kind_from_string(js.at("kind").get<std::string>());
      if (js.contains("values"))
        s.values = js["values"].get<std::vector<std::string>>();
      d.slots.push_back(std::move(s));
    }
    if (jd.contains("database")) {
      for (const auto& je : jd["database"]) {
        Entity e;
        for (auto it = je.begin(); it != je.end(); ++it)
          e[it.key()] = it.value().get<std::string>();
        d.database.push_back(std::move(e));
      }
    }
    ont.domains.push_back(std::move(d));
  }
  validate_ontology(ont);
  return ont;
}

inline nlohmann::ordered_json ontology_to_json(const Ontology& ont) {
  nlohmann::ordered_json j;
  j["domains"] = nlohmann::ordered_json::array();
  for (const auto& d : ont.domains) {
    nlohmann::ordered_json jd;
    jd["name"] = d.name;
    jd["slots"] = nlohmann::ordered_json::array();
    for (const auto& s : d.slots) {
      nlohmann::ordered_json js;
      js["name"] = s.name;
      js["kind"] = to_string(s.kind);
      if (s.is_constraint()) js["values"] = s.values;
      jd["slots"].push_back(js);
    }
    jd["database"] = nlohmann::ordered_json::array();
    for (const auto& e : d.database) {
      nlohmann::ordered_json je;
      // entity name first, then slot fields in schema order
      je[kEntityNameKey] = e.at(kEntityNameKey);
      for (const auto& s : d.slots) {
        auto it = e.find(s.name);
        if (it != e.end()) je[s.name] = it->second;
      }
      jd["database"].push_back(je);
    }
    j["domains"].push_back(jd);
  }
  return j;
}

inline Ontology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw OntologyError("cannot open ontology file: " + path);
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw OntologyError("parse error in " + path + ": " + e.what());
  }
  try {
    return ontology_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw OntologyError("bad field in " + path + ": " + e.what());
  }
}

inline void save_ontology(const Ontology& ont, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw OntologyError("cannot write ontology file: " + path);
  out << ontology_to_json(ont).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Bundled 7-domain ontology with synthetic databases. Slot counts follow the
// standard multi-domain benchmark layout (find/book/request): restaurant
// 4/3/5, attraction 3/0/7, hotel 7/3/5, taxi 4/0/2, train 5/1/5, hospital
// 1/0/3, police 0/0/3. Names and values are invented; databases are generated
// deterministically and committed to data/ontology.json.

namespace detail {

inline std::string two_digits(int v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

struct DbGen {
  std::mt19937 rng;
  explicit DbGen(uint32_t seed) : rng(seed) {}

  int uniform(int lo, int hi) { // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  }
  const std::string& pick(const std::vector<std::string>& v) {
    return v[static_cast<size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }
  std::string phone() {
    std::string s = "01223";
    for (int i = 0; i < 6; ++i) s += static_cast<char>('0' + uniform(0, 9));
    return s;
  }
  std::string address() {
    static const std::vector<std::string> streets = {
        "mill", "king", "regent", "station", "bridge", "castle", "market", "abbey"};
    return std::to_string(uniform(1, 99)) + " " + pick(streets) + " street";
  }
  std::string postcode() {
    std::string s = "cb";
    s += static_cast<char>('1' + uniform(0, 8));
    s += static_cast<char>('a' + uniform(0, 25));
    s += static_cast<char>('a' + uniform(0, 25));
    return s;
  }
};

} // namespace detail

inline Ontology default_ontology() {
  using detail::DbGen;
  Ontology ont;
  DbGen gen(20240517u);

  const std::vector<std::string> areas = {"north", "south", "east", "west", "centre"};
  const std::vector<std::string> prices = {"cheap", "moderate", "expensive"};
  const std::vector<std::string> days = {"monday", "tuesday", "wednesday", "thursday",
                                         "friday", "saturday", "sunday"};
  const std::vector<std::string> ratings = {"good", "great", "excellent"};

  auto add_entity_base = [&](DomainSchema& d, size_t idx) {
    Entity e;
    e[kEntityNameKey] = d.name + "-" + detail::two_digits(static_cast<int>(idx));
    return e;
  };
  auto fill_find_slots = [&](DomainSchema& d, Entity& e) {
    for (const auto& s : d.slots)
      if (s.kind == SlotKind::ConstraintFind) e[s.name] = gen.pick(s.values);
  };

  { // restaurant: find 4 / book 3 / request 5
    DomainSchema d;
    d.name = "restaurant";
    d.slots = {
        {"food", SlotKind::ConstraintFind,
         {"italian", "chinese", "indian", "british", "french", "thai", "mexican"}},
        {"area", SlotKind::ConstraintFind, areas},
        {"pricerange", SlotKind::ConstraintFind, prices},
        {"rating", SlotKind::ConstraintFind, ratings},
        {"day", SlotKind::ConstraintBook, days},
        {"time", SlotKind::ConstraintBook, {"17:00", "18:00", "19:00", "20:00"}},
        {"people", SlotKind::ConstraintBook, {"1", "2", "3", "4", "5", "6", "7", "8"}},
        {"address", SlotKind::Requestable, {}},
        {"phone", SlotKind::Requestable, {}},
        {"postcode", SlotKind::Requestable, {}},
        {"website", SlotKind::Requestable, {}},
        {"openhours", SlotKind::Requestable, {}},
    };
    for (size_t i = 0; i < 60; ++i) {
      Entity e = add_entity_base(d, i);
      fill_find_slots(d, e);
      e["address"] = gen.address();
      e["phone"] = gen.phone();
      e["postcode"] = gen.postcode();
      e["website"] = "www." + e[kEntityNameKey] + ".example.com";
      e["openhours"] = std::to_string(gen.uniform(8, 12)) + ":00-" +
                       std::to_string(gen.uniform(20, 23)) + ":00";
      d.database.push_back(std::move(e));
    }
    ont.domains.push_back(std::move(d));
  }

  { // attraction: find 3 / book 0 / request 7
    DomainSchema d;
    d.name = "attraction";
    d.slots = {
        {"type", SlotKind::ConstraintFind,
         {"museum", "park", "theatre", "cinema", "gallery", "concert-hall"}},
        {"area", SlotKind::ConstraintFind, areas},
        {"pricerange", SlotKind::ConstraintFind, prices},
        {"address", SlotKind::Requestable, {}},
        {"phone", SlotKind::Requestable, {}},
        {"postcode", SlotKind::Requestable, {}},
        {"entrancefee", SlotKind::Requestable, {}},
        {"openhours", SlotKind::Requestable, {}},
        {"website", SlotKind::Requestable, {}},
        {"duration", SlotKind::Requestable, {}},
    };
    for (size_t i = 0; i < 40; ++i) {
      Entity e = add_entity_base(d, i);
      fill_find_slots(d, e);
      e["address"] = gen.address();
      e["phone"] = gen.phone();
      e["postcode"] = gen.postcode();
      e["entrancefee"] = gen.uniform(0, 2) == 0
                             ? "free"
                             : std::to_string(gen.uniform(2, 20)) + " pounds";
      e["openhours"] = std::to_string(gen.uniform(8, 11)) + ":00-" +
                       std::to_string(gen.uniform(17, 22)) + ":00";
      e["website"] = "www." + e[kEntityNameKey] + ".example.com";
      e["duration"] = std::to_string(gen.uniform(1, 4)) + " hours";
      d.database.push_back(std::move(e));
    }
    ont.domains.push_back(std::move(d));
  }

  { // hotel: find 7 / book 3 / request 5
    DomainSchema d;
    d.name = "hotel";
    d.slots = {
        {"area", SlotKind::ConstraintFind, areas},
        {"pricerange", SlotKind::ConstraintFind, prices},
        {"stars", SlotKind::ConstraintFind, {"1", "2", "3", "4", "5"}},
        {"parking", SlotKind::ConstraintFind, {"yes", "no"}},
        {"internet", SlotKind::ConstraintFind, {"yes", "no"}},
        {"type", SlotKind::ConstraintFind, {"hotel", "guesthouse"}},
        {"rating", SlotKind::ConstraintFind, ratings},
        {"day", SlotKind::ConstraintBook, days},
        {"nights", SlotKind::ConstraintBook, {"1", "2", "3", "4", "5", "6", "7"}},
        {"people", SlotKind::ConstraintBook, {"1", "2", "3", "4", "5", "6"}},
        {"address", SlotKind::Requestable, {}},
        {"phone", SlotKind::Requestable, {}},
        {"postcode", SlotKind::Requestable, {}},
        {"website", SlotKind::Requestable, {}},
        {"email", SlotKind::Requestable, {}},
    };
    for (size_t i = 0; i < 60; ++i) {
      Entity e = add_entity_base(d, i);
      fill_find_slots(d, e);
      e["address"] = gen.address();
      e["phone"] = gen.phone();
      e["postcode"] = gen.postcode();
      e["website"] = "www." + e[kEntityNameKey] + ".example.com";
      e["email"] = e[kEntityNameKey] + "@example.com";
      d.database.push_back(std::move(e));
    }
    ont.domains.push_back(std::move(d));
  }

  const std::vector<std::string> places = {"airport", "city-centre", "museum-quarter",
                                           "old-town", "station",    "university",
                                           "harbour", "stadium"};
  const std::vector<std::string> hours = {"08:00", "10:00", "12:00",
                                          "14:00", "16:00", "18:00"};

  { // taxi: find 4 / book 0 / request 2
    DomainSchema d;
    d.name = "taxi";
    d.slots = {
        {"departure", SlotKind::ConstraintFind, places},
        {"destination", SlotKind::ConstraintFind, places},
        {"leaveat", SlotKind::ConstraintFind, hours},
        {"arriveby", SlotKind::ConstraintFind, hours},
        {"cartype", SlotKind::Requestable, {}},
        {"phone", SlotKind::Requestable, {}},
    };
    static const std::vector<std::string> cars = {"toyota", "skoda", "bmw", "honda",
                                                  "ford",   "audi",  "tesla", "volvo"};
    for (size_t i = 0; i < 48; ++i) {
      Entity e = add_entity_base(d, i);
      fill_find_slots(d, e);
      e["cartype"] = gen.pick(cars);
      e["phone"] = gen.phone();
      d.database.push_back(std::move(e));
    }
    ont.domains.push_back(std::move(d));
  }

  { // train: find 5 / book 1 / request 5
    DomainSchema d;
    d.name = "train";
    const std::vector<std::string> stations = {"kings-cross", "north-gate", "riverside",
                                               "parkway", "central", "harbour"};
    d.slots = {
        {"departure", SlotKind::ConstraintFind, stations},
        {"destination", SlotKind::ConstraintFind, stations},
        {"day", SlotKind::ConstraintFind, days},
        {"leaveat", SlotKind::ConstraintFind, hours},
        {"arriveby", SlotKind::ConstraintFind, hours},
        {"people", SlotKind::ConstraintBook, {"1", "2", "3", "4", "5", "6", "7", "8"}},
        {"price", SlotKind::Requestable, {}},
        {"duration", SlotKind::Requestable, {}},
        {"trainid", SlotKind::Requestable, {}},
        {"platform", SlotKind::Requestable, {}},
        {"operator", SlotKind::Requestable, {}},
    };
    static const std::vector<std::string> operators = {"northline", "cityrail",
                                                       "express-co", "bluetrack"};
    for (size_t i = 0; i < 80; ++i) {
      Entity e = add_entity_base(d, i);
      fill_find_slots(d, e);
      e["price"] = std::to_string(gen.uniform(8, 60)) + "." +
                   detail::two_digits(gen.uniform(0, 99)) + " pounds";
      e["duration"] = std::to_string(gen.uniform(15, 120)) + " minutes";
      e["trainid"] = "TR" + detail::two_digits(gen.uniform(0, 99)) +
                     detail::two_digits(gen.uniform(0, 99));
      e["platform"] = std::to_string(gen.uniform(1, 9));
      e["operator"] = gen.pick(operators);
      d.database.push_back(std::move(e));
    }
    ont.domains.push_back(std::move(d));
  }

  { // hospital: find 1 / book 0 / request 3
    DomainSchema d;
    d.name = "hospital";
    d.slots = {
        {"department", SlotKind::ConstraintFind,
         {"cardiology", "neurology", "oncology", "pediatrics", "radiology", "surgery",
          "orthopedics", "dermatology"}},
        {"phone", SlotKind::Requestable, {}},
        {"address", SlotKind::Requestable, {}},
        {"postcode", SlotKind::Requestable, {}},
    };
    for (size_t i = 0; i < 20; ++i) {
      Entity e = add_entity_base(d, i);
      fill_find_slots(d, e);
      e["phone"] = gen.phone();
      e["address"] = gen.address();
      e["postcode"] = gen.postcode();
      d.database.push_back(std::move(e));
    }
    ont.domains.push_back(std::move(d));
  }

  { // police: find 0 / book 0 / request 3
    DomainSchema d;
    d.name = "police";
    d.slots = {
        {"phone", SlotKind::Requestable, {}},
        {"address", SlotKind::Requestable, {}},
        {"postcode", SlotKind::Requestable, {}},
    };
    for (size_t i = 0; i < 3; ++i) {
      Entity e = add_entity_base(d, i);
      e["phone"] = gen.phone();
      e["address"] = gen.address();
      e["postcode"] = gen.postcode();
      d.database.push_back(std::move(e));
    }
    ont.domains.push_back(std::move(d));
  }

  validate_ontology(ont);
  return ont;
}

} // namespace dm
