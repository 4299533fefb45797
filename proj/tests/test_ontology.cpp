#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "dm/ontology.hpp"
#include "helpers.hpp"

using namespace dm;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
} // namespace

TEST_CASE("bundled ontology has the expected slot counts", "[ontology]") {
  Ontology ont = default_ontology();
  REQUIRE(ont.domains.size() == 7);
  struct Row {
    const char* name;
    size_t find, book, req;
  };
  const Row rows[] = {
      {"restaurant", 4, 3, 5}, {"attraction", 3, 0, 7}, {"hotel", 7, 3, 5},
      {"taxi", 4, 0, 2},       {"train", 5, 1, 5},      {"hospital", 1, 0, 3},
      {"police", 0, 0, 3},
  };
  for (const Row& r : rows) {
    const DomainSchema& d = ont.domain(r.name);
    CHECK(d.count_of(SlotKind::ConstraintFind) == r.find);
    CHECK(d.count_of(SlotKind::ConstraintBook) == r.book);
    CHECK(d.count_of(SlotKind::Requestable) == r.req);
    CHECK_FALSE(d.database.empty());
  }
}

TEST_CASE("validation rejects degenerate schemas", "[ontology]") {
  Ontology empty;
  CHECK_THROWS_AS(validate_ontology(empty), OntologyError);

  Ontology dup = dmtest::toy_booking_ontology();
  dup.domains[0].slots.push_back({"area", SlotKind::Requestable, {}});
  CHECK_THROWS_WITH(validate_ontology(dup), Catch::Matchers::ContainsSubstring("area"));

  Ontology reserved = dmtest::toy_booking_ontology();
  reserved.domains[0].slots[0].values.push_back("dontcare");
  CHECK_THROWS_AS(validate_ontology(reserved), OntologyError);
}

TEST_CASE("query semantics", "[ontology]") {
  Ontology ont = dmtest::toy_booking_ontology();
  const DomainSchema& d = ont.domains[0];

  CHECK(query(d, {}).size() == d.database.size());
  CHECK(query(d, {{"area", kDontcare}}).size() == d.database.size());
  CHECK_THROWS_AS(query(d, {{"nosuch", "x"}}), OntologyError);

  // brute-force filter oracle on a constraint matching exactly one entity
  std::map<std::string, std::string> c = {{"area", "north"}, {"price", "dear"}};
  std::vector<size_t> expect;
  for (size_t i = 0; i < d.database.size(); ++i) {
    bool ok = true;
    for (const auto& [s, v] : c) ok &= d.database[i].at(s) == v;
    if (ok) expect.push_back(i);
  }
  REQUIRE(expect.size() == 1);
  CHECK(query(d, c) == expect);
}

TEST_CASE("query monotonicity under added constraints", "[ontology]") {
  Ontology ont = default_ontology();
  const DomainSchema& d = ont.domain("restaurant");
  std::mt19937_64 rng(7);
  auto find_slots = d.slots_of(SlotKind::ConstraintFind);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, std::string> c;
    const SlotDef* s1 = find_slots[rng() % find_slots.size()];
    c[s1->name] = s1->values[rng() % s1->values.size()];
    auto before = query(d, c);
    const SlotDef* s2 = s1;
    while (s2 == s1) s2 = find_slots[rng() % find_slots.size()];
    c[s2->name] = s2->values[rng() % s2->values.size()];
    auto after = query(d, c);
    CHECK(after.size() <= before.size());
  }
}

TEST_CASE("bundled databases can yield 0, 1 and >5 matches", "[ontology]") {
  Ontology ont = default_ontology();
  for (const char* name : {"restaurant", "hotel", "train"}) {
    const DomainSchema& d = ont.domain(name);
    auto find_slots = d.slots_of(SlotKind::ConstraintFind);
    bool saw0 = false, saw1 = false, sawMany = false;
    for (const SlotDef* a : find_slots)
      for (const auto& va : a->values) {
        size_t n1 = query(d, {{a->name, va}}).size();
        sawMany |= n1 > 5;
        for (const SlotDef* b : find_slots) {
          if (b == a) continue;
          for (const auto& vb : b->values) {
            size_t n = query(d, {{a->name, va}, {b->name, vb}}).size();
            saw0 |= n == 0;
            saw1 |= n == 1;
          }
        }
      }
    INFO(name);
    CHECK(saw0);
    CHECK(saw1);
    CHECK(sawMany);
  }
}

TEST_CASE("degree pointer is a one-hot binning", "[ontology]") {
  CHECK(degree_pointer(0) == std::array<double, 6>{1, 0, 0, 0, 0, 0});
  CHECK(degree_pointer(4) == std::array<double, 6>{0, 0, 0, 0, 1, 0});
  CHECK(degree_pointer(17) == std::array<double, 6>{0, 0, 0, 0, 0, 1});
  for (size_t n = 0; n <= 100; ++n) {
    double sum = 0;
    for (double x : degree_pointer(n)) sum += x;
    REQUIRE(sum == 1.0);
  }
}

TEST_CASE("ontology file round-trips byte-identically", "[ontology]") {
  Ontology ont = default_ontology();
  const std::string p1 = "ont_rt_1.json", p2 = "ont_rt_2.json";
  save_ontology(ont, p1);
  Ontology loaded = load_ontology(p1);
  save_ontology(loaded, p2);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(loaded.domains.size() == ont.domains.size());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("committed ontology file matches the built-in default", "[ontology]") {
  Ontology committed = load_ontology(std::string(DM_SOURCE_DIR) + "/data/ontology.json");
  Ontology builtin = default_ontology();
  REQUIRE(committed.domains.size() == builtin.domains.size());
  CHECK(ontology_to_json(committed) == ontology_to_json(builtin));
}

TEST_CASE("load reports parse and validation errors with context", "[ontology]") {
  const std::string p = "ont_bad.json";
  {
    std::ofstream out(p);
    out << "{ not json";
  }
  CHECK_THROWS_WITH(load_ontology(p), Catch::Matchers::ContainsSubstring("parse error"));
  {
    std::ofstream out(p);
    out << R"({"domains": []})";
  }
  CHECK_THROWS_WITH(load_ontology(p), Catch::Matchers::ContainsSubstring("no domains"));
  std::remove(p.c_str());
  CHECK_THROWS_AS(load_ontology("does_not_exist.json"), OntologyError);
}
