#include <catch2/catch_amalgamated.hpp>

#include "dm/episode.hpp"
#include "helpers.hpp"

using namespace dm;

TEST_CASE("reward pattern: two domains solved at turns 5 and 8", "[episode]") {
  Ontology ont = dmtest::tiny_ontology();
  UserGoal goal;
  goal.domains.push_back({"alpha", {}, {"phone"}, std::nullopt});
  goal.domains.push_back({"beta", {}, {"phone"}, std::nullopt});
  AgendaUser user(ont, goal);

  std::vector<std::vector<DialogueAct>> script;
  for (int t = 0; t < 4; ++t) script.push_back({general_act("reqmore")});
  script.push_back({general_act("offer", "alpha-00"),
                    slot_act("inform", "alpha", "phone", "0122300000")});
  for (int t = 0; t < 2; ++t) script.push_back({general_act("reqmore")});
  script.push_back({general_act("offer", "beta-00"),
                    slot_act("inform", "beta", "phone", "0122300000")});
  dmtest::ScriptedAgent agent(script);

  EpisodeResult res = run_episode(agent, user, ont);
  CHECK(res.turns == 8);
  CHECK(res.total_reward == 44.0);
  CHECK(res.success);
  CHECK(res.complete);
  REQUIRE(agent.rewards.size() == 8);
  CHECK(agent.rewards[4] == 5.0);
  CHECK(agent.rewards[7] == 45.0);
}

TEST_CASE("a dialogue ending unsolved pays one penalty per turn", "[episode]") {
  Ontology ont = dmtest::tiny_ontology();
  UserGoal goal;
  goal.domains.push_back({"alpha", {}, {"phone"}, std::nullopt});
  AgendaUser user(ont, goal, /*patience=*/8);
  dmtest::ScriptedAgent agent({{general_act("reqmore")}});
  EpisodeResult res = run_episode(agent, user, ont);
  CHECK(res.turns == 8);
  CHECK(res.total_reward == -8.0);
  CHECK_FALSE(res.success);
  CHECK_FALSE(res.complete);
}

TEST_CASE("per-turn rewards are -1 or +5 plus a 0/40 terminal bonus", "[episode]") {
  Ontology ont = default_ontology();
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    UserGoal goal = sample_goal(ont, rng, 2);
    AgendaUser user(ont, goal);
    OracleAgent oracle;
    struct Recorder final : SystemAgent {
      OracleAgent inner;
      std::vector<double> rewards;
      std::vector<bool> terminals;
      std::vector<DialogueAct> act(const BeliefState& b, const std::string& d) override {
        return inner.act(b, d);
      }
      void on_reward(double r, bool t) override {
        rewards.push_back(r);
        terminals.push_back(t);
      }
    } rec;
    EpisodeResult res = run_episode(rec, user, ont);
    double sum = 0;
    for (size_t k = 0; k < rec.rewards.size(); ++k) {
      double r = rec.rewards[k];
      if (rec.terminals[k]) {
        CHECK((r == -1.0 || r == 5.0 || r == 39.0 || r == 45.0));
      } else {
        CHECK((r == -1.0 || r == 5.0));
      }
      sum += r;
    }
    CHECK(sum == res.total_reward);
    CHECK(static_cast<int>(rec.rewards.size()) == res.turns);
  }
}

TEST_CASE("identical seeds give identical episode results", "[episode]") {
  Ontology ont = default_ontology();
  auto play = [&](uint64_t seed) {
    Rng rng(seed);
    UserGoal goal = sample_goal(ont, rng, 3);
    AgendaUser user(ont, goal);
    OracleAgent oracle;
    return run_episode(oracle, user, ont);
  };
  EpisodeResult a = play(77), b = play(77);
  CHECK(a.turns == b.turns);
  CHECK(a.total_reward == b.total_reward);
  CHECK(a.success == b.success);
  CHECK(a.informed == b.informed);
}

TEST_CASE("success requires perfect recall and book rate", "[episode]") {
  Ontology ont = default_ontology();
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    UserGoal goal = sample_goal(ont, rng, 2);
    AgendaUser user(ont, goal);
    OracleAgent oracle;
    EpisodeResult res = run_episode(oracle, user, ont);
    if (res.success) {
      REQUIRE(res.inform_recall() == 1.0);
      REQUIRE(res.all_books_ok());
    }
  }
}

TEST_CASE("an episode can be complete without being successful", "[episode]") {
  // the system books immediately: the user is content, but the booking never
  // met the goal constraints
  Ontology ont = dmtest::toy_booking_ontology();
  UserGoal goal;
  goal.domains.push_back({"inn",
                          {{"area", "north"}},
                          {"phone"},
                          std::map<std::string, std::string>{{"day", "monday"}}});
  AgendaUser user(ont, goal);
  // books before the user could state its day constraint; the user trusts it
  dmtest::ScriptedAgent agent({
      {general_act("offer", "inn-00"), general_act("book", "REF-inn-0")},
      {slot_act("inform", "inn", "phone", "0122300000")},
      {general_act("reqmore")},
  });
  EpisodeResult res = run_episode(agent, user, ont);
  CHECK(res.complete);
  CHECK_FALSE(res.success);
}

TEST_CASE("metric edge conventions", "[episode]") {
  EpisodeResult nothing; // zero informed, zero requested
  CHECK(nothing.inform_precision() == 1.0);
  CHECK(nothing.inform_recall() == 1.0);

  EpisodeResult silent; // requested but nothing informed
  silent.requested = {{"a", "x"}};
  CHECK(silent.inform_precision() == 0.0);
  CHECK(silent.inform_recall() == 0.0);

  EpisodeResult half;
  half.requested = {{"d", "phone"}, {"d", "address"}};
  half.informed = {{"d", "phone"}, {"d", "postcode"}};
  CHECK(half.inform_precision() == 0.5);
  CHECK(half.inform_recall() == 0.5);
  CHECK(half.inform_f1() == 0.5);

  EpisodeResult exact;
  exact.requested = {{"d", "phone"}};
  exact.informed = {{"d", "phone"}};
  CHECK(exact.inform_precision() == 1.0);
  CHECK(exact.inform_recall() == 1.0);
  CHECK(exact.inform_f1() == 1.0);

  CHECK_THROWS(metrics({}));
}
