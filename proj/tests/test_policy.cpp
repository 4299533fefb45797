#include <catch2/catch_amalgamated.hpp>

#include "dm/nn/gradcheck.hpp"
#include "dm/policy/factory.hpp"
#include "helpers.hpp"

using namespace dm;

namespace {
Ontology small_ontology() { return default_ontology().restrict({"hospital", "police"}); }
} // namespace

TEST_CASE("FNN parameter count matches the closed form", "[policy]") {
  Ontology ont = default_ontology();
  FnnPolicy fnn(ont, 1);
  const size_t M = max_slot_count(ont);
  const size_t D = 19 + 7 * M;
  const size_t A = M + 6;
  const size_t expect = D * 128 + 128 + 128 * 128 + 128 + 2 * (128 * A + A);
  CHECK(fnn.params().total_size() == expect);
}

TEST_CASE("GNN parameter count is slot-independent", "[policy]") {
  Ontology ont = default_ontology();
  UhgnnPolicy uhgnn(ont, 1);
  // W_S 32x7+32, W_I 32x19+32, three 32x32 relations, twin heads 32x2+2 and
  // 32x6+6
  const size_t one_core = (32 * 7 + 32) + (32 * 19 + 32) + 3 * 32 * 32 +
                          2 * ((2 * 32 + 2) + (6 * 32 + 6));
  CHECK(uhgnn.params().total_size() == one_core);

  HgnnPolicy hgnn(ont, 1);
  CHECK(hgnn.params().total_size() == one_core * ont.domains.size());

  // restaurant (12 slots) and hospital (4 slots) instantiations share weights,
  // so the count cannot depend on the active domain
  UhgnnPolicy two(default_ontology().restrict({"restaurant", "hospital"}), 1);
  CHECK(two.params().total_size() == one_core);
}

TEST_CASE("adding a domain changes UHGNN by zero and HGNN by one core", "[policy]") {
  Ontology base = default_ontology();
  Ontology extended = base;
  DomainSchema extra = base.domain("hospital");
  extra.name = "clinic";
  extended.domains.push_back(extra);

  UhgnnPolicy u7(base, 1), u8(extended, 1);
  CHECK(u7.params().total_size() == u8.params().total_size());

  HgnnPolicy h7(base, 1), h8(extended, 1);
  const size_t one_core = u7.params().total_size();
  CHECK(h8.params().total_size() - h7.params().total_size() == one_core);
}

TEST_CASE("GNN slot outputs are permutation equivariant", "[policy]") {
  // 3 constraint slots of the same kind so permuting rows is legal
  Ontology ont;
  DomainSchema d;
  d.name = "trio";
  d.slots = {{"a", SlotKind::ConstraintFind, {"x", "y"}},
             {"b", SlotKind::ConstraintFind, {"x", "y"}},
             {"c", SlotKind::ConstraintFind, {"x", "y"}}};
  Entity e;
  e[kEntityNameKey] = "trio-00";
  e["a"] = "x";
  e["b"] = "y";
  e["c"] = "x";
  d.database.push_back(e);
  ont.domains.push_back(d);

  UhgnnPolicy policy(ont, 3);
  BeliefState b(ont);
  b = update(b, {slot_act("inform", "trio", "a", "x"), slot_act("request", "trio", "b")});
  // request on a constraint slot only shows up in the act history, which is
  // exactly what makes the three slot vectors distinct
  StateFeatures f = policy.featurize(b, "trio");
  PolicyOutput base = policy.eval(f);

  const size_t sd = dip_slot_dim(ont);
  std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& p : perms) {
    StateFeatures pf = f;
    for (size_t i = 0; i < 3; ++i)
      for (size_t k = 0; k < sd; ++k)
        pf.slots[i * sd + k] = f.slots[size_t(p[i]) * sd + k];
    PolicyOutput out = policy.eval(pf);
    for (size_t i = 0; i < 3; ++i) {
      CHECK(out.logits[i] == Catch::Approx(base.logits[size_t(p[i])]).epsilon(1e-12));
      CHECK(out.q[i] == Catch::Approx(base.q[size_t(p[i])]).epsilon(1e-12));
    }
    for (size_t gidx = 3; gidx < base.logits.size(); ++gidx)
      CHECK(out.logits[gidx] == Catch::Approx(base.logits[gidx]).epsilon(1e-12));
  }
}

TEST_CASE("masked actions have probability exactly zero", "[policy]") {
  Ontology ont = default_ontology();
  FnnPolicy fnn(ont, 5);
  BeliefState b(ont);
  StateFeatures f = fnn.featurize(b, "attraction");
  PolicyOutput out = fnn.eval(f);
  auto probs = nn::masked_softmax_values(out.logits, out.valid);
  double sum = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (!out.valid[i]) CHECK(probs[i] == 0.0);
    sum += probs[i];
  }
  CHECK(sum == Catch::Approx(1.0));
  // attraction has 10 slots; the padded tail must be masked
  CHECK(out.valid.size() == max_slot_count(ont) + 6);
  for (size_t i = 10; i < max_slot_count(ont); ++i) CHECK(out.valid[i] == 0);
}

TEST_CASE("UHGNN shares one parameter set across domains", "[policy]") {
  Ontology ont = default_ontology().restrict({"restaurant", "hotel"});
  UhgnnPolicy policy(ont, 9);
  BeliefState b(ont);
  StateFeatures fr = policy.featurize(b, "restaurant");
  StateFeatures fh = policy.featurize(b, "hotel");
  PolicyOutput r0 = policy.eval(fr), h0 = policy.eval(fh);

  // a gradient step on a restaurant turn moves the hotel outputs too
  nn::Parameter* w = policy.params().find("uhgnn/b_S");
  REQUIRE(w != nullptr);
  w->value.data[0] += 0.5;
  PolicyOutput r1 = policy.eval(fr), h1 = policy.eval(fh);
  CHECK(r1.logits != r0.logits);
  CHECK(h1.logits != h0.logits);
}

TEST_CASE("every architecture passes an end-to-end gradient check", "[policy]") {
  Ontology ont = small_ontology();
  BeliefState b(ont);
  b = update(b, {slot_act("inform", "hospital", "department", "oncology"),
                 slot_act("request", "hospital", "phone")});

  for (const std::string& kind : policy_kinds()) {
    auto policy = make_policy(kind, ont, 11);
    StateFeatures f = policy->featurize(b, "hospital");
    const auto& mask = policy->valid_mask("hospital");
    size_t valid_action = 0;
    while (!mask[valid_action]) ++valid_action;

    auto loss_of = [&](nn::Graph& g) {
      Rng drop_rng(77); // fixed dropout stream: finite differences see one function
      GraphOut o = policy->forward(g, f, /*train=*/true, &drop_rng);
      auto logp = g.masked_log_softmax(o.logits, mask);
      auto probs = g.exp(logp);
      auto ce = g.scale(g.pick(logp, valid_action), -1.0);
      auto ent = g.dot(probs, logp);
      auto critic = g.square(g.sub(g.pick(o.q, valid_action), g.constant(0.7)));
      return g.add(g.add(ce, critic), g.scale(ent, 0.01));
    };
    auto report = nn::finite_diff_check(
        policy->params(),
        [&] {
          nn::Graph g;
          return g.scalar(loss_of(g));
        },
        [&] {
          nn::Graph g;
          g.backward(loss_of(g));
        },
        1e-5, /*max_per_tensor=*/24);
    INFO(kind << " worst " << report.worst_param << "[" << report.worst_index << "]");
    CHECK(report.max_rel_error < 1e-4);
  }
}

TEST_CASE("factory rejects unknown kinds", "[policy]") {
  Ontology ont = small_ontology();
  CHECK_THROWS_AS(make_policy("GPT", ont, 1), std::invalid_argument);
  for (const std::string& kind : policy_kinds()) {
    auto p = make_policy(kind, ont, 2);
    CHECK(p->kind() == kind);
    CHECK(p->params().total_size() > 0);
  }
}

TEST_CASE("composite catalogue is deterministic, frozen and well formed", "[policy]") {
  Ontology ont = default_ontology();
  auto cat1 = build_composite_catalogue(ont, 200, kCatalogueSeed);
  auto cat2 = build_composite_catalogue(ont, 200, kCatalogueSeed);
  CHECK(cat1 == cat2);

  auto committed = load_catalogue(std::string(DM_SOURCE_DIR) + "/data/fnnref_catalogue.json");
  auto full = build_composite_catalogue(ont);
  CHECK(committed == full);

  for (const auto& combo : full) {
    CHECK(combo.size() >= 1);
    CHECK(combo.size() <= 3);
    for (const auto& item : combo) {
      auto sep = item.find(':');
      std::string intent = item.substr(0, sep);
      if (intent == "general") {
        CHECK(ont.is_general_system_intent(item.substr(sep + 1)));
      } else {
        auto dot = item.find('.');
        const DomainSchema& d = ont.domain(item.substr(sep + 1, dot - sep - 1));
        const SlotDef* s = d.find_slot(item.substr(dot + 1));
        REQUIRE(s != nullptr);
        // request only for constraint slots, inform only for requestable
        if (intent == "request") CHECK(s->is_constraint());
        if (intent == "inform") CHECK_FALSE(s->is_constraint());
      }
    }
  }
}

TEST_CASE("oracle supervision maps to a valid action for every policy", "[policy]") {
  Ontology ont = small_ontology();
  std::vector<std::unique_ptr<PolicyNet>> policies;
  for (const std::string& kind : policy_kinds()) policies.push_back(make_policy(kind, ont, 3));

  Rng rng(41);
  for (int ep = 0; ep < 5; ++ep) {
    UserGoal goal = sample_goal(ont, rng, 2);
    AgendaUser user(ont, goal);
    struct Probe final : SystemAgent {
      OracleAgent oracle;
      std::vector<std::unique_ptr<PolicyNet>>* policies;
      std::vector<DialogueAct> act(const BeliefState& b, const std::string& d) override {
        auto acts = oracle.act(b, d);
        for (auto& p : *policies) {
          int idx = p->oracle_action_index(acts, d);
          REQUIRE(idx >= 0);
          REQUIRE(p->valid_mask(d)[size_t(idx)] == 1);
        }
        return acts;
      }
    } probe;
    probe.policies = &policies;
    run_episode(probe, user, ont);
  }
}
