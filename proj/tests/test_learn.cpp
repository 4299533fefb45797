#include <catch2/catch_amalgamated.hpp>

#include "dm/learn/collect.hpp"
#include "dm/learn/learner.hpp"
#include "dm/learn/replay.hpp"
#include "dm/policy/factory.hpp"
#include "helpers.hpp"

using namespace dm;

namespace {

// Minimal two-state policy net for hand-built MDP checks: one-hot state in,
// two actions out, no dropout, so forwards are deterministic.
class MdpPolicy final : public PolicyNet {
public:
  explicit MdpPolicy(uint64_t seed, size_t hidden = 24) {
    std::mt19937_64 rng(seed);
    W0_ = ps_.add("mdp/W0", {hidden, 2}, rng, 2);
    b0_ = ps_.add("mdp/b0", {hidden}, rng, 2);
    pi_ = ps_.add("mdp/pi_W", {2, hidden}, rng, hidden);
    pib_ = ps_.add("mdp/pi_b", {2}, rng, hidden);
    q_ = ps_.add("mdp/q_W", {2, hidden}, rng, hidden);
    qb_ = ps_.add("mdp/q_b", {2}, rng, hidden);
  }
  std::string kind() const override { return "MDP"; }
  const Ontology& ontology() const override { return ont_; }
  nn::ParamStore& params() override { return ps_; }
  StateFeatures featurize(const BeliefState&, const std::string&) const override {
    throw std::logic_error("unused");
  }
  size_t action_dim(const std::string&) const override { return 2; }
  const std::vector<uint8_t>& valid_mask(const std::string&) const override { return mask_; }
  GraphOut forward(nn::Graph& g, const StateFeatures& f, bool, Rng*) override {
    auto x = g.input(std::span<const uint8_t>(f.independent));
    auto h = g.relu(g.affine(W0_, b0_, x));
    return {g.affine(pi_, pib_, h), g.affine(q_, qb_, h)};
  }
  std::vector<DialogueAct> expand(size_t, const BeliefState&, const std::string&) const override {
    throw std::logic_error("unused");
  }
  int oracle_action_index(const std::vector<DialogueAct>&, const std::string&) const override {
    return -1;
  }
  std::string action_label(size_t i, const std::string&) const override {
    return "a" + std::to_string(i);
  }

  nn::Parameter *W0_, *b0_, *pi_, *pib_, *q_, *qb_;

private:
  nn::ParamStore ps_;
  std::vector<uint8_t> mask_{1, 1};
  Ontology ont_ = dmtest::tiny_ontology();
};

StateFeatures mdp_state(int s) {
  StateFeatures f;
  f.domain = "mdp";
  f.independent = s == 0 ? std::vector<uint8_t>{1, 0} : std::vector<uint8_t>{0, 1};
  return f;
}

// s0: a0 -> +0.5 to s1, a1 -> 0 stay; s1: a0 -> 0 to s0, a1 -> +1 stay
struct ToyMdp {
  double gamma = 0.5;
  int next(int s, int a) const { return s == 0 ? (a == 0 ? 1 : 0) : (a == 0 ? 0 : 1); }
  double reward(int s, int a) const { return s == 0 ? (a == 0 ? 0.5 : 0.0) : (a == 0 ? 0.0 : 1.0); }

  // value-iteration oracle
  std::array<std::array<double, 2>, 2> optimal_q() const {
    std::array<std::array<double, 2>, 2> q{{{0, 0}, {0, 0}}};
    for (int it = 0; it < 200; ++it) {
      auto prev = q;
      for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) {
          int ns = next(s, a);
          q[size_t(s)][size_t(a)] =
              reward(s, a) + gamma * std::max(prev[size_t(ns)][0], prev[size_t(ns)][1]);
        }
    }
    return q;
  }
};

} // namespace

TEST_CASE("boltzmann sampling is symmetric and shift invariant", "[learn]") {
  PolicyOutput out;
  out.logits = {1.0, 1.0};
  out.q = {0, 0};
  out.valid = {1, 1};
  Rng rng(8);
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) first += select_action(out, rng, SelectMode::Boltzmann).index == 0;
  // chi^2 with 1 dof at the 0.01 level
  double chi = 0;
  for (double o : {double(first), double(n - first)}) chi += (o - n / 2.0) * (o - n / 2.0) / (n / 2.0);
  CHECK(chi < 6.635);

  PolicyOutput shifted = out;
  shifted.logits = {101.0, 101.0};
  Rng rng_a(99), rng_b(99);
  for (int i = 0; i < 200; ++i)
    CHECK(select_action(out, rng_a, SelectMode::Boltzmann).index ==
          select_action(shifted, rng_b, SelectMode::Boltzmann).index);
}

TEST_CASE("greedy takes the argmax and masking is respected", "[learn]") {
  PolicyOutput out;
  out.logits = {1.0, 3.0, 2.0};
  out.q = {0, 0, 0};
  out.valid = {1, 1, 1};
  Rng rng(1);
  CHECK(select_action(out, rng, SelectMode::Greedy).index == 1);

  out.valid = {1, 0, 1}; // best logit masked
  CHECK(select_action(out, rng, SelectMode::Greedy).index == 2);
  for (int i = 0; i < 100; ++i)
    CHECK(select_action(out, rng, SelectMode::Boltzmann).index != 1);

  out.valid = {0, 0, 0};
  CHECK_THROWS_AS(select_action(out, rng, SelectMode::Greedy), std::logic_error);
}

TEST_CASE("replay buffer sampling is uniform", "[learn]") {
  ReplayBuffer buf(64);
  for (int i = 0; i < 64; ++i) {
    Transition t;
    t.action = i;
    buf.push(std::move(t));
  }
  Rng rng(5);
  std::array<int, 64> counts{};
  const int draws = 64000;
  for (int i = 0; i < draws; ++i) counts[size_t(buf.sample(rng).action)]++;
  double expect = draws / 64.0, chi = 0;
  for (int c : counts) chi += (c - expect) * (c - expect) / expect;
  CHECK(chi < 93.2); // chi^2_{63} at the 0.01 level
}

TEST_CASE("replay buffer overwrites as a ring at capacity", "[learn]") {
  ReplayBuffer buf(4);
  for (int i = 0; i < 7; ++i) {
    Transition t;
    t.action = i;
    t.oracle_generated = i >= 5;
    buf.push(std::move(t));
  }
  CHECK(buf.size() == 4);
  CHECK(buf.oracle_fraction() == 0.5); // items 5,6 among 4 survivors
}

TEST_CASE("terminal transitions bootstrap to the bare reward", "[learn]") {
  MdpPolicy policy(3);
  PolicyOutput out = policy.eval(mdp_state(0));

  Transition t;
  t.features = mdp_state(0);
  t.action = 1;
  t.behavior_prob = out.logits.size() ? nn::masked_softmax_values(out.logits, out.valid)[1] : 0.5;
  t.reward = 1.25;
  t.terminal = true;

  LossWeights w;
  nn::Adam opt(0.0); // zero learning rate: inspect the report without moving
  Rng rng(1);
  LossReport rep = acer_update(policy, {&t}, w, opt, rng);
  const double expect_q = w.lambda_q * std::pow(out.q[1] - 1.25, 2.0); // y = r exactly
  CHECK(rep.l_q == Catch::Approx(expect_q).epsilon(1e-12));

  // on-policy sample: mu = pi(a|s), so rho = 1 and the actor term is
  // -A * log pi(a|s)
  auto probs = nn::masked_softmax_values(out.logits, out.valid);
  double v = probs[0] * out.q[0] + probs[1] * out.q[1];
  double advantage = out.q[1] - v;
  CHECK(rep.l_pi == Catch::Approx(-advantage * std::log(probs[1])).epsilon(1e-9));
}

TEST_CASE("actor critic solves the hand-built MDP", "[learn]") {
  ToyMdp mdp;
  auto qstar = mdp.optimal_q();
  REQUIRE(qstar[0][0] == Catch::Approx(1.5));
  REQUIRE(qstar[1][1] == Catch::Approx(2.0));

  // uniform behaviour policy fills the buffer
  ReplayBuffer buf(4096);
  Rng rng(7);
  int s = 0;
  for (int i = 0; i < 4096; ++i) {
    int a = int(rng() % 2);
    Transition t;
    t.features = mdp_state(s);
    t.action = a;
    t.behavior_prob = 0.5;
    t.reward = mdp.reward(s, a);
    int ns = mdp.next(s, a);
    t.next_features = mdp_state(ns);
    t.terminal = false;
    buf.push(std::move(t));
    s = ns;
  }

  MdpPolicy policy(11);
  LossWeights w;
  w.gamma = mdp.gamma;
  nn::Adam opt(1e-3);
  for (int iter = 0; iter < 1500; ++iter)
    acer_update(policy, buf.sample_batch(rng, 64), w, opt, rng);

  for (int st = 0; st < 2; ++st) {
    PolicyOutput out = policy.eval(mdp_state(st));
    int greedy = select_action(out, rng, SelectMode::Greedy).index;
    int optimal = qstar[size_t(st)][0] > qstar[size_t(st)][1] ? 0 : 1;
    CHECK(greedy == optimal);
    CHECK(std::fabs(out.q[0] - qstar[size_t(st)][0]) < 0.05);
    CHECK(std::fabs(out.q[1] - qstar[size_t(st)][1]) < 0.05);
  }
}

TEST_CASE("behaviour cloning loss values", "[learn]") {
  MdpPolicy policy(5);
  // zero the pi head: exactly uniform over two actions
  policy.pi_->value.fill(0.0);
  policy.pib_->value.fill(0.0);

  Transition t;
  t.features = mdp_state(0);
  t.action = 0;
  t.oracle_action = 1;
  LossWeights w;
  nn::Adam opt(0.0);
  Rng rng(2);
  LossReport rep = bc_update(policy, {&t}, w, opt, rng);
  CHECK(rep.l_il == Catch::Approx(std::log(2.0)).epsilon(1e-12));

  Transition missing = t;
  missing.oracle_action = -1;
  CHECK_THROWS_AS(bc_update(policy, {&missing}, w, opt, rng), std::invalid_argument);
}

TEST_CASE("behaviour cloning overfits a fixed oracle batch", "[learn]") {
  Ontology ont = default_ontology().restrict({"restaurant"});
  HfnnPolicy policy(ont, 21);
  Rng rng(31);

  // 64 oracle-labelled states from demonstration episodes
  ReplayBuffer buf(64);
  while (buf.size() < 64)
    collect_episode(policy, ont, buf, rng, /*mix=*/1.0, /*labels=*/true, 1, 40);

  std::vector<const Transition*> batch;
  for (size_t i = 0; i < 64; ++i) batch.push_back(&buf[i]);
  LossWeights w;
  nn::Adam opt(1e-3);
  for (int it = 0; it < 200; ++it) bc_update(policy, batch, w, opt, rng);

  int agree = 0;
  for (const Transition* t : batch) {
    PolicyOutput out = policy.eval(t->features);
    agree += select_action(out, rng, SelectMode::Greedy).index == t->oracle_action;
  }
  CHECK(agree >= 61); // >= 95% argmax agreement
}

TEST_CASE("margin loss arithmetic", "[learn]") {
  MdpPolicy policy(9);
  // force Q = [1, 2] via a zero weight matrix and a fixed bias
  policy.q_->value.fill(0.0);
  policy.qb_->value.data = {1.0, 2.0};

  Transition t;
  t.features = mdp_state(1);
  t.action = 0;
  t.behavior_prob = 0.5;
  t.reward = 0.0;
  t.terminal = true;
  t.oracle_action = 0;

  LossWeights w;
  nn::Adam opt(0.0);
  Rng rng(3);
  LossReport rep = ilfos_update(policy, {&t}, w, opt, rng);
  // max(1.0, 2.0 + ln 2) - 1.0
  CHECK(rep.l_il == Catch::Approx(2.0 + std::log(2.0) - 1.0).epsilon(1e-12));

  // expert action ahead of everything by at least the margin: zero penalty
  policy.qb_->value.data = {3.0, 2.0};
  LossReport rep2 = ilfos_update(policy, {&t}, w, opt, rng);
  CHECK(rep2.l_il == 0.0);

  Transition missing = t;
  missing.oracle_action = -1;
  CHECK_THROWS_AS(ilfos_update(policy, {&missing}, w, opt, rng), std::invalid_argument);
}

TEST_CASE("episode-level demonstration mixing", "[learn]") {
  Ontology ont = default_ontology().restrict({"hospital", "police"});
  UhgnnPolicy policy(ont, 13);
  Rng rng(17);
  ReplayBuffer buf(50000);

  int demos = 0;
  CollectStats st;
  for (int i = 0; i < 40; ++i) {
    st = collect_episode(policy, ont, buf, rng, 0.0, false, 2, 40);
    CHECK_FALSE(st.demo);
  }
  CHECK(buf.oracle_fraction() == 0.0); // mix = 0: no oracle-flagged transitions

  ReplayBuffer buf2(50000);
  for (int i = 0; i < 40; ++i) {
    st = collect_episode(policy, ont, buf2, rng, 1.0, false, 2, 40);
    CHECK(st.demo);
    demos += st.demo;
  }
  CHECK(buf2.oracle_fraction() == 1.0); // mix = 1: everything oracle-flagged
  CHECK(demos == 40);
}

TEST_CASE("collected transitions line up with episode turns", "[learn]") {
  Ontology ont = default_ontology().restrict({"restaurant", "hotel"});
  UhgnnPolicy policy(ont, 19);
  Rng rng(23);

  for (int ep = 0; ep < 5; ++ep) {
    UserGoal goal = sample_goal(ont, rng, 2);
    AgendaUser user(ont, goal);
    TransitionCollector collector(policy, rng, {.demo = false, .oracle_labels = true});
    EpisodeResult res = run_episode(collector, user, ont);

    const auto& ts = collector.transitions();
    CHECK(int(ts.size()) == res.turns); // one transition per system turn
    double sum = 0;
    int terminals = 0;
    for (const auto& t : ts) {
      sum += t.reward;
      terminals += t.terminal;
      CHECK(policy.valid_mask(t.features.domain)[size_t(t.action)] == 1);
      CHECK(t.oracle_action >= 0);
      CHECK(t.behavior_prob > 0.0);
      CHECK(t.behavior_prob <= 1.0);
    }
    CHECK(sum == res.total_reward); // transition rewards add up to the total
    CHECK(terminals == 1);
    CHECK(ts.back().terminal);
  }
}
