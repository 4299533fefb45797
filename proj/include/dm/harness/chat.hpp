#pragma once

// Interactive inspection REPL. The operator plays the user with a one-line
// act syntax; the system replies with its acts and a belief digest.
//
//   act      := intent | intent[domain.slot] | intent[domain.slot=value]
//   turn     := act (';' act)*
//   examples:  inform[restaurant.food=italian]
//              request[restaurant.phone]; request[restaurant.address]
//              bye
//
// A goal is sampled up front and printed as playing instructions so the
// session can end with an objective verdict.

#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dm/episode.hpp"
#include "dm/harness/train.hpp"
#include "dm/policy/policy.hpp"

namespace dm {

struct ActParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline DialogueAct parse_act(const std::string& text, const Ontology& ont) {
  std::string s = text;
  auto trim = [](std::string& x) {
    while (!x.empty() && std::isspace(static_cast<unsigned char>(x.front()))) x.erase(x.begin());
    while (!x.empty() && std::isspace(static_cast<unsigned char>(x.back()))) x.pop_back();
  };
  trim(s);
  if (s.empty()) throw ActParseError("empty act");

  DialogueAct act;
  auto lb = s.find('[');
  if (lb == std::string::npos) {
    act = general_act(s);
  } else {
    if (s.back() != ']') throw ActParseError("missing ']' in act: " + s);
    act.intent = s.substr(0, lb);
    std::string body = s.substr(lb + 1, s.size() - lb - 2);
    auto eq = body.find('=');
    std::string target = eq == std::string::npos ? body : body.substr(0, eq);
    if (eq != std::string::npos) act.value = body.substr(eq + 1);
    auto dot = target.find('.');
    if (dot == std::string::npos) throw ActParseError("expected domain.slot in act: " + s);
    act.domain = target.substr(0, dot);
    act.slot = target.substr(dot + 1);
  }
  try {
    validate_act(ont, act, /*user_side=*/true);
  } catch (const std::invalid_argument& e) {
    throw ActParseError(e.what());
  }
  return act;
}

inline std::vector<DialogueAct> parse_act_line(const std::string& line, const Ontology& ont) {
  std::vector<DialogueAct> acts;
  std::stringstream ss(line);
  std::string part;
  while (std::getline(ss, part, ';'))
    if (part.find_first_not_of(" \t") != std::string::npos) acts.push_back(parse_act(part, ont));
  if (acts.empty()) throw ActParseError("no acts on the line");
  return acts;
}

// System side of the chat: either a trained policy (greedy) or the oracle.
using ChatSystem =
    std::function<std::vector<DialogueAct>(const BeliefState&, const std::string& domain)>;

inline ChatSystem chat_system_from_policy(PolicyNet& policy) {
  return [&policy](const BeliefState& belief, const std::string& domain) {
    StateFeatures f = policy.featurize(belief, domain);
    PolicyOutput out = policy.eval(f);
    Rng rng(0);
    ActionChoice choice = select_action(out, rng, SelectMode::Greedy);
    return policy.expand(static_cast<size_t>(choice.index), belief, domain);
  };
}

inline ChatSystem chat_system_oracle() {
  return [](const BeliefState& belief, const std::string& domain) {
    return oracle_act(belief, domain);
  };
}

inline void print_goal(std::ostream& out, const UserGoal& goal) {
  out << "goal:\n";
  for (const auto& g : goal.domains) {
    out << "  " << g.domain << ": find {";
    bool first = true;
    for (const auto& [s, v] : g.find_constraints) {
      out << (first ? "" : ", ") << s << "=" << v;
      first = false;
    }
    out << "}, request {";
    first = true;
    for (const auto& s : g.request_slots) {
      out << (first ? "" : ", ") << s;
      first = false;
    }
    out << "}";
    if (g.book_constraints) {
      out << ", book {";
      first = true;
      for (const auto& [s, v] : *g.book_constraints) {
        out << (first ? "" : ", ") << s << "=" << v;
        first = false;
      }
      out << "}";
    }
    out << "\n";
  }
}

inline void chat_session(const Ontology& ont, const ChatSystem& system, std::istream& in,
                         std::ostream& out, uint64_t goal_seed = 1, bool dump_features = false) {
  Rng goal_rng(goal_seed);
  UserGoal goal = sample_goal(ont, goal_rng, 2);
  BeliefState belief(ont);
  EpisodeJudge judge(ont, goal);

  out << "acts: intent | intent[domain.slot] | intent[domain.slot=value], ';' separated.\n"
      << "type 'quit' to leave, 'bye' to end the dialogue with a verdict.\n";
  print_goal(out, goal);

  std::string line;
  while (out << "you> " << std::flush, std::getline(in, line)) {
    if (line == "quit") break;
    std::vector<DialogueAct> acts;
    try {
      acts = parse_act_line(line, ont);
    } catch (const ActParseError& e) {
      out << "parse error: " << e.what() << "\n"
          << "usage: intent[domain.slot=value], e.g. inform[restaurant.food=italian]\n";
      continue;
    }
    belief = update(belief, acts);
    const std::string domain = select_domain(belief, acts);
    belief.active_domain = domain;

    if (belief.terminated) {
      for (const auto& a : system(belief, domain)) out << "sys> " << to_string(a) << "\n";
      for (const auto& g : goal.domains) {
        if (!judge.already_solved(g.domain) && judge.solved(g.domain, belief))
          judge.mark_solved(g.domain);
        out << "  " << g.domain << (judge.already_solved(g.domain) ? ": solved" : ": unsolved")
            << "\n";
      }
      out << "verdict: success=" << (judge.all_solved() ? 1 : 0)
          << " complete=" << (judge.all_solved() ? 1 : 0) << "\n";
      break;
    }

    std::vector<DialogueAct> reply = system(belief, domain);
    apply_system_acts(belief, reply, domain);
    judge.observe_system(reply, domain, belief);
    for (const auto& g : goal.domains)
      if (!judge.already_solved(g.domain) && judge.solved(g.domain, belief))
        judge.mark_solved(g.domain);
    for (const auto& a : reply) out << "sys> " << to_string(a) << "\n";
    out << "belief> " << belief_digest(belief).dump() << "\n";
    if (dump_features) {
      DipState dip = dip_state(project(belief, domain), ont);
      out << "dip> independent:";
      for (double v : dip.independent) out << " " << v;
      out << "\n";
      for (const auto& [name, vec] : dip.slots) {
        out << "dip> " << name << ":";
        for (double v : vec) out << " " << v;
        out << "\n";
      }
    }
  }
}

} // namespace dm
