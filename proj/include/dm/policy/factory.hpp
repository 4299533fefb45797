#pragma once

#include <memory>
#include <sstream>
#include <string>

#include "dm/policy/fnn.hpp"
#include "dm/policy/fnnref.hpp"
#include "dm/policy/gnn.hpp"
#include "dm/policy/policy.hpp"

namespace dm {

inline std::unique_ptr<PolicyNet> make_policy(const std::string& kind, const Ontology& ont,
                                              uint64_t seed) {
  if (kind == "FNN") return std::make_unique<FnnPolicy>(ont, seed);
  if (kind == "FNN-REF") return std::make_unique<FnnRefPolicy>(ont, seed);
  if (kind == "HFNN") return std::make_unique<HfnnPolicy>(ont, seed);
  if (kind == "HGNN") return std::make_unique<HgnnPolicy>(ont, seed);
  if (kind == "UHGNN") return std::make_unique<UhgnnPolicy>(ont, seed);
  throw std::invalid_argument("unknown policy kind: " + kind +
                              " (expected FNN, FNN-REF, HFNN, HGNN or UHGNN)");
}

inline const std::vector<std::string>& policy_kinds() {
  static const std::vector<std::string> kinds = {"FNN", "FNN-REF", "HFNN", "HGNN", "UHGNN"};
  return kinds;
}

inline std::string describe_policy(PolicyNet& policy) {
  std::ostringstream out;
  out << policy.kind() << " parameters\n";
  size_t total = 0;
  for (const auto& p : policy.params().all()) {
    out << "  " << p->name << "  [";
    for (size_t i = 0; i < p->value.shape.size(); ++i)
      out << (i ? "x" : "") << p->value.shape[i];
    out << "]  " << p->value.size() << "\n";
    total += p->value.size();
  }
  out << "  total: " << total << "\n";
  return out.str();
}

} // namespace dm
