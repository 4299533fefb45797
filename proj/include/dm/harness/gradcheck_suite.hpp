#pragma once

// End-to-end gradient checks: every architecture under every loss mode,
// against central finite differences on real collected transitions.

#include <string>
#include <vector>

#include "dm/harness/config.hpp"
#include "dm/learn/collect.hpp"
#include "dm/nn/gradcheck.hpp"
#include "dm/policy/factory.hpp"

namespace dm {

struct GradcheckRow {
  std::string policy;
  std::string mode;
  uint64_t seed = 0;
  double max_rel_error = 0;
  size_t checked = 0;
  bool pass() const { return max_rel_error < 1e-4; }
};

inline std::vector<GradcheckRow> gradcheck_suite(const Ontology& ont,
                                                 const std::vector<uint64_t>& seeds,
                                                 size_t max_per_tensor = 16,
                                                 size_t batch_size = 4) {
  const std::vector<std::pair<std::string, detail::LossMode>> modes = {
      {"RL", detail::LossMode::Acer},
      {"BC", detail::LossMode::CrossEntropy},
      {"ILfOD", detail::LossMode::Acer},
      {"ILfOS", detail::LossMode::AcerMargin},
  };
  std::vector<GradcheckRow> rows;
  for (const std::string& kind : policy_kinds()) {
    for (const auto& [mode_name, mode] : modes) {
      for (uint64_t seed : seeds) {
        auto policy = make_policy(kind, ont, seed);
        Rng rng(detail::mix_seed(seed, 0x6AD));
        ReplayBuffer buffer(256);
        // ILfOD checks demonstration data (mu = 1), the others agent data
        const double mix = mode_name == "ILfOD" ? 1.0 : 0.0;
        while (buffer.size() < batch_size)
          collect_episode(*policy, ont, buffer, rng, mix, /*labels=*/true, 2, 40);
        std::vector<const Transition*> batch;
        for (size_t i = 0; i < batch_size; ++i) batch.push_back(&buffer[i]);

        LossWeights w;
        const uint64_t drop_seed = detail::mix_seed(seed, 0xD20);
        auto loss_value = [&] {
          nn::Graph g;
          Rng drop(drop_seed);
          return g.scalar(detail::build_batch_loss(g, *policy, batch, w, drop, mode).total);
        };
        auto compute_grads = [&] {
          nn::Graph g;
          Rng drop(drop_seed);
          g.backward(detail::build_batch_loss(g, *policy, batch, w, drop, mode).total);
        };
        auto rep = nn::finite_diff_check(policy->params(), loss_value, compute_grads, 1e-5,
                                         max_per_tensor);
        rows.push_back({kind, mode_name, seed, rep.max_rel_error, rep.checked});
      }
    }
  }
  return rows;
}

} // namespace dm
