#pragma once

// Training and evaluation orchestration. A run directory holds one manifest
// plus one subdirectory per seed with metrics.csv, loss_trace.csv and a
// checkpoint per evaluation point. Everything is deterministic given the
// config: rerunning a (config, seed) pair reproduces the files byte for byte.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "dm/harness/config.hpp"
#include "dm/learn/collect.hpp"
#include "dm/learn/learner.hpp"
#include "dm/nn/checkpoint.hpp"
#include "dm/policy/factory.hpp"

namespace dm {

namespace detail {

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t x = a * 0x9E3779B97F4A7C15ULL + b + 0x2545F4914F6CDD1DULL;
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDULL;
  x ^= x >> 33;
  return x;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

} // namespace detail

inline const char* kMetricsHeader =
    "config,seed,dialogues-trained,inform-P,inform-R,inform-F1,book-rate,success,complete,"
    "avg-turns-success,avg-turns-all,avg-reward";

inline std::string metrics_csv_row(const std::string& config, uint64_t seed, int dialogues,
                                   const MetricsReport& m) {
  using detail::fmt;
  std::string row = config + "," + std::to_string(seed) + "," + std::to_string(dialogues);
  for (double v : {m.inform_precision, m.inform_recall, m.inform_f1, m.book_rate, m.success,
                   m.complete, m.avg_turns_success, m.avg_turns_all, m.avg_reward})
    row += "," + fmt(v);
  return row;
}

// Greedy evaluation on fresh seeded goals; never mutates the policy.
inline MetricsReport evaluate_policy(PolicyNet& policy, const Ontology& ont, int n_dialogues,
                                     uint64_t seed, int max_domains, int patience,
                                     const TrajectorySink& sink = {}) {
  if (n_dialogues < 1) throw std::invalid_argument("evaluation needs at least one dialogue");
  Rng rng(seed);
  std::vector<EpisodeResult> results;
  results.reserve(static_cast<size_t>(n_dialogues));
  for (int i = 0; i < n_dialogues; ++i) {
    UserGoal goal = sample_goal(ont, rng, max_domains);
    AgendaUser user(ont, goal, patience);
    TransitionCollector agent(policy, rng, {.demo = false, .greedy = true});
    results.push_back(run_episode(agent, user, ont, sink));
  }
  return metrics(results);
}

inline MetricsReport evaluate_oracle(const Ontology& ont, int n_dialogues, uint64_t seed,
                                     int max_domains, int patience,
                                     const TrajectorySink& sink = {}) {
  if (n_dialogues < 1) throw std::invalid_argument("evaluation needs at least one dialogue");
  Rng rng(seed);
  std::vector<EpisodeResult> results;
  for (int i = 0; i < n_dialogues; ++i) {
    UserGoal goal = sample_goal(ont, rng, max_domains);
    AgendaUser user(ont, goal, patience);
    OracleAgent oracle;
    results.push_back(run_episode(oracle, user, ont, sink));
  }
  return metrics(results);
}

struct SeedRunResult {
  uint64_t seed = 0;
  bool skipped = false; // already complete on disk
  std::vector<MetricsReport> evals;
};

// One seed of one experiment: fresh policy, one collected episode plus one
// gradient iteration per episode, periodic greedy evaluation + checkpoint.
inline SeedRunResult train_seed(const ExperimentConfig& cfg, uint64_t seed,
                                const std::filesystem::path& seed_dir) {
  namespace fs = std::filesystem;
  SeedRunResult out;
  out.seed = seed;

  const int n_evals = cfg.train_dialogues / cfg.eval_every;
  const fs::path metrics_path = seed_dir / "metrics.csv";
  const fs::path done_path = seed_dir / "DONE";
  if (fs::exists(done_path) && fs::exists(metrics_path)) {
    out.skipped = true;
    return out;
  }
  fs::create_directories(seed_dir);

  Ontology ont = cfg.load_ontology_or_default();
  auto policy = make_policy(cfg.policy, ont, seed);
  policy->set_dropout(cfg.dropout);
  nn::Adam opt(cfg.lr);
  ReplayBuffer buffer(cfg.buffer_capacity);
  Rng rng(detail::mix_seed(seed, 0xC011EC7));
  const LossWeights w = cfg.weights();

  const bool labels = cfg.mode == "BC" || cfg.mode == "ILfOS";
  const double mix = cfg.mode == "RL" ? 0.0 : cfg.mix;

  std::ofstream metrics_csv(metrics_path);
  metrics_csv << kMetricsHeader << "\n";
  std::ofstream trace(seed_dir / "loss_trace.csv");
  trace << "episode,L_Q,L_pi,L_IL,L_ent,buffer-size,oracle-fraction\n";

  int updates = 0;
  for (int ep = 1; ep <= cfg.train_dialogues; ++ep) {
    collect_episode(*policy, ont, buffer, rng, mix, labels, cfg.max_domains, cfg.patience);

    auto batch = buffer.sample_batch(rng, static_cast<size_t>(cfg.batch_size));
    LossReport rep;
    if (cfg.mode == "BC")
      rep = bc_update(*policy, batch, w, opt, rng);
    else if (cfg.mode == "ILfOS")
      rep = ilfos_update(*policy, batch, w, opt, rng);
    else
      rep = acer_update(*policy, batch, w, opt, rng);
    ++updates;
    assert(updates == ep); // one gradient iteration per finished dialogue

    using detail::fmt;
    trace << ep << "," << fmt(rep.l_q) << "," << fmt(rep.l_pi) << "," << fmt(rep.l_il) << ","
          << fmt(rep.l_ent) << "," << buffer.size() << "," << fmt(buffer.oracle_fraction())
          << "\n";

    if (ep % cfg.eval_every == 0) {
      MetricsReport m = evaluate_policy(*policy, ont, cfg.eval_dialogues,
                                        detail::mix_seed(seed, static_cast<uint64_t>(ep)),
                                        cfg.max_domains, cfg.patience);
      metrics_csv << metrics_csv_row(cfg.label(), seed, ep, m) << "\n";
      metrics_csv.flush();
      out.evals.push_back(m);
      save_checkpoint((seed_dir / ("ckpt-" + std::to_string(ep) + ".bin")).string(),
                      policy->params(), &opt);
    }
  }
  (void)n_evals;
  std::ofstream(done_path) << "ok\n";
  return out;
}

// Runs every seed (optionally across threads; seeds never share state) and
// writes the manifest. Completed seeds found on disk are left untouched.
inline std::filesystem::path train(const ExperimentConfig& cfg, const std::string& run_dir,
                                   int jobs = 1,
                                   const std::function<void(const SeedRunResult&)>& on_seed = {}) {
  namespace fs = std::filesystem;
  validate_config(cfg);
  fs::path dir(run_dir);
  fs::create_directories(dir);
  {
    std::ofstream manifest(dir / "manifest.json");
    manifest << config_to_json(cfg).dump(2) << "\n";
  }

  std::vector<SeedRunResult> results(cfg.seeds.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= cfg.seeds.size()) break;
      uint64_t seed = cfg.seeds[i];
      results[i] = train_seed(cfg, seed, dir / ("seed-" + std::to_string(seed)));
    }
  };
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(cfg.seeds.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (on_seed)
    for (const auto& r : results) on_seed(r);
  return dir;
}

} // namespace dm
