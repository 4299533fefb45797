#pragma once

// Experiment configuration. Defaults follow the standard protocol: 10 seeds,
// 10,000 training dialogues with a greedy evaluation on 500 fresh dialogues
// every 1,000, lr 1e-3, dropout 0.1, batch size 64, Boltzmann temperature 1.

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dm/learn/learner.hpp"
#include "dm/ontology.hpp"

namespace dm {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name;            // label used in reports; defaults to policy-mode
  std::string policy = "UHGNN";
  std::string mode = "ILfOS";  // RL | BC | ILfOD | ILfOS
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int train_dialogues = 10000;
  int eval_every = 1000;
  int eval_dialogues = 500;

  double lr = 1e-3;
  double dropout = 0.1;
  int batch_size = 64;
  size_t buffer_capacity = 50000;
  double gamma = 0.99;
  double lambda_q = 0.5;
  double lambda_pi = 1.0;
  double lambda_il = 1.0;
  double lambda_ent = 0.01;
  double margin = std::log(2.0);
  double temperature = 1.0;
  double ratio_clip = 10.0;
  double mix = 0.5; // demonstration-episode probability for BC/ILfOD/ILfOS
  int patience = 40;
  int max_domains = 2;

  std::string ontology_path;         // empty: built-in default ontology
  std::vector<std::string> domains;  // optional restriction

  std::string label() const { return name.empty() ? policy + "-" + mode : name; }
  LossWeights weights() const {
    LossWeights w;
    w.lambda_q = lambda_q;
    w.lambda_pi = lambda_pi;
    w.lambda_il = lambda_il;
    w.lambda_ent = lambda_ent;
    w.margin = margin;
    w.temperature = temperature;
    w.gamma = gamma;
    w.ratio_clip = ratio_clip;
    return w;
  }
  Ontology load_ontology_or_default() const {
    Ontology ont = ontology_path.empty() ? default_ontology() : dm::load_ontology(ontology_path);
    if (!domains.empty()) ont = ont.restrict(domains);
    return ont;
  }
};

// the best configuration gets a short name
inline ExperimentConfig acgos_preset() {
  ExperimentConfig cfg;
  cfg.name = "ACGOS";
  cfg.policy = "UHGNN";
  cfg.mode = "ILfOS";
  return cfg;
}

inline void validate_config(const ExperimentConfig& c) {
  const std::vector<std::string> kinds = {"FNN", "FNN-REF", "HFNN", "HGNN", "UHGNN"};
  if (std::find(kinds.begin(), kinds.end(), c.policy) == kinds.end())
    throw ConfigError("unknown policy kind: " + c.policy);
  const std::vector<std::string> modes = {"RL", "BC", "ILfOD", "ILfOS"};
  if (std::find(modes.begin(), modes.end(), c.mode) == modes.end())
    throw ConfigError("unknown learning mode: " + c.mode);
  if (c.seeds.empty()) throw ConfigError("config needs at least one seed");
  if (c.train_dialogues < 1) throw ConfigError("train_dialogues must be positive");
  if (c.eval_every < 1) throw ConfigError("eval_every must be positive");
  if (c.eval_dialogues < 1) throw ConfigError("eval_dialogues must be positive");
  if (c.mix < 0.0 || c.mix > 1.0) throw ConfigError("mix must lie in [0, 1]");
  if (c.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (c.dropout < 0.0 || c.dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  if (c.max_domains < 1) throw ConfigError("max_domains must be positive");
  if (c.patience < 1) throw ConfigError("patience must be positive");
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.label();
  j["policy"] = c.policy;
  j["mode"] = c.mode;
  j["seeds"] = c.seeds;
  j["train_dialogues"] = c.train_dialogues;
  j["eval_every"] = c.eval_every;
  j["eval_dialogues"] = c.eval_dialogues;
  j["lr"] = c.lr;
  j["dropout"] = c.dropout;
  j["batch_size"] = c.batch_size;
  j["buffer_capacity"] = c.buffer_capacity;
  j["gamma"] = c.gamma;
  j["lambda_q"] = c.lambda_q;
  j["lambda_pi"] = c.lambda_pi;
  j["lambda_il"] = c.lambda_il;
  j["lambda_ent"] = c.lambda_ent;
  j["margin"] = c.margin;
  j["temperature"] = c.temperature;
  j["ratio_clip"] = c.ratio_clip;
  j["mix"] = c.mix;
  j["patience"] = c.patience;
  j["max_domains"] = c.max_domains;
  j["ontology_path"] = c.ontology_path;
  j["domains"] = c.domains;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::ordered_json& j) {
  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
  };
  get("name", c.name);
  get("policy", c.policy);
  get("mode", c.mode);
  get("seeds", c.seeds);
  get("train_dialogues", c.train_dialogues);
  get("eval_every", c.eval_every);
  get("eval_dialogues", c.eval_dialogues);
  get("lr", c.lr);
  get("dropout", c.dropout);
  get("batch_size", c.batch_size);
  get("buffer_capacity", c.buffer_capacity);
  get("gamma", c.gamma);
  get("lambda_q", c.lambda_q);
  get("lambda_pi", c.lambda_pi);
  get("lambda_il", c.lambda_il);
  get("lambda_ent", c.lambda_ent);
  get("margin", c.margin);
  get("temperature", c.temperature);
  get("ratio_clip", c.ratio_clip);
  get("mix", c.mix);
  get("patience", c.patience);
  get("max_domains", c.max_domains);
  get("ontology_path", c.ontology_path);
  get("domains", c.domains);
  validate_config(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

} // namespace dm
