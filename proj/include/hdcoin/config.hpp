#pragma once

// Run configuration: dataset source, difficulty controller parameters,
// agent roster and simulation knobs. Parsed from a JSON file; every numeric
// consensus parameter is an integer or a "num/den" rational string, never a
// float. See the README for the documented key set.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdcoin/consensus.hpp"
#include "hdcoin/dataset.hpp"
#include "hdcoin/difficulty.hpp"

namespace hdcoin::sim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  enum class Mode { synthetic, csv, presplit };

  Mode mode = Mode::synthetic;
  std::string csv_path;        // mode csv
  std::string train_path;      // mode presplit
  std::string test_path;       // mode presplit
  bool has_header = false;
  Rational train_fraction{7, 10};
  std::uint64_t split_seed = 1;
  data::SyntheticParams synthetic;
};

struct DifficultySpec {
  std::vector<std::uint32_t> ladder = chain::default_ladder();
  std::uint32_t initial_dimension = 3000;
  std::optional<Rational> initial_threshold;  // default: majority-class baseline
  std::uint32_t num_levels = 10;
  std::uint32_t window = 10;
  std::uint64_t t_low = 0;
  std::uint64_t t_high = UINT64_MAX;
  Rational margin{2, 100};
};

struct AgentSpec {
  std::string id;
  std::string strategy = "sequential";  // or "random"
  std::uint32_t start = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = 8;
  std::uint32_t byzantine_inflate = 0;
};

struct RunConfig {
  DatasetSpec dataset;
  DifficultySpec difficulty;
  std::vector<AgentSpec> agents;
  std::uint64_t rounds = 5;
  std::uint64_t max_block_txs = 16;
  std::uint64_t reward = 50;
  std::uint64_t tx_seed = 1;
  std::uint64_t txs_per_round = 3;
  unsigned threads = 1;
};

namespace detail {

inline Rational json_rational(const nlohmann::json& j, const char* key, Rational fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>(), 1);
  throw ConfigError(std::string("config: '") + key +
                    "' must be a \"num/den\" string or an integer");
}

template <typename T>
T json_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

}  // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    const std::string mode = detail::json_or<std::string>(d, "mode", "synthetic");
    if (mode == "synthetic") {
      cfg.dataset.mode = DatasetSpec::Mode::synthetic;
    } else if (mode == "csv") {
      cfg.dataset.mode = DatasetSpec::Mode::csv;
      if (!d.contains("csv_path")) throw ConfigError("config: dataset.csv_path required");
    } else if (mode == "presplit") {
      cfg.dataset.mode = DatasetSpec::Mode::presplit;
      if (!d.contains("train_path") || !d.contains("test_path")) {
        throw ConfigError("config: dataset.train_path and dataset.test_path required");
      }
    } else {
      throw ConfigError("config: unknown dataset.mode '" + mode + "'");
    }
    cfg.dataset.csv_path = detail::json_or<std::string>(d, "csv_path", "");
    cfg.dataset.train_path = detail::json_or<std::string>(d, "train_path", "");
    cfg.dataset.test_path = detail::json_or<std::string>(d, "test_path", "");
    cfg.dataset.has_header = detail::json_or<bool>(d, "has_header", false);
    cfg.dataset.train_fraction =
        detail::json_rational(d, "train_fraction", cfg.dataset.train_fraction);
    cfg.dataset.split_seed = detail::json_or<std::uint64_t>(d, "split_seed", 1);
    if (d.contains("synthetic")) {
      const auto& s = d.at("synthetic");
      cfg.dataset.synthetic.classes = detail::json_or<std::uint32_t>(s, "classes", 3);
      cfg.dataset.synthetic.features = detail::json_or<std::uint32_t>(s, "features", 6);
      cfg.dataset.synthetic.samples_per_class =
          detail::json_or<std::uint32_t>(s, "samples_per_class", 40);
      cfg.dataset.synthetic.separation = detail::json_or<double>(s, "separation", 4.0);
      cfg.dataset.synthetic.seed = detail::json_or<std::uint64_t>(s, "seed", 1);
    }
  }
  if (j.contains("difficulty")) {
    const auto& d = j.at("difficulty");
    if (d.contains("ladder")) {
      cfg.difficulty.ladder = d.at("ladder").get<std::vector<std::uint32_t>>();
      if (cfg.difficulty.ladder.empty()) throw ConfigError("config: difficulty.ladder empty");
      for (std::size_t i = 1; i < cfg.difficulty.ladder.size(); ++i) {
        if (cfg.difficulty.ladder[i] <= cfg.difficulty.ladder[i - 1]) {
          throw ConfigError("config: difficulty.ladder must be strictly increasing");
        }
      }
    }
    cfg.difficulty.initial_dimension =
        detail::json_or<std::uint32_t>(d, "initial_dimension", cfg.difficulty.ladder.front());
    if (d.contains("initial_threshold")) {
      cfg.difficulty.initial_threshold =
          detail::json_rational(d, "initial_threshold", Rational(0, 1));
    }
    cfg.difficulty.num_levels = detail::json_or<std::uint32_t>(d, "num_levels", 10);
    cfg.difficulty.window = detail::json_or<std::uint32_t>(d, "window", 10);
    cfg.difficulty.t_low = detail::json_or<std::uint64_t>(d, "t_low", 0);
    cfg.difficulty.t_high = detail::json_or<std::uint64_t>(d, "t_high", UINT64_MAX);
    cfg.difficulty.margin = detail::json_rational(d, "margin", cfg.difficulty.margin);
    if (cfg.difficulty.initial_threshold &&
        (*cfg.difficulty.initial_threshold < Rational(0, 1) ||
         *cfg.difficulty.initial_threshold > Rational(1, 1))) {
      throw ConfigError("config: difficulty.initial_threshold must be within [0, 1]");
    }
    if (cfg.difficulty.margin < Rational(0, 1)) {
      throw ConfigError("config: difficulty.margin must be non-negative");
    }
    if (cfg.difficulty.window < 1) throw ConfigError("config: difficulty.window must be >= 1");
  } else {
    cfg.difficulty.initial_dimension = cfg.difficulty.ladder.front();
  }
  if (j.contains("agents")) {
    for (const auto& a : j.at("agents")) {
      AgentSpec spec;
      if (!a.contains("id")) throw ConfigError("config: every agent needs an id");
      spec.id = a.at("id").get<std::string>();
      spec.strategy = detail::json_or<std::string>(a, "strategy", "sequential");
      if (spec.strategy != "sequential" && spec.strategy != "random") {
        throw ConfigError("config: agent strategy must be 'sequential' or 'random'");
      }
      spec.start = detail::json_or<std::uint32_t>(a, "start", 0);
      spec.seed = detail::json_or<std::uint64_t>(a, "seed", 0);
      spec.budget = detail::json_or<std::uint64_t>(a, "budget", 8);
      spec.byzantine_inflate = detail::json_or<std::uint32_t>(a, "byzantine_inflate", 0);
      cfg.agents.push_back(std::move(spec));
    }
  }
  if (cfg.agents.empty()) {
    cfg.agents.push_back({"miner-0", "sequential", 0, 0, 8, 0});
  }
  cfg.rounds = detail::json_or<std::uint64_t>(j, "rounds", 5);
  cfg.max_block_txs = detail::json_or<std::uint64_t>(j, "max_block_txs", 16);
  cfg.reward = detail::json_or<std::uint64_t>(j, "reward", 50);
  cfg.tx_seed = detail::json_or<std::uint64_t>(j, "tx_seed", 1);
  cfg.txs_per_round = detail::json_or<std::uint64_t>(j, "txs_per_round", 3);
  cfg.threads = detail::json_or<unsigned>(j, "threads", 1);
  if (cfg.rounds < 1) throw ConfigError("config: rounds must be >= 1");
  if (cfg.max_block_txs < 1) throw ConfigError("config: max_block_txs must be >= 1");
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in '" + path.string() + "': " + e.what());
  }
  return run_config_from_json(j);
}

struct ResolvedTask {
  data::Dataset train;
  data::Dataset test;
  Digest32 task_hash{};  // sha256(hash(train) || hash(test))
};

inline Digest32 task_dataset_hash(const data::Dataset& train, const data::Dataset& test) {
  Sha256 h;
  const Digest32 train_digest = data::dataset_hash(train);
  const Digest32 test_digest = data::dataset_hash(test);
  h.update(train_digest.data(), train_digest.size());
  h.update(test_digest.data(), test_digest.size());
  return h.finalize();
}

inline ResolvedTask resolve_dataset(const DatasetSpec& spec) {
  ResolvedTask task;
  switch (spec.mode) {
    case DatasetSpec::Mode::synthetic: {
      const data::Dataset full = data::gen_synthetic(spec.synthetic);
      auto [train, test] = data::split(full, spec.train_fraction, spec.split_seed);
      task.train = std::move(train);
      task.test = std::move(test);
      break;
    }
    case DatasetSpec::Mode::csv: {
      const data::Dataset full = data::load_csv(spec.csv_path, spec.has_header);
      auto [train, test] = data::split(full, spec.train_fraction, spec.split_seed);
      task.train = std::move(train);
      task.test = std::move(test);
      break;
    }
    case DatasetSpec::Mode::presplit: {
      auto [train, test] = data::load_csv_pair(spec.train_path, spec.test_path, spec.has_header);
      task.train = std::move(train);
      task.test = std::move(test);
      break;
    }
  }
  task.task_hash = task_dataset_hash(task.train, task.test);
  return task;
}

inline chain::ProtocolParams make_protocol_params(const RunConfig& cfg,
                                                  const ResolvedTask& task) {
  chain::ProtocolParams params;
  params.dataset_hash = task.task_hash;
  params.ladder = cfg.difficulty.ladder;
  (void)chain::ladder_index(params.ladder, cfg.difficulty.initial_dimension);
  params.initial.dimension = cfg.difficulty.initial_dimension;
  params.initial.num_levels = cfg.difficulty.num_levels;
  params.baseline_floor = data::majority_baseline(task.test);
  params.initial.accuracy_threshold =
      cfg.difficulty.initial_threshold.value_or(params.baseline_floor);
  params.window = cfg.difficulty.window;
  params.t_low = cfg.difficulty.t_low;
  params.t_high = cfg.difficulty.t_high;
  params.margin = cfg.difficulty.margin;
  params.max_block_txs = cfg.max_block_txs;
  params.reward = cfg.reward;
  return params;
}

inline std::vector<MinerAgent> make_agents(const RunConfig& cfg) {
  std::vector<MinerAgent> agents;
  agents.reserve(cfg.agents.size());
  for (const AgentSpec& spec : cfg.agents) {
    MinerAgent agent;
    agent.miner_id = spec.id;
    agent.strategy = spec.strategy == "random"
                         ? mining::NonceStrategy::random_seeded(spec.seed)
                         : mining::NonceStrategy::sequential_from(spec.start);
    agent.budget_per_round = spec.budget;
    agent.byzantine_inflate = spec.byzantine_inflate;
    agents.push_back(std::move(agent));
  }
  return agents;
}

inline Simulator make_simulator(const RunConfig& cfg, ResolvedTask task) {
  const chain::ProtocolParams params = make_protocol_params(cfg, task);
  TxGenConfig tx_config{cfg.tx_seed, cfg.txs_per_round, 8};
  return Simulator(params, std::move(task.train), std::move(task.test), make_agents(cfg),
                   tx_config, cfg.threads);
}

}  // namespace hdcoin::sim
