// hdcoin command line: dataset tools, single-shot mining, claim and chain
// verification, multi-miner simulation and benchmark reports.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 validation failure,
// 4 verification rejection.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdcoin/blockchain.hpp"
#include "hdcoin/config.hpp"
#include "hdcoin/consensus.hpp"
#include "hdcoin/dataset.hpp"
#include "hdcoin/miner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRejected = 4;

using hdcoin::Rational;

// Shared dataset selection flags. Exactly one source must be given:
// --train/--test (pre-split CSVs), --data (one CSV split on the fly), or
// --synthetic (seeded Gaussian blobs).
struct DatasetOpts {
  std::string data_path;
  std::string train_path;
  std::string test_path;
  bool has_header = false;
  std::string fraction = "7/10";
  std::uint64_t split_seed = 1;
  bool synthetic = false;
  std::uint32_t classes = 3;
  std::uint32_t features = 6;
  std::uint32_t samples_per_class = 40;
  double separation = 4.0;
  std::uint64_t synthetic_seed = 1;
};

void add_dataset_opts(CLI::App* cmd, DatasetOpts& opts) {
  cmd->add_option("--data", opts.data_path, "single CSV, split into train/test");
  cmd->add_option("--train", opts.train_path, "training CSV (with --test)");
  cmd->add_option("--test", opts.test_path, "inference CSV (with --train)");
  cmd->add_flag("--header", opts.has_header, "CSV files carry a header row");
  cmd->add_option("--train-fraction", opts.fraction, "train fraction, e.g. 7/10 or 0.7");
  cmd->add_option("--split-seed", opts.split_seed, "seed for the stratified split");
  cmd->add_flag("--synthetic", opts.synthetic, "use the seeded synthetic generator");
  cmd->add_option("--classes", opts.classes, "synthetic: class count");
  cmd->add_option("--features", opts.features, "synthetic: feature count");
  cmd->add_option("--samples-per-class", opts.samples_per_class, "synthetic: samples per class");
  cmd->add_option("--separation", opts.separation, "synthetic: blob separation");
  cmd->add_option("--synthetic-seed", opts.synthetic_seed, "synthetic: generator seed");
}

hdcoin::sim::ResolvedTask resolve(const DatasetOpts& opts) {
  hdcoin::sim::DatasetSpec spec;
  spec.has_header = opts.has_header;
  spec.train_fraction = hdcoin::parse_rational(opts.fraction);
  spec.split_seed = opts.split_seed;
  if (!opts.train_path.empty() || !opts.test_path.empty()) {
    if (opts.train_path.empty() || opts.test_path.empty()) {
      throw hdcoin::sim::ConfigError("--train and --test must be given together");
    }
    spec.mode = hdcoin::sim::DatasetSpec::Mode::presplit;
    spec.train_path = opts.train_path;
    spec.test_path = opts.test_path;
  } else if (!opts.data_path.empty()) {
    spec.mode = hdcoin::sim::DatasetSpec::Mode::csv;
    spec.csv_path = opts.data_path;
  } else if (opts.synthetic) {
    spec.mode = hdcoin::sim::DatasetSpec::Mode::synthetic;
    spec.synthetic = {opts.classes, opts.features, opts.samples_per_class, opts.separation,
                      opts.synthetic_seed};
  } else {
    throw hdcoin::sim::ConfigError("no dataset given: use --data, --train/--test or --synthetic");
  }
  return hdcoin::sim::resolve_dataset(spec);
}

hdcoin::chain::Difficulty difficulty_from(std::uint32_t dimension, std::uint32_t levels,
                                          const std::string& threshold) {
  hdcoin::chain::Difficulty d;
  d.dimension = dimension;
  d.num_levels = levels;
  d.accuracy_threshold = hdcoin::parse_rational(threshold);
  return d;
}

std::string accuracy_line(const hdcoin::hdc::ExactAccuracy& acc) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%" PRIu32 "/%" PRIu32 " (%.4f%%)", acc.correct, acc.total,
                acc.percent());
  return buf;
}

int cmd_dataset_hash(const std::string& path, bool has_header) {
  const hdcoin::data::Dataset ds = hdcoin::data::load_csv(path, has_header);
  std::cout << hdcoin::hex_encode(hdcoin::data::dataset_hash(ds)) << "\n";
  return kExitOk;
}

int cmd_dataset_split(const std::string& path, bool has_header, const std::string& fraction,
                      std::uint64_t seed, const std::string& train_out,
                      const std::string& test_out) {
  const hdcoin::data::Dataset ds = hdcoin::data::load_csv(path, has_header);
  const auto result = hdcoin::data::split(ds, hdcoin::parse_rational(fraction), seed);
  hdcoin::data::save_csv(result.train, train_out);
  hdcoin::data::save_csv(result.test, test_out);
  std::cout << "train: " << result.train.num_samples << " samples -> " << train_out << "\n"
            << "test: " << result.test.num_samples << " samples -> " << test_out << "\n";
  return kExitOk;
}

int cmd_dataset_gen(const DatasetOpts& opts, const std::string& out_path) {
  hdcoin::data::SyntheticParams params{opts.classes, opts.features, opts.samples_per_class,
                                       opts.separation, opts.synthetic_seed};
  const hdcoin::data::Dataset ds = hdcoin::data::gen_synthetic(params);
  hdcoin::data::save_csv(ds, out_path);
  std::cout << "wrote " << ds.num_samples << " samples (" << ds.num_classes << " classes, "
            << ds.num_features << " features) to " << out_path << "\n";
  return kExitOk;
}

int cmd_mine(const DatasetOpts& data_opts, std::uint32_t dimension, std::uint32_t levels,
             std::uint64_t budget, const std::string& strategy, std::uint32_t start,
             std::uint64_t seed, unsigned threads, double time_window_s) {
  const auto task_data = resolve(data_opts);
  hdcoin::mining::MiningTask task;
  task.dataset_hash = task_data.task_hash;
  task.difficulty = difficulty_from(dimension, levels, "0/1");
  task.nonce_budget = budget;
  task.strategy = strategy == "random" ? hdcoin::mining::NonceStrategy::random_seeded(seed)
                                       : hdcoin::mining::NonceStrategy::sequential_from(start);
  const hdcoin::mining::MiningResult result =
      time_window_s > 0.0
          ? hdcoin::mining::mine_time_window(task, task_data.train, task_data.test, time_window_s)
          : hdcoin::mining::mine(task, task_data.train, task_data.test, threads);
  std::cout << "task_dataset_hash: " << hdcoin::hex_encode(task_data.task_hash) << "\n"
            << "best_nonce: " << result.nonce << "\n"
            << "accuracy: " << accuracy_line(result.accuracy) << "\n"
            << "trials: " << result.trials_used << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", result.nonce_time_seconds);
  std::cout << "nonce_time_s: " << buf << " (mean wall-clock per trial; measurement only)\n";
  return kExitOk;
}

int cmd_verify(const DatasetOpts& data_opts, std::uint32_t dimension, std::uint32_t levels,
               const std::string& threshold, std::uint32_t nonce, std::uint32_t correct,
               std::uint32_t total) {
  const auto task_data = resolve(data_opts);
  hdcoin::mining::MiningResult claim;
  claim.nonce = nonce;
  claim.accuracy = {correct, total};
  const auto verdict = hdcoin::sim::verify_claim(
      claim, difficulty_from(dimension, levels, threshold), task_data.train, task_data.test);
  if (verdict.accepted) {
    std::cout << "accept\n";
    return kExitOk;
  }
  std::cout << "reject: " << verdict.reason << "\n";
  return kExitRejected;
}

int cmd_simulate(const std::string& config_path, const std::string& chain_out,
                 const std::string& log_out, std::uint64_t rounds_override) {
  hdcoin::sim::RunConfig cfg = hdcoin::sim::load_run_config(config_path);
  if (rounds_override > 0) cfg.rounds = rounds_override;
  auto task = hdcoin::sim::resolve_dataset(cfg.dataset);
  hdcoin::sim::Simulator simulator = hdcoin::sim::make_simulator(cfg, std::move(task));

  if (!chain_out.empty()) {
    hdcoin::chain::save_chain({simulator.blocks().data(), 1}, chain_out);  // genesis
  }
  std::vector<hdcoin::sim::RoundOutcome> outcomes;
  for (std::uint64_t r = 0; r < cfg.rounds; ++r) {
    outcomes.push_back(simulator.run_round());
    const auto& o = outcomes.back();
    std::cout << "round " << r << ": winner=" << o.winner << " nonce=" << o.winning_result.nonce
              << " accuracy=" << accuracy_line(o.winning_result.accuracy)
              << " dimension=" << o.sealed_block.header.difficulty.dimension << " threshold="
              << o.sealed_block.header.difficulty.accuracy_threshold.to_string() << "\n";
    if (!chain_out.empty()) {
      hdcoin::chain::append_chain_block(o.sealed_block, chain_out);
    }
  }
  if (!log_out.empty()) hdcoin::sim::write_round_log(outcomes, log_out);

  const auto violations = simulator.validate();
  if (!violations.empty()) {
    std::cerr << "sealed chain failed validation at height " << violations.front().height << ": "
              << violations.front().code << "\n";
    return kExitValidation;
  }
  std::cout << "chain valid, " << simulator.blocks().size() << " blocks ("
            << simulator.blocks().size() - 1 << " mined)\n";
  return kExitOk;
}

int cmd_verify_chain(const std::string& config_path, const std::string& chain_path) {
  const hdcoin::sim::RunConfig cfg = hdcoin::sim::load_run_config(config_path);
  const auto task = hdcoin::sim::resolve_dataset(cfg.dataset);
  hdcoin::chain::ProtocolParams params = hdcoin::sim::make_protocol_params(cfg, task);
  std::uint64_t max_budget = 1;
  for (const auto& agent : cfg.agents) max_budget = std::max(max_budget, agent.budget);
  params.round_trials_per_batch = max_budget;

  const std::vector<hdcoin::chain::Block> blocks = hdcoin::chain::load_chain(chain_path);
  const hdcoin::chain::ValidationContext ctx{&task.train, &task.test, params};
  const auto violations = hdcoin::chain::validate_chain(blocks, ctx);
  if (!violations.empty()) {
    const auto& v = violations.front();
    std::cout << "violation at height " << v.height << ": " << v.code
              << (v.detail.empty() ? "" : " (" + v.detail + ")") << "\n";
    return kExitValidation;
  }
  std::cout << "chain ok (" << blocks.size() << " blocks)\n";
  return kExitOk;
}

int cmd_benchmark(const DatasetOpts& data_opts, std::vector<std::uint32_t> dimensions,
                  std::uint32_t levels, std::size_t time_samples,
                  std::vector<std::uint64_t> budgets, std::uint32_t curve_dimension,
                  const std::string& csv_prefix) {
  const auto task_data = resolve(data_opts);
  if (dimensions.empty()) dimensions = hdcoin::chain::default_ladder();
  if (budgets.empty()) budgets = {1, 2, 4, 8, 16};
  if (curve_dimension == 0) curve_dimension = dimensions.front();

  std::printf("nonce time vs dimension (%zu-sample median, wall clock)\n", time_samples);
  std::printf("%10s %14s\n", "dimension", "nonce_time_s");
  std::vector<std::pair<std::uint32_t, double>> times;
  for (const std::uint32_t dim : dimensions) {
    hdcoin::mining::MiningTask task;
    task.dataset_hash = task_data.task_hash;
    task.difficulty = difficulty_from(dim, levels, "0/1");
    task.nonce_budget = 1;
    task.strategy = hdcoin::mining::NonceStrategy::sequential_from(0);
    const double seconds =
        hdcoin::mining::measure_nonce_time(task, task_data.train, task_data.test, time_samples);
    times.emplace_back(dim, seconds);
    std::printf("%10u %14.4f\n", dim, seconds);
  }

  std::printf("\nmax accuracy vs nonce budget (dimension %u, sequential from 0)\n",
              curve_dimension);
  std::printf("%8s %12s %10s\n", "budget", "accuracy", "percent");
  std::vector<std::pair<std::uint64_t, hdcoin::hdc::ExactAccuracy>> curve;
  for (const std::uint64_t budget : budgets) {
    hdcoin::mining::MiningTask task;
    task.dataset_hash = task_data.task_hash;
    task.difficulty = difficulty_from(curve_dimension, levels, "0/1");
    task.nonce_budget = budget;
    task.strategy = hdcoin::mining::NonceStrategy::sequential_from(0);
    const auto result = hdcoin::mining::mine(task, task_data.train, task_data.test);
    curve.emplace_back(budget, result.accuracy);
    std::printf("%8" PRIu64 " %9u/%-4u %9.4f%%\n", budget, result.accuracy.correct,
                result.accuracy.total, result.accuracy.percent());
  }

  if (!csv_prefix.empty()) {
    {
      std::ofstream out(csv_prefix + "-nonce-time.csv", std::ios::trunc);
      out << "dimension,nonce_time_s\n";
      for (const auto& [dim, seconds] : times) out << dim << "," << seconds << "\n";
    }
    {
      std::ofstream out(csv_prefix + "-accuracy-curve.csv", std::ios::trunc);
      out << "budget,correct,total\n";
      for (const auto& [budget, acc] : curve) {
        out << budget << "," << acc.correct << "," << acc.total << "\n";
      }
    }
    std::cout << "\nwrote " << csv_prefix << "-nonce-time.csv and " << csv_prefix
              << "-accuracy-curve.csv\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hdcoin: proof-of-useful-work mining over hyperdimensional classifiers"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // dataset -----------------------------------------------------------
  auto* dataset = app.add_subcommand("dataset", "dataset utilities");
  dataset->require_subcommand(1);

  auto hash_opts = std::make_shared<std::pair<std::string, bool>>();
  auto* ds_hash = dataset->add_subcommand("hash", "print the canonical dataset hash");
  ds_hash->add_option("csv", hash_opts->first, "CSV file")->required();
  ds_hash->add_flag("--header", hash_opts->second, "CSV carries a header row");
  ds_hash->callback([&, hash_opts] {
    exit_code = cmd_dataset_hash(hash_opts->first, hash_opts->second);
  });

  struct SplitArgs {
    std::string csv, fraction = "7/10", train_out, test_out;
    bool header = false;
    std::uint64_t seed = 1;
  };
  auto split_args = std::make_shared<SplitArgs>();
  auto* ds_split = dataset->add_subcommand("split", "deterministic stratified split");
  ds_split->add_option("csv", split_args->csv, "CSV file")->required();
  ds_split->add_flag("--header", split_args->header, "CSV carries a header row");
  ds_split->add_option("--fraction", split_args->fraction, "train fraction (p/q or decimal)");
  ds_split->add_option("--seed", split_args->seed, "split seed");
  ds_split->add_option("--train-out", split_args->train_out, "output train CSV")->required();
  ds_split->add_option("--test-out", split_args->test_out, "output test CSV")->required();
  ds_split->callback([&, split_args] {
    exit_code = cmd_dataset_split(split_args->csv, split_args->header, split_args->fraction,
                                  split_args->seed, split_args->train_out, split_args->test_out);
  });

  auto gen_opts = std::make_shared<DatasetOpts>();
  auto gen_out = std::make_shared<std::string>();
  auto* ds_gen = dataset->add_subcommand("gen-synthetic", "write a seeded Gaussian-blob CSV");
  ds_gen->add_option("--classes", gen_opts->classes, "class count");
  ds_gen->add_option("--features", gen_opts->features, "feature count");
  ds_gen->add_option("--samples-per-class", gen_opts->samples_per_class, "samples per class");
  ds_gen->add_option("--separation", gen_opts->separation, "blob separation");
  ds_gen->add_option("--seed", gen_opts->synthetic_seed, "generator seed");
  ds_gen->add_option("--out", *gen_out, "output CSV path")->required();
  ds_gen->callback([&, gen_opts, gen_out] { exit_code = cmd_dataset_gen(*gen_opts, *gen_out); });

  // mine --------------------------------------------------------------
  struct MineArgs {
    DatasetOpts data;
    std::uint32_t dimension = 3000;
    std::uint32_t levels = 10;
    std::uint64_t budget = 8;
    std::string strategy = "sequential";
    std::uint32_t start = 0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double time_window_s = 0.0;
  };
  auto mine_args = std::make_shared<MineArgs>();
  auto* mine_cmd = app.add_subcommand("mine", "single-miner nonce search");
  add_dataset_opts(mine_cmd, mine_args->data);
  mine_cmd->add_option("--dimension", mine_args->dimension, "hypervector dimension");
  mine_cmd->add_option("--levels", mine_args->levels, "quantization levels");
  mine_cmd->add_option("--budget", mine_args->budget, "nonce trials");
  mine_cmd->add_option("--strategy", mine_args->strategy, "sequential or random")
      ->check(CLI::IsMember({"sequential", "random"}));
  mine_cmd->add_option("--start", mine_args->start, "first nonce (sequential)");
  mine_cmd->add_option("--seed", mine_args->seed, "nonce stream seed (random)");
  mine_cmd->add_option("--threads", mine_args->threads, "parallel trial workers");
  mine_cmd->add_option("--time-window-s", mine_args->time_window_s,
                       "mine for this many wall seconds instead of a trial budget "
                       "(non-reproducible realism mode)");
  mine_cmd->callback([&, mine_args] {
    exit_code = cmd_mine(mine_args->data, mine_args->dimension, mine_args->levels,
                         mine_args->budget, mine_args->strategy, mine_args->start,
                         mine_args->seed, mine_args->threads, mine_args->time_window_s);
  });

  // verify -------------------------------------------------------------
  struct VerifyArgs {
    DatasetOpts data;
    std::uint32_t dimension = 3000;
    std::uint32_t levels = 10;
    std::string threshold = "0/1";
    std::uint32_t nonce = 0;
    std::uint32_t correct = 0;
    std::uint32_t total = 0;
  };
  auto verify_args = std::make_shared<VerifyArgs>();
  auto* verify_cmd = app.add_subcommand("verify", "recompute and check a mining claim");
  add_dataset_opts(verify_cmd, verify_args->data);
  verify_cmd->add_option("--dimension", verify_args->dimension, "hypervector dimension");
  verify_cmd->add_option("--levels", verify_args->levels, "quantization levels");
  verify_cmd->add_option("--threshold", verify_args->threshold, "accuracy threshold (p/q)");
  verify_cmd->add_option("--nonce", verify_args->nonce, "claimed nonce")->required();
  verify_cmd->add_option("--correct", verify_args->correct, "claimed correct count")->required();
  verify_cmd->add_option("--total", verify_args->total, "claimed total count")->required();
  verify_cmd->callback([&, verify_args] {
    exit_code = cmd_verify(verify_args->data, verify_args->dimension, verify_args->levels,
                           verify_args->threshold, verify_args->nonce, verify_args->correct,
                           verify_args->total);
  });

  // simulate ------------------------------------------------------------
  struct SimArgs {
    std::string config;
    std::string chain_out;
    std::string log_out;
    std::uint64_t rounds = 0;
  };
  auto sim_args = std::make_shared<SimArgs>();
  auto* sim_cmd = app.add_subcommand("simulate", "run a multi-miner simulation");
  sim_cmd->add_option("--config", sim_args->config, "run config JSON")->required();
  sim_cmd->add_option("--chain-out", sim_args->chain_out, "chain file (JSON lines)");
  sim_cmd->add_option("--log-out", sim_args->log_out, "round log (TSV)");
  sim_cmd->add_option("--rounds", sim_args->rounds, "override configured round count");
  sim_cmd->callback([&, sim_args] {
    exit_code =
        cmd_simulate(sim_args->config, sim_args->chain_out, sim_args->log_out, sim_args->rounds);
  });

  // verify-chain ---------------------------------------------------------
  auto vc_args = std::make_shared<std::pair<std::string, std::string>>();
  auto* vc_cmd = app.add_subcommand("verify-chain", "revalidate a chain file from genesis");
  vc_cmd->add_option("--config", vc_args->first, "run config JSON")->required();
  vc_cmd->add_option("--chain", vc_args->second, "chain file")->required();
  vc_cmd->callback([&, vc_args] {
    exit_code = cmd_verify_chain(vc_args->first, vc_args->second);
  });

  // benchmark -------------------------------------------------------------
  struct BenchArgs {
    DatasetOpts data;
    std::vector<std::uint32_t> dimensions;
    std::uint32_t levels = 10;
    std::size_t time_samples = 3;
    std::vector<std::uint64_t> budgets;
    std::uint32_t curve_dimension = 0;
    std::string csv_prefix;
  };
  auto bench_args = std::make_shared<BenchArgs>();
  auto* bench_cmd = app.add_subcommand("benchmark", "nonce-time and accuracy-curve reports");
  add_dataset_opts(bench_cmd, bench_args->data);
  bench_cmd->add_option("--dimensions", bench_args->dimensions, "dimension ladder")
      ->delimiter(',');
  bench_cmd->add_option("--levels", bench_args->levels, "quantization levels");
  bench_cmd->add_option("--time-samples", bench_args->time_samples, "trials per timing median");
  bench_cmd->add_option("--budgets", bench_args->budgets, "nonce budgets for the curve")
      ->delimiter(',');
  bench_cmd->add_option("--curve-dimension", bench_args->curve_dimension,
                        "dimension for the accuracy curve");
  bench_cmd->add_option("--csv-prefix", bench_args->csv_prefix, "also write CSVs with this prefix");
  bench_cmd->callback([&, bench_args] {
    exit_code = cmd_benchmark(bench_args->data, bench_args->dimensions, bench_args->levels,
                              bench_args->time_samples, bench_args->budgets,
                              bench_args->curve_dimension, bench_args->csv_prefix);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const hdcoin::sim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hdcoin::data::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return exit_code;
}
