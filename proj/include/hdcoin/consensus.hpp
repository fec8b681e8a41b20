#pragma once

// Simulated multi-miner network. Agents are deterministic in-process actors:
// each round every agent mines with the current difficulty, the best claim
// wins (ties: earlier logical submission time, then smaller nonce, then
// miner id), every agent re-runs the winning nonce, and the block is sealed
// only on unanimous verification. If nobody clears the threshold, it decays
// one percentage point per repeated batch and the round continues with
// fresh budgets. "Submission time" is the number of trials an agent had
// consumed when its best result appeared, so outcomes are reproducible.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hdcoin/blockchain.hpp"
#include "hdcoin/dataset.hpp"
#include "hdcoin/miner.hpp"

namespace hdcoin::sim {

struct MinerAgent {
  std::string miner_id;
  mining::NonceStrategy strategy;
  std::uint64_t budget_per_round = 8;
  // Adversarial knob: inflate the reported correct count by this much.
  // Honest agents leave it zero; verification catches anything else.
  std::uint32_t byzantine_inflate = 0;
};

struct VerifyVerdict {
  bool accepted = false;
  std::string reason;  // "pouw_mismatch" or "below_threshold" when rejected
};

// Peer verification: recompute the trial and demand exact integer equality,
// then check the threshold.
inline VerifyVerdict verify_claim(const mining::MiningResult& result,
                                  const chain::Difficulty& difficulty,
                                  const data::Dataset& train, const data::Dataset& test) {
  const hdc::ExactAccuracy recomputed =
      mining::nonce_trial(result.nonce, train, test, difficulty);
  if (!(recomputed == result.accuracy)) return {false, "pouw_mismatch"};
  if (result.accuracy.as_rational() < difficulty.accuracy_threshold) {
    return {false, "below_threshold"};
  }
  return {true, ""};
}

struct RoundOutcome {
  std::string winner;
  mining::MiningResult winning_result;
  std::vector<std::pair<std::string, mining::MiningResult>> all_results;
  std::vector<std::pair<std::string, bool>> verifications;  // verdicts on the sealed claim
  std::vector<std::pair<std::string, std::string>> rejected;  // candidate -> reason
  chain::Block sealed_block;
  std::uint64_t repeats = 0;       // extra mining batches before someone sealed
  std::uint64_t duration_units = 0;
  double wall_seconds = 0.0;       // measurement only, never in consensus state
};

struct TxGenConfig {
  std::uint64_t seed = 1;
  std::uint64_t txs_per_round = 3;
  std::uint64_t accounts = 8;
};

class Simulator {
 public:
  Simulator(chain::ProtocolParams params, data::Dataset train, data::Dataset test,
            std::vector<MinerAgent> agents, TxGenConfig tx_config = {}, unsigned threads = 1)
      : params_(std::move(params)),
        train_(std::move(train)),
        test_(std::move(test)),
        agents_(std::move(agents)),
        tx_rng_(tx_config.seed),
        tx_config_(tx_config),
        threads_(threads) {
    if (agents_.empty()) throw std::invalid_argument("Simulator: need at least one agent");
    std::uint64_t max_budget = 0;
    for (const MinerAgent& a : agents_) {
      if (a.budget_per_round < 1) {
        throw std::invalid_argument("Simulator: agent budget must be >= 1");
      }
      max_budget = std::max(max_budget, a.budget_per_round);
      for (const MinerAgent& b : agents_) {
        if (&a != &b && a.miner_id == b.miner_id) {
          throw std::invalid_argument("Simulator: duplicate miner id '" + a.miner_id + "'");
        }
      }
    }
    params_.round_trials_per_batch = max_budget;
    blocks_.push_back(chain::make_genesis(params_));
  }

  [[nodiscard]] const std::vector<chain::Block>& blocks() const { return blocks_; }
  [[nodiscard]] const chain::ProtocolParams& params() const { return params_; }
  [[nodiscard]] const data::Dataset& train_set() const { return train_; }
  [[nodiscard]] const data::Dataset& test_set() const { return test_; }
  chain::Mempool& mempool() { return mempool_; }

  RoundOutcome run_round() {
    const auto wall_started = std::chrono::steady_clock::now();
    generate_transactions();

    std::vector<chain::BlockHeader> headers;
    headers.reserve(blocks_.size());
    for (const chain::Block& b : blocks_) headers.push_back(b.header);
    const chain::Difficulty base = chain::next_difficulty(headers, params_);
    const std::uint64_t batch_cost =
        chain::round_batch_cost(params_, base.dimension, train_, test_);

    RoundOutcome outcome;
    std::map<std::string, mining::MiningResult> best_by_agent;
    std::uint64_t repeats = 0;
    std::uint64_t zero_threshold_batches = 0;
    std::optional<std::size_t> winner_index;
    chain::Difficulty effective = base;

    while (!winner_index) {
      effective.accuracy_threshold =
          chain::decayed_threshold(base.accuracy_threshold, repeats);
      mine_batch(effective, repeats, best_by_agent);

      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i < agents_.size(); ++i) {
        const auto it = best_by_agent.find(agents_[i].miner_id);
        if (it != best_by_agent.end() &&
            it->second.accuracy.as_rational() >= effective.accuracy_threshold) {
          candidates.push_back(i);
        }
      }
      std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return submission_order(agents_[a].miner_id, best_by_agent.at(agents_[a].miner_id),
                                agents_[b].miner_id, best_by_agent.at(agents_[b].miner_id));
      });

      for (const std::size_t i : candidates) {
        const MinerAgent& candidate = agents_[i];
        const mining::MiningResult& claim = best_by_agent.at(candidate.miner_id);
        std::vector<std::pair<std::string, bool>> verdicts;
        std::string reject_reason;
        bool unanimous = true;
        for (const MinerAgent& verifier : agents_) {
          const VerifyVerdict v = verify_claim(claim, effective, train_, test_);
          verdicts.emplace_back(verifier.miner_id, v.accepted);
          if (!v.accepted) {
            unanimous = false;
            reject_reason = v.reason;
          }
        }
        if (unanimous) {
          winner_index = i;
          outcome.verifications = std::move(verdicts);
          break;
        }
        outcome.rejected.emplace_back(candidate.miner_id, reject_reason);
      }
      if (winner_index) break;

      if (effective.accuracy_threshold == Rational(0, 1)) {
        if (++zero_threshold_batches > 32) {
          throw std::runtime_error("run_round: no candidate survives verification");
        }
      }
      ++repeats;
    }

    const MinerAgent& winner = agents_[*winner_index];
    const mining::MiningResult& winning = best_by_agent.at(winner.miner_id);
    outcome.winner = winner.miner_id;
    outcome.winning_result = winning;
    outcome.repeats = repeats;
    outcome.duration_units = (repeats + 1) * batch_cost;
    for (const MinerAgent& a : agents_) {
      outcome.all_results.emplace_back(a.miner_id, best_by_agent.at(a.miner_id));
    }

    outcome.sealed_block = seal(winner, winning, effective, outcome.duration_units);
    blocks_.push_back(outcome.sealed_block);

    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - wall_started;
    outcome.wall_seconds = wall.count();
    return outcome;
  }

  std::vector<RoundOutcome> run(std::uint64_t rounds) {
    std::vector<RoundOutcome> outcomes;
    outcomes.reserve(rounds);
    for (std::uint64_t r = 0; r < rounds; ++r) outcomes.push_back(run_round());
    return outcomes;
  }

  [[nodiscard]] std::vector<chain::Violation> validate() const {
    chain::ValidationContext ctx{&train_, &test_, params_};
    return chain::validate_chain(blocks_, ctx);
  }

 private:
  // Winner order: higher accuracy, earlier submission, smaller nonce,
  // lexicographically smaller miner id.
  static bool submission_order(const std::string& id_a, const mining::MiningResult& a,
                               const std::string& id_b, const mining::MiningResult& b) {
    const int cmp = hdc::compare_accuracy(a.accuracy, b.accuracy);
    if (cmp != 0) return cmp > 0;
    if (a.found_at_trial != b.found_at_trial) return a.found_at_trial < b.found_at_trial;
    if (a.nonce != b.nonce) return a.nonce < b.nonce;
    return id_a < id_b;
  }

  void mine_batch(const chain::Difficulty& difficulty, std::uint64_t repeats,
                  std::map<std::string, mining::MiningResult>& best_by_agent) {
    for (MinerAgent& agent : agents_) {
      mining::MiningTask task;
      task.dataset_hash = params_.dataset_hash;
      task.difficulty = difficulty;
      task.nonce_budget = agent.budget_per_round;
      task.strategy = agent.strategy;
      mining::MiningResult result = mine(task, train_, test_, threads_);
      agent.strategy = agent.strategy.advanced(agent.budget_per_round);
      result.found_at_trial += repeats * agent.budget_per_round;
      if (agent.byzantine_inflate > 0) {
        result.accuracy.correct = std::min(result.accuracy.total,
                                           result.accuracy.correct + agent.byzantine_inflate);
      }
      const auto it = best_by_agent.find(agent.miner_id);
      if (it == best_by_agent.end()) {
        best_by_agent.emplace(agent.miner_id, result);
      } else if (miner_better(result, it->second)) {
        result.trials_used += it->second.trials_used;  // cumulative within the round
        it->second = result;
      } else {
        it->second.trials_used += result.trials_used;
      }
    }
  }

  // An agent's own running best: higher accuracy, then smaller nonce, then
  // the earlier find.
  static bool miner_better(const mining::MiningResult& a, const mining::MiningResult& b) {
    const int cmp = hdc::compare_accuracy(a.accuracy, b.accuracy);
    if (cmp != 0) return cmp > 0;
    if (a.nonce != b.nonce) return a.nonce < b.nonce;
    return a.found_at_trial < b.found_at_trial;
  }

  void generate_transactions() {
    const std::uint64_t now = blocks_.back().header.timestamp;
    for (std::uint64_t i = 0; i < tx_config_.txs_per_round; ++i) {
      const std::uint64_t from = tx_rng_.next_below(tx_config_.accounts);
      const std::uint64_t to =
          (from + 1 + tx_rng_.next_below(tx_config_.accounts - 1)) % tx_config_.accounts;
      const std::uint64_t amount = 1 + tx_rng_.next_below(1000);
      const chain::Transaction tx = chain::Transaction::make(
          "acct-" + std::to_string(from), "acct-" + std::to_string(to), amount, now);
      mempool_.submit(tx);  // duplicate ids are silently skipped
    }
  }

  chain::Block seal(const MinerAgent& winner, const mining::MiningResult& winning,
                    const chain::Difficulty& difficulty, std::uint64_t duration_units) {
    const chain::BlockHeader& tip = blocks_.back().header;
    chain::Block block;
    block.header.height = tip.height + 1;
    block.header.prev_hash = chain::hash_header(tip);
    block.header.dataset_hash = params_.dataset_hash;
    block.header.nonce = winning.nonce;
    block.header.accuracy_claim = winning.accuracy;
    block.header.difficulty = difficulty;
    block.header.timestamp = tip.timestamp + duration_units;

    // Coinbase reward first, then confirmed transactions from the pool.
    block.transactions.push_back(chain::Transaction::make(
        "coinbase", winner.miner_id, params_.reward, block.header.timestamp));
    const auto pending = mempool_.take(params_.max_block_txs - 1);
    block.transactions.insert(block.transactions.end(), pending.begin(), pending.end());
    block.header.merkle_root = chain::merkle_root(block.transactions);
    return block;
  }

  chain::ProtocolParams params_;
  data::Dataset train_;
  data::Dataset test_;
  std::vector<MinerAgent> agents_;
  chain::Mempool mempool_;
  SplitMix64 tx_rng_;
  TxGenConfig tx_config_;
  unsigned threads_ = 1;
  std::vector<chain::Block> blocks_;
};

// ---- Round log ----------------------------------------------------------
// Columnar TSV, one record per (round, miner). Accuracy stays an exact
// fraction; wall seconds are informational only.

struct RoundLogRow {
  std::uint64_t round = 0;
  std::string miner;
  hdc::ExactAccuracy best;
  std::uint32_t nonce = 0;
  bool won = false;
  std::uint64_t trials = 0;
  double trial_wall_seconds = 0.0;  // mean per trial, measurement only
  std::uint32_t dimension = 0;
  Rational threshold;
  std::uint64_t duration_units = 0;
  double wall_seconds = 0.0;
};

inline std::vector<RoundLogRow> round_log_rows(std::span<const RoundOutcome> outcomes) {
  std::vector<RoundLogRow> rows;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const RoundOutcome& o = outcomes[r];
    for (const auto& [miner, result] : o.all_results) {
      RoundLogRow row;
      row.round = r;
      row.miner = miner;
      row.best = result.accuracy;
      row.nonce = result.nonce;
      row.won = miner == o.winner;
      row.trials = result.trials_used;
      row.trial_wall_seconds = result.nonce_time_seconds;
      row.dimension = o.sealed_block.header.difficulty.dimension;
      row.threshold = o.sealed_block.header.difficulty.accuracy_threshold;
      row.duration_units = o.duration_units;
      row.wall_seconds = o.wall_seconds;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline void write_round_log(std::span<const RoundOutcome> outcomes,
                            const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write round log '" + path.string() + "'");
  out << "round\tminer\tcorrect\ttotal\tnonce\twon\ttrials\ttrial_wall_s\tdimension\t"
         "threshold\tduration_units\tround_wall_s\n";
  for (const RoundLogRow& row : round_log_rows(outcomes)) {
    out << row.round << '\t' << row.miner << '\t' << row.best.correct << '\t' << row.best.total
        << '\t' << row.nonce << '\t' << (row.won ? 1 : 0) << '\t' << row.trials << '\t'
        << row.trial_wall_seconds << '\t' << row.dimension << '\t' << row.threshold.to_string()
        << '\t' << row.duration_units << '\t' << row.wall_seconds << '\n';
  }
}

}  // namespace hdcoin::sim
