#pragma once

// The proof-of-useful-work engine. One nonce trial is the full pipeline
// gen_item_memory -> encode -> train -> evaluate; mining iterates trials
// over a nonce strategy and keeps the best result under a total order
// (higher accuracy, then smaller nonce, then earlier trial position), so a
// parallel reduction gives bit-identical results to a sequential scan.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hdcoin/dataset.hpp"
#include "hdcoin/difficulty.hpp"
#include "hdcoin/encoding.hpp"
#include "hdcoin/model.hpp"

namespace hdcoin::mining {

struct NonceStrategy {
  enum class Kind { sequential, random };

  Kind kind = Kind::sequential;
  std::uint32_t start = 0;   // sequential: next nonce to try
  std::uint64_t seed = 0;    // random: splitmix64 state

  static NonceStrategy sequential_from(std::uint32_t start) {
    return NonceStrategy{Kind::sequential, start, 0};
  }
  static NonceStrategy random_seeded(std::uint64_t seed) {
    return NonceStrategy{Kind::random, 0, seed};
  }

  // The next `count` nonces of this strategy, without mutating it.
  [[nodiscard]] std::vector<std::uint32_t> peek(std::uint64_t count) const {
    std::vector<std::uint32_t> nonces;
    nonces.reserve(count);
    if (kind == Kind::sequential) {
      std::uint32_t n = start;
      for (std::uint64_t i = 0; i < count; ++i) nonces.push_back(n++);
    } else {
      SplitMix64 rng(seed);
      for (std::uint64_t i = 0; i < count; ++i) {
        nonces.push_back(static_cast<std::uint32_t>(rng.next()));
      }
    }
    return nonces;
  }

  // The strategy state after consuming `count` nonces.
  [[nodiscard]] NonceStrategy advanced(std::uint64_t count) const {
    NonceStrategy next = *this;
    if (kind == Kind::sequential) {
      next.start = static_cast<std::uint32_t>(start + count);
    } else {
      SplitMix64 rng(seed);
      for (std::uint64_t i = 0; i < count; ++i) rng.next();
      next.seed = rng.state();
    }
    return next;
  }
};

struct MiningTask {
  Digest32 dataset_hash{};
  chain::Difficulty difficulty;
  std::uint64_t nonce_budget = 1;
  NonceStrategy strategy;
};

struct MiningResult {
  std::uint32_t nonce = 0;
  hdc::ExactAccuracy accuracy;
  double nonce_time_seconds = 0.0;  // mean wall seconds per trial; measurement only
  std::uint64_t trials_used = 0;
  std::uint64_t found_at_trial = 0;  // 1-based position of the winning trial
};

// Deterministic cost of one nonce trial in work units (elementary encode
// operations). The simulated clock and the difficulty controller run on
// these units instead of wall time, so chains are byte-reproducible.
inline std::uint64_t trial_cost_units(std::uint32_t dimension, const data::Dataset& train,
                                      const data::Dataset& test) {
  const std::uint64_t rows = train.num_samples + test.num_samples;
  const std::uint64_t m = std::max<std::uint64_t>(1, train.num_features);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(dimension) * rows * m);
}

// Quantization bounds come from the training split only.
inline hdc::EncodingConfig encoding_config_for(const chain::Difficulty& difficulty,
                                               const data::Dataset& train) {
  hdc::EncodingConfig config;
  config.dim = difficulty.dimension;
  config.num_levels = difficulty.num_levels;
  config.feature_bounds.resize(train.num_features);
  for (std::size_t j = 0; j < train.num_features; ++j) {
    double lo = train.features[j];
    double hi = train.features[j];
    for (std::size_t i = 1; i < train.num_samples; ++i) {
      const double v = train.features[i * train.num_features + j];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    config.feature_bounds[j] = {lo, hi};
  }
  config.validate();
  return config;
}

namespace detail {

inline void check_task_datasets(const data::Dataset& train, const data::Dataset& test) {
  train.validate();
  test.validate();
  if (train.num_features != test.num_features) {
    throw std::invalid_argument("nonce_trial: train/test feature counts differ");
  }
  if (train.num_classes != test.num_classes) {
    throw std::invalid_argument("nonce_trial: train/test class counts differ");
  }
}

inline std::vector<hdc::IntHV> encode_all(const data::Dataset& ds, const hdc::ItemMemory& im,
                                          const hdc::EncodingConfig& config) {
  std::vector<hdc::IntHV> encoded;
  encoded.reserve(ds.num_samples);
  for (std::size_t i = 0; i < ds.num_samples; ++i) {
    encoded.push_back(hdc::encode(ds.row(i), im, config));
  }
  return encoded;
}

}  // namespace detail

inline hdc::ExactAccuracy nonce_trial(std::uint32_t nonce, const data::Dataset& train,
                                      const data::Dataset& test,
                                      const chain::Difficulty& difficulty) {
  detail::check_task_datasets(train, test);
  const hdc::EncodingConfig config = encoding_config_for(difficulty, train);
  const hdc::ItemMemory im = hdc::gen_item_memory(nonce, config, train.num_features);
  const std::vector<hdc::IntHV> train_hvs = detail::encode_all(train, im, config);
  const hdc::AssociativeMemory am = hdc::train(train_hvs, train.labels, train.num_classes);
  const std::vector<hdc::IntHV> test_hvs = detail::encode_all(test, im, config);
  return hdc::evaluate(am, test_hvs, test.labels);
}

namespace detail {

struct Candidate {
  std::uint32_t nonce = 0;
  hdc::ExactAccuracy accuracy;
  std::uint64_t trial_index = 0;  // 1-based position in the strategy sequence
};

// Total order: higher accuracy, then smaller nonce, then earlier trial.
inline bool better(const Candidate& a, const Candidate& b) {
  const int cmp = hdc::compare_accuracy(a.accuracy, b.accuracy);
  if (cmp != 0) return cmp > 0;
  if (a.nonce != b.nonce) return a.nonce < b.nonce;
  return a.trial_index < b.trial_index;
}

}  // namespace detail

inline MiningResult mine(const MiningTask& task, const data::Dataset& train,
                         const data::Dataset& test, unsigned threads = 1) {
  if (task.nonce_budget < 1) throw std::invalid_argument("mine: nonce_budget must be >= 1");
  detail::check_task_datasets(train, test);
  const std::vector<std::uint32_t> nonces = task.strategy.peek(task.nonce_budget);

  const auto run_range = [&](std::size_t begin, std::size_t end,
                             std::optional<detail::Candidate>& best) {
    for (std::size_t i = begin; i < end; ++i) {
      detail::Candidate cand{nonces[i], nonce_trial(nonces[i], train, test, task.difficulty),
                             i + 1};
      if (!best || detail::better(cand, *best)) best = cand;
    }
  };

  const auto started = std::chrono::steady_clock::now();
  std::optional<detail::Candidate> best;
  const unsigned worker_count =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(nonces.size())));
  if (worker_count == 1) {
    run_range(0, nonces.size(), best);
  } else {
    std::vector<std::optional<detail::Candidate>> partial(worker_count);
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (unsigned t = 0; t < worker_count; ++t) {
      const std::size_t begin = nonces.size() * t / worker_count;
      const std::size_t end = nonces.size() * (t + 1) / worker_count;
      workers.emplace_back([&, begin, end, t] { run_range(begin, end, partial[t]); });
    }
    for (auto& w : workers) w.join();
    for (const auto& cand : partial) {
      if (cand && (!best || detail::better(*cand, *best))) best = cand;
    }
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

  MiningResult result;
  result.nonce = best->nonce;
  result.accuracy = best->accuracy;
  result.trials_used = nonces.size();
  result.found_at_trial = best->trial_index;
  result.nonce_time_seconds = elapsed.count() / static_cast<double>(nonces.size());
  return result;
}

// Realism mode: keep trying nonces until the wall clock passes `seconds`
// (always at least one trial). Results depend on machine speed, so this
// mode never feeds consensus state; budgeted mine() is canonical.
inline MiningResult mine_time_window(const MiningTask& task, const data::Dataset& train,
                                     const data::Dataset& test, double seconds) {
  if (seconds <= 0.0) throw std::invalid_argument("mine_time_window: seconds must be positive");
  detail::check_task_datasets(train, test);
  const auto started = std::chrono::steady_clock::now();
  NonceStrategy strategy = task.strategy;
  std::optional<detail::Candidate> best;
  std::uint64_t trials = 0;
  do {
    const std::uint32_t nonce = strategy.peek(1)[0];
    strategy = strategy.advanced(1);
    ++trials;
    detail::Candidate cand{nonce, nonce_trial(nonce, train, test, task.difficulty), trials};
    if (!best || detail::better(cand, *best)) best = cand;
  } while (std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() <
           seconds);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;

  MiningResult result;
  result.nonce = best->nonce;
  result.accuracy = best->accuracy;
  result.trials_used = trials;
  result.found_at_trial = best->trial_index;
  result.nonce_time_seconds = elapsed.count() / static_cast<double>(trials);
  return result;
}

// Median wall-clock seconds of `samples` single-nonce trials (lower median
// for even counts). Measurement only; never feeds consensus state.
inline double measure_nonce_time(const MiningTask& task, const data::Dataset& train,
                                 const data::Dataset& test, std::size_t samples) {
  if (samples < 1) throw std::invalid_argument("measure_nonce_time: samples must be >= 1");
  const std::vector<std::uint32_t> nonces = task.strategy.peek(samples);
  std::vector<double> times;
  times.reserve(samples);
  for (const std::uint32_t nonce : nonces) {
    const auto started = std::chrono::steady_clock::now();
    (void)nonce_trial(nonce, train, test, task.difficulty);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    times.push_back(elapsed.count());
  }
  std::sort(times.begin(), times.end());
  return times[(times.size() - 1) / 2];
}

}  // namespace hdcoin::mining
