#pragma once

// The ledger: transactions, Merkle tree, block headers binding the winning
// nonce and difficulty, the adaptive difficulty controller, full-chain
// validation and JSON-lines persistence.
//
// Canonical header layout (140 bytes, all big-endian):
//   height u64 | prev_hash 32B | merkle_root 32B | dataset_hash 32B |
//   nonce u32 | correct u32 | total u32 | dimension u32 |
//   threshold_num u32 | threshold_den u32 | num_levels u32 | timestamp u64
//
// Canonical transaction layout:
//   utf8(from) 0x00 | utf8(to) 0x00 | amount u64 | timestamp u64
//
// Block timestamps are *simulated work units* (deterministic trial cost, see
// mining::trial_cost_units), not wall time: the difficulty controller reads
// round durations from timestamp deltas, so difficulty is recomputable from
// chain data alone and two runs with the same seeds produce identical bytes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hdcoin/bytes.hpp"
#include "hdcoin/dataset.hpp"
#include "hdcoin/difficulty.hpp"
#include "hdcoin/miner.hpp"
#include "hdcoin/model.hpp"
#include "hdcoin/rational.hpp"
#include "hdcoin/sha256.hpp"

namespace hdcoin::chain {

struct Transaction {
  Digest32 tx_id{};
  std::string from_account;
  std::string to_account;
  std::uint64_t amount = 0;  // smallest unit, must be positive
  std::uint64_t timestamp = 0;

  [[nodiscard]] ByteBuffer canonical_bytes() const {
    ByteBuffer buf;
    buf.append_cstr(from_account);
    buf.append_cstr(to_account);
    buf.append_u64_be(amount);
    buf.append_u64_be(timestamp);
    return buf;
  }

  [[nodiscard]] Digest32 compute_id() const { return sha256(canonical_bytes().view()); }

  static Transaction make(std::string from, std::string to, std::uint64_t amount,
                          std::uint64_t timestamp) {
    if (amount == 0) throw std::invalid_argument("Transaction: amount must be positive");
    Transaction tx;
    tx.from_account = std::move(from);
    tx.to_account = std::move(to);
    tx.amount = amount;
    tx.timestamp = timestamp;
    tx.tx_id = tx.compute_id();
    return tx;
  }
};

// Merkle root over tx ids. A single leaf is its own root; an odd node pairs
// with a duplicate of itself; the empty list hashes the empty byte string.
inline Digest32 merkle_root(std::span<const Transaction> txs) {
  if (txs.empty()) return sha256(std::string_view{});
  std::vector<Digest32> level;
  level.reserve(txs.size());
  for (const Transaction& tx : txs) level.push_back(tx.tx_id);
  while (level.size() > 1) {
    std::vector<Digest32> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      const Digest32& left = level[i];
      const Digest32& right = (i + 1 < level.size()) ? level[i + 1] : level[i];
      Sha256 h;
      h.update(left.data(), left.size());
      h.update(right.data(), right.size());
      next.push_back(h.finalize());
    }
    level = std::move(next);
  }
  return level.front();
}

struct BlockHeader {
  std::uint64_t height = 0;
  Digest32 prev_hash{};
  Digest32 merkle_root{};
  Digest32 dataset_hash{};
  std::uint32_t nonce = 0;
  hdc::ExactAccuracy accuracy_claim;
  Difficulty difficulty;
  std::uint64_t timestamp = 0;

  [[nodiscard]] ByteBuffer canonical_bytes() const {
    ByteBuffer buf;
    buf.append_u64_be(height);
    buf.append_bytes(prev_hash);
    buf.append_bytes(merkle_root);
    buf.append_bytes(dataset_hash);
    buf.append_u32_be(nonce);
    buf.append_u32_be(accuracy_claim.correct);
    buf.append_u32_be(accuracy_claim.total);
    buf.append_u32_be(difficulty.dimension);
    buf.append_u32_be(static_cast<std::uint32_t>(difficulty.accuracy_threshold.num));
    buf.append_u32_be(static_cast<std::uint32_t>(difficulty.accuracy_threshold.den));
    buf.append_u32_be(difficulty.num_levels);
    buf.append_u64_be(timestamp);
    return buf;
  }
};

inline Digest32 hash_header(const BlockHeader& header) {
  return sha256(header.canonical_bytes().view());
}

struct Block {
  BlockHeader header;
  std::vector<Transaction> transactions;
};

// Everything a node must agree on before the first block is mined.
struct ProtocolParams {
  Digest32 dataset_hash{};
  Difficulty initial;
  std::vector<std::uint32_t> ladder = default_ladder();
  std::uint32_t window = 10;            // W: blocks examined by the controller
  std::uint64_t t_low = 0;              // step difficulty up when median round < t_low
  std::uint64_t t_high = UINT64_MAX;    // step down when median round > t_high
  Rational margin{2, 100};              // threshold = best claim - margin
  Rational baseline_floor{0, 1};        // majority-class accuracy of the test split
  std::uint64_t max_block_txs = 16;
  std::uint64_t reward = 50;
  std::uint64_t genesis_timestamp = 0;
  std::uint64_t round_trials_per_batch = 1;  // max agent budget; fixes the round cost model
};

inline Block make_genesis(const ProtocolParams& params) {
  Block genesis;
  genesis.header.height = 0;
  genesis.header.prev_hash = Digest32{};
  genesis.header.merkle_root = merkle_root({});
  genesis.header.dataset_hash = params.dataset_hash;
  genesis.header.nonce = 0;
  genesis.header.accuracy_claim = {0, 1};
  genesis.header.difficulty = params.initial;
  genesis.header.timestamp = params.genesis_timestamp;
  return genesis;
}

// Work-unit cost of one full mining batch (every agent spending its budget
// once) at the given dimension. Round duration is always a positive multiple
// of this, which is how validators recover the number of in-round repeats.
inline std::uint64_t round_batch_cost(const ProtocolParams& params, std::uint32_t dimension,
                                      const data::Dataset& train, const data::Dataset& test) {
  return params.round_trials_per_batch * mining::trial_cost_units(dimension, train, test);
}

// Difficulty for the next block given every header mined so far (genesis
// first). Dimension steps along the ladder by the median round duration;
// the threshold chases the best recent claim minus a margin, floored at the
// majority-class baseline.
inline Difficulty next_difficulty(std::span<const BlockHeader> headers,
                                  const ProtocolParams& params) {
  if (headers.empty()) throw std::invalid_argument("next_difficulty: missing genesis");
  if (headers.size() == 1) return params.initial;

  const BlockHeader& tip = headers.back();
  const std::size_t mined = headers.size() - 1;
  const std::size_t window = std::min<std::size_t>(params.window, mined);

  std::vector<std::uint64_t> durations;
  durations.reserve(window);
  Rational best_claim{0, 1};
  for (std::size_t i = headers.size() - window; i < headers.size(); ++i) {
    durations.push_back(headers[i].timestamp - headers[i - 1].timestamp);
    best_claim = rational_max(best_claim, headers[i].accuracy_claim.as_rational());
  }
  std::sort(durations.begin(), durations.end());
  const std::uint64_t median = durations[(durations.size() - 1) / 2];

  Difficulty next;
  next.num_levels = tip.difficulty.num_levels;
  std::size_t rung = ladder_index(params.ladder, tip.difficulty.dimension);
  if (median < params.t_low) {
    if (rung + 1 < params.ladder.size()) ++rung;
  } else if (median > params.t_high) {
    if (rung > 0) --rung;
  }
  next.dimension = params.ladder[rung];
  next.accuracy_threshold = rational_max(params.baseline_floor, best_claim - params.margin);
  return next;
}

// In-round threshold decay: one percentage point per repeated batch, never
// below zero (termination guarantee).
inline Rational decayed_threshold(const Rational& base, std::uint64_t repeats) {
  const Rational decayed = base - Rational(static_cast<std::int64_t>(repeats), 100);
  return rational_max(Rational(0, 1), decayed);
}

struct Violation {
  std::uint64_t height = 0;
  std::string code;
  std::string detail;
};

struct ValidationContext {
  const data::Dataset* train = nullptr;
  const data::Dataset* test = nullptr;
  ProtocolParams params;
};

namespace detail {

inline void check_transactions(const Block& block, std::uint64_t h,
                               std::vector<Violation>& out) {
  std::set<Digest32> seen;
  for (const Transaction& tx : block.transactions) {
    if (tx.amount == 0) out.push_back({h, "bad_amount", tx.from_account + "->" + tx.to_account});
    if (tx.compute_id() != tx.tx_id) {
      out.push_back({h, "txid_mismatch", hex_encode(tx.tx_id)});
    }
    if (!seen.insert(tx.tx_id).second) {
      out.push_back({h, "duplicate_txid", hex_encode(tx.tx_id)});
    }
  }
  if (merkle_root(block.transactions) != block.header.merkle_root) {
    out.push_back({h, "merkle_mismatch", ""});
  }
}

}  // namespace detail

inline std::vector<Violation> validate_genesis(const Block& genesis,
                                               const ValidationContext& ctx) {
  std::vector<Violation> out;
  const BlockHeader& h = genesis.header;
  if (h.height != 0) out.push_back({h.height, "height_mismatch", "genesis height must be 0"});
  if (h.prev_hash != Digest32{}) out.push_back({0, "prev_hash_mismatch", "genesis prev not zero"});
  if (h.timestamp != ctx.params.genesis_timestamp) {
    out.push_back({0, "timestamp_order", "genesis timestamp differs from protocol"});
  }
  if (h.difficulty != ctx.params.initial) out.push_back({0, "difficulty_mismatch", "genesis"});
  if (h.dataset_hash != ctx.params.dataset_hash) out.push_back({0, "dataset_mismatch", ""});
  if (h.nonce != 0 || !(h.accuracy_claim == hdc::ExactAccuracy{0, 1}) ||
      !genesis.transactions.empty()) {
    out.push_back({0, "genesis_form", "genesis must carry nonce 0, claim 0/1, no transactions"});
  }
  detail::check_transactions(genesis, 0, out);
  return out;
}

// Validates one mined block against its parent. `ancestors` are all headers
// genesis..parent, needed to recompute the protocol difficulty. Violations
// report the chain position (ancestors.size()), which stays meaningful even
// when the header's own height field was tampered with.
inline std::vector<Violation> validate_block(const Block& block,
                                             std::span<const BlockHeader> ancestors,
                                             const ValidationContext& ctx) {
  std::vector<Violation> out;
  const BlockHeader& h = block.header;
  const BlockHeader& parent = ancestors.back();
  const std::uint64_t pos = ancestors.size();

  if (h.height != parent.height + 1) {
    out.push_back({pos, "height_mismatch", "expected " + std::to_string(parent.height + 1) +
                                               ", got " + std::to_string(h.height)});
  }
  if (h.prev_hash != hash_header(parent)) {
    out.push_back({pos, "prev_hash_mismatch", ""});
  }
  if (h.timestamp <= parent.timestamp) {
    out.push_back({pos, "timestamp_order", "timestamp not after parent"});
  }

  // Protocol difficulty: dimension and levels from the controller; threshold
  // possibly decayed, with the repeat count recovered from the round
  // duration measured in work units.
  try {
    const Difficulty base = next_difficulty(ancestors, ctx.params);
    if (h.difficulty.dimension != base.dimension || h.difficulty.num_levels != base.num_levels) {
      out.push_back({pos, "difficulty_mismatch", "dimension/levels differ from controller"});
    } else if (h.timestamp > parent.timestamp) {
      const std::uint64_t duration = h.timestamp - parent.timestamp;
      const std::uint64_t batch =
          round_batch_cost(ctx.params, base.dimension, *ctx.train, *ctx.test);
      if (duration % batch != 0) {
        out.push_back({pos, "timestamp_inconsistent",
                       "round duration is not a whole number of mining batches"});
      } else {
        const std::uint64_t repeats = duration / batch - 1;
        if (h.difficulty.accuracy_threshold !=
            decayed_threshold(base.accuracy_threshold, repeats)) {
          out.push_back({pos, "difficulty_mismatch", "threshold differs from controller"});
        }
      }
    }
  } catch (const std::exception& e) {
    out.push_back({pos, "difficulty_mismatch", e.what()});
  }

  if (h.dataset_hash != ctx.params.dataset_hash) {
    out.push_back({pos, "dataset_mismatch", ""});
  }
  detail::check_transactions(block, pos, out);
  if (block.transactions.size() > ctx.params.max_block_txs) {
    out.push_back({pos, "block_too_large", std::to_string(block.transactions.size())});
  }

  // The proof of useful work: re-run the nonce and demand exact equality.
  try {
    const hdc::ExactAccuracy recomputed =
        mining::nonce_trial(h.nonce, *ctx.train, *ctx.test, h.difficulty);
    if (!(recomputed == h.accuracy_claim)) {
      out.push_back({pos, "pouw_mismatch",
                     "recomputed " + std::to_string(recomputed.correct) + "/" +
                         std::to_string(recomputed.total) + ", claimed " +
                         std::to_string(h.accuracy_claim.correct) + "/" +
                         std::to_string(h.accuracy_claim.total)});
    } else if (h.accuracy_claim.as_rational() < h.difficulty.accuracy_threshold) {
      out.push_back({pos, "below_threshold", ""});
    }
  } catch (const std::exception& e) {
    out.push_back({pos, "pouw_mismatch", std::string("trial cannot run: ") + e.what()});
  }
  return out;
}

// Full re-validation from genesis. Returns every violation found, in height
// order; an empty result means the chain is sound.
inline std::vector<Violation> validate_chain(std::span<const Block> blocks,
                                             const ValidationContext& ctx) {
  std::vector<Violation> out;
  if (blocks.empty()) {
    out.push_back({0, "empty_chain", "no genesis"});
    return out;
  }
  const auto genesis_violations = validate_genesis(blocks.front(), ctx);
  out.insert(out.end(), genesis_violations.begin(), genesis_violations.end());

  std::vector<BlockHeader> headers;
  headers.reserve(blocks.size());
  headers.push_back(blocks.front().header);
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const auto violations = validate_block(blocks[i], headers, ctx);
    out.insert(out.end(), violations.begin(), violations.end());
    headers.push_back(blocks[i].header);
  }
  return out;
}

// FIFO pool of unconfirmed transactions, ordered by timestamp then tx id.
class Mempool {
 public:
  bool submit(const Transaction& tx) {
    if (tx.amount == 0 || tx.compute_id() != tx.tx_id) {
      throw std::invalid_argument("Mempool: malformed transaction");
    }
    if (ids_.contains(tx.tx_id)) return false;
    ids_.insert(tx.tx_id);
    queue_.emplace(Key{tx.timestamp, tx.tx_id}, tx);
    return true;
  }

  std::vector<Transaction> take(std::size_t n) {
    std::vector<Transaction> out;
    while (out.size() < n && !queue_.empty()) {
      auto it = queue_.begin();
      out.push_back(it->second);
      ids_.erase(it->first.second);
      queue_.erase(it);
    }
    return out;
  }

  [[nodiscard]] std::size_t size() const { return queue_.size(); }

 private:
  using Key = std::pair<std::uint64_t, Digest32>;
  std::map<Key, Transaction> queue_;
  std::set<Digest32> ids_;
};

// ---- JSON-lines persistence -------------------------------------------
// One self-describing JSON object per block, hashes hex-encoded, rationals
// as "num/den" strings. nlohmann::json orders keys alphabetically, so the
// byte representation is deterministic.

inline nlohmann::json block_to_json(const Block& block) {
  const BlockHeader& h = block.header;
  nlohmann::json txs = nlohmann::json::array();
  for (const Transaction& tx : block.transactions) {
    txs.push_back({{"amount", tx.amount},
                   {"from", tx.from_account},
                   {"timestamp", tx.timestamp},
                   {"to", tx.to_account},
                   {"tx_id", hex_encode(tx.tx_id)}});
  }
  return {{"accuracy", {{"correct", h.accuracy_claim.correct}, {"total", h.accuracy_claim.total}}},
          {"dataset_hash", hex_encode(h.dataset_hash)},
          {"difficulty",
           {{"dimension", h.difficulty.dimension},
            {"num_levels", h.difficulty.num_levels},
            {"threshold", h.difficulty.accuracy_threshold.to_string()}}},
          {"height", h.height},
          {"merkle_root", hex_encode(h.merkle_root)},
          {"nonce", h.nonce},
          {"prev_hash", hex_encode(h.prev_hash)},
          {"timestamp", h.timestamp},
          {"transactions", txs}};
}

inline Block block_from_json(const nlohmann::json& j) {
  Block block;
  BlockHeader& h = block.header;
  h.height = j.at("height").get<std::uint64_t>();
  h.prev_hash = digest_from_hex(j.at("prev_hash").get<std::string>());
  h.merkle_root = digest_from_hex(j.at("merkle_root").get<std::string>());
  h.dataset_hash = digest_from_hex(j.at("dataset_hash").get<std::string>());
  h.nonce = j.at("nonce").get<std::uint32_t>();
  h.accuracy_claim.correct = j.at("accuracy").at("correct").get<std::uint32_t>();
  h.accuracy_claim.total = j.at("accuracy").at("total").get<std::uint32_t>();
  h.difficulty.dimension = j.at("difficulty").at("dimension").get<std::uint32_t>();
  h.difficulty.num_levels = j.at("difficulty").at("num_levels").get<std::uint32_t>();
  h.difficulty.accuracy_threshold =
      parse_rational(j.at("difficulty").at("threshold").get<std::string>());
  h.timestamp = j.at("timestamp").get<std::uint64_t>();
  for (const auto& tj : j.at("transactions")) {
    Transaction tx;
    tx.amount = tj.at("amount").get<std::uint64_t>();
    tx.from_account = tj.at("from").get<std::string>();
    tx.to_account = tj.at("to").get<std::string>();
    tx.timestamp = tj.at("timestamp").get<std::uint64_t>();
    tx.tx_id = digest_from_hex(tj.at("tx_id").get<std::string>());
    block.transactions.push_back(std::move(tx));
  }
  return block;
}

inline std::string chain_to_jsonl(std::span<const Block> blocks) {
  std::string out;
  for (const Block& b : blocks) {
    out += block_to_json(b).dump();
    out += '\n';
  }
  return out;
}

inline void save_chain(std::span<const Block> blocks, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write chain file '" + path.string() + "'");
  out << chain_to_jsonl(blocks);
}

inline void append_chain_block(const Block& block, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to chain file '" + path.string() + "'");
  out << block_to_json(block).dump() << '\n';
}

inline std::vector<Block> load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chain file '" + path.string() + "'");
  std::vector<Block> blocks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      blocks.push_back(block_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("chain file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return blocks;
}

}  // namespace hdcoin::chain
