#pragma once

// Nonce-seeded item memories and record-based encoding.
//
// The item memory is the part of the model that the mining nonce determines,
// so its derivation is pinned down to the draw order: one splitmix64 stream
// seeded with the nonce (zero-extended to 64 bits) emits the ID hypervector
// for feature 0 first, element by element (+1 iff bit 0 of the draw is set),
// then the remaining ID vectors, then level vector 0. Level vector i is level
// vector i-1 with one contiguous block of f = floor(d / (2(L-1))) positions
// sign-flipped, so hamming(level_i, level_j) == |i-j| * f and the extreme
// levels differ in about half their positions.
//
// Encoding is record-based: bind each feature's ID vector with the level
// vector of its quantized value, then bundle across features.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hdcoin/hv.hpp"
#include "hdcoin/prng.hpp"

namespace hdcoin::hdc {

struct EncodingConfig {
  std::uint32_t dim = 0;
  std::uint32_t num_levels = 10;
  std::vector<std::pair<double, double>> feature_bounds;  // per-feature (min, max)

  void validate() const {
    if (dim < 1) throw std::invalid_argument("EncodingConfig: dim must be >= 1");
    if (num_levels < 2) throw std::invalid_argument("EncodingConfig: num_levels must be >= 2");
    for (const auto& [lo, hi] : feature_bounds) {
      if (lo > hi) throw std::invalid_argument("EncodingConfig: min > max for a feature");
    }
  }
};

struct ItemMemory {
  std::vector<BipolarHV> id_hvs;     // one per feature
  std::vector<BipolarHV> level_hvs;  // shared value levels
  std::uint32_t dim = 0;
  std::uint32_t num_features = 0;
  std::uint32_t num_levels = 0;
  std::uint32_t seed_nonce = 0;
};

inline ItemMemory gen_item_memory(std::uint32_t nonce, const EncodingConfig& config,
                                  std::size_t num_features) {
  config.validate();
  if (num_features < 1) throw std::invalid_argument("gen_item_memory: need at least one feature");
  const std::uint32_t d = config.dim;
  const std::uint32_t levels = config.num_levels;
  const std::uint32_t flip_block = d / (2 * (levels - 1));
  if (flip_block == 0) {
    throw std::invalid_argument("gen_item_memory: dim too small for num_levels (flip block empty)");
  }

  SplitMix64 rng(static_cast<std::uint64_t>(nonce));
  const auto draw_hv = [&]() {
    BipolarHV hv;
    hv.elements.resize(d);
    for (std::uint32_t i = 0; i < d; ++i) {
      hv.elements[i] = (rng.next() & 1u) ? std::int8_t{1} : std::int8_t{-1};
    }
    return hv;
  };

  ItemMemory im;
  im.dim = d;
  im.num_features = static_cast<std::uint32_t>(num_features);
  im.num_levels = levels;
  im.seed_nonce = nonce;
  im.id_hvs.reserve(num_features);
  for (std::size_t j = 0; j < num_features; ++j) {
    im.id_hvs.push_back(draw_hv());
  }
  im.level_hvs.reserve(levels);
  im.level_hvs.push_back(draw_hv());
  for (std::uint32_t lvl = 1; lvl < levels; ++lvl) {
    BipolarHV next = im.level_hvs.back();
    const std::uint32_t begin = (lvl - 1) * flip_block;
    for (std::uint32_t i = begin; i < begin + flip_block; ++i) {
      next.elements[i] = static_cast<std::int8_t>(-next.elements[i]);
    }
    im.level_hvs.push_back(std::move(next));
  }
  return im;
}

// Maps a real value into [0, L-1]; out-of-range values clamp to the edges.
inline std::uint32_t quantize(double value, std::pair<double, double> bounds,
                              std::uint32_t num_levels) {
  if (num_levels < 2) throw std::invalid_argument("quantize: num_levels must be >= 2");
  const auto [lo, hi] = bounds;
  if (hi == lo) return 0;
  const double scaled = (value - lo) / (hi - lo) * static_cast<double>(num_levels);
  const double floored = std::floor(scaled);
  if (floored <= 0.0) return 0;
  if (floored >= static_cast<double>(num_levels - 1)) return num_levels - 1;
  return static_cast<std::uint32_t>(floored);
}

inline IntHV encode(std::span<const double> features, const ItemMemory& im,
                    const EncodingConfig& config) {
  if (features.size() != im.num_features) {
    throw std::invalid_argument("encode: feature count does not match item memory");
  }
  if (config.feature_bounds.size() != features.size()) {
    throw std::invalid_argument("encode: feature bounds count does not match sample");
  }
  IntHV out = IntHV::zeros(im.dim);
  std::int32_t* acc = out.elements.data();
  for (std::size_t j = 0; j < features.size(); ++j) {
    const std::uint32_t level = quantize(features[j], config.feature_bounds[j], config.num_levels);
    const std::int8_t* id = im.id_hvs[j].elements.data();
    const std::int8_t* lv = im.level_hvs[level].elements.data();
    for (std::uint32_t i = 0; i < im.dim; ++i) {
      acc[i] += static_cast<std::int32_t>(id[i]) * static_cast<std::int32_t>(lv[i]);
    }
  }
  return out;
}

}  // namespace hdcoin::hdc
