#pragma once

// Mining difficulty: the hypervector dimension (computational-cost knob,
// restricted to a configured ladder) plus an exact-rational accuracy
// threshold (quality knob) and the level count the encoder uses.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hdcoin/rational.hpp"

namespace hdcoin::chain {

struct Difficulty {
  std::uint32_t dimension = 3000;
  Rational accuracy_threshold{0, 1};
  std::uint32_t num_levels = 10;

  bool operator==(const Difficulty& o) const {
    return dimension == o.dimension && accuracy_threshold == o.accuracy_threshold &&
           num_levels == o.num_levels;
  }
  bool operator!=(const Difficulty& o) const { return !(*this == o); }
};

inline const std::vector<std::uint32_t>& default_ladder() {
  static const std::vector<std::uint32_t> ladder{3000, 5000, 7000, 10000, 15000};
  return ladder;
}

inline std::size_t ladder_index(const std::vector<std::uint32_t>& ladder,
                                std::uint32_t dimension) {
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] == dimension) return i;
  }
  throw std::invalid_argument("dimension " + std::to_string(dimension) +
                              " is not on the difficulty ladder");
}

}  // namespace hdcoin::chain
