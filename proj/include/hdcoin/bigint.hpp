#pragma once

// Minimal arbitrary-precision unsigned integer: just enough for the exact
// cosine-ordering comparison, where dot(q,a)^2 * ||b||^2 can exceed 128 bits.
// Little-endian 64-bit limbs, no leading-zero limbs.

#include <cstdint>
#include <vector>

namespace hdcoin {

class BigUInt {
 public:
  BigUInt() = default;

  static BigUInt from_u64(std::uint64_t v) {
    BigUInt r;
    if (v != 0) r.limbs_.push_back(v);
    return r;
  }

  static BigUInt from_u128(unsigned __int128 v) {
    BigUInt r;
    const auto lo = static_cast<std::uint64_t>(v);
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    if (lo != 0 || hi != 0) r.limbs_.push_back(lo);
    if (hi != 0) r.limbs_.push_back(hi);
    return r;
  }

  [[nodiscard]] bool is_zero() const { return limbs_.empty(); }

  [[nodiscard]] BigUInt operator*(const BigUInt& other) const {
    if (is_zero() || other.is_zero()) return {};
    BigUInt result;
    result.limbs_.assign(limbs_.size() + other.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
      std::uint64_t carry = 0;
      for (std::size_t j = 0; j < other.limbs_.size(); ++j) {
        unsigned __int128 cur = static_cast<unsigned __int128>(limbs_[i]) * other.limbs_[j];
        cur += result.limbs_[i + j];
        cur += carry;
        result.limbs_[i + j] = static_cast<std::uint64_t>(cur);
        carry = static_cast<std::uint64_t>(cur >> 64);
      }
      std::size_t k = i + other.limbs_.size();
      while (carry != 0) {
        unsigned __int128 cur = static_cast<unsigned __int128>(result.limbs_[k]) + carry;
        result.limbs_[k] = static_cast<std::uint64_t>(cur);
        carry = static_cast<std::uint64_t>(cur >> 64);
        ++k;
      }
    }
    result.trim();
    return result;
  }

  // Three-way comparison: -1, 0, +1.
  [[nodiscard]] int compare(const BigUInt& other) const {
    if (limbs_.size() != other.limbs_.size()) {
      return limbs_.size() < other.limbs_.size() ? -1 : 1;
    }
    for (std::size_t i = limbs_.size(); i-- > 0;) {
      if (limbs_[i] != other.limbs_[i]) return limbs_[i] < other.limbs_[i] ? -1 : 1;
    }
    return 0;
  }

  bool operator==(const BigUInt& o) const { return compare(o) == 0; }
  bool operator<(const BigUInt& o) const { return compare(o) < 0; }
  bool operator>(const BigUInt& o) const { return compare(o) > 0; }

  [[nodiscard]] const std::vector<std::uint64_t>& limbs() const { return limbs_; }

 private:
  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  }

  std::vector<std::uint64_t> limbs_;
};

}  // namespace hdcoin
