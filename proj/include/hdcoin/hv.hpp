#pragma once

// Hypervector types and the three elementwise operations: addition
// (bundling), multiplication (binding) and cyclic permutation. Bipolar
// vectors hold {-1,+1}; integer vectors hold bundling sums.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hdcoin::hdc {

struct BipolarHV {
  std::vector<std::int8_t> elements;  // each exactly -1 or +1

  BipolarHV() = default;
  explicit BipolarHV(std::vector<std::int8_t> elems) : elements(std::move(elems)) {}

  [[nodiscard]] std::size_t dim() const { return elements.size(); }

  [[nodiscard]] bool is_bipolar() const {
    for (const std::int8_t v : elements) {
      if (v != 1 && v != -1) return false;
    }
    return !elements.empty();
  }
};

struct IntHV {
  std::vector<std::int32_t> elements;

  IntHV() = default;
  explicit IntHV(std::vector<std::int32_t> elems) : elements(std::move(elems)) {}
  static IntHV zeros(std::size_t dim) { return IntHV(std::vector<std::int32_t>(dim, 0)); }

  [[nodiscard]] std::size_t dim() const { return elements.size(); }

  bool operator==(const IntHV& o) const { return elements == o.elements; }
};

inline IntHV to_int(const BipolarHV& hv) {
  IntHV out;
  out.elements.assign(hv.elements.begin(), hv.elements.end());
  return out;
}

inline IntHV hv_add(const IntHV& a, const IntHV& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("hv_add: dimension mismatch");
  IntHV out = IntHV::zeros(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out.elements[i] = a.elements[i] + b.elements[i];
  }
  return out;
}

inline BipolarHV hv_multiply(const BipolarHV& a, const BipolarHV& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("hv_multiply: dimension mismatch");
  BipolarHV out;
  out.elements.resize(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    out.elements[i] = static_cast<std::int8_t>(a.elements[i] * b.elements[i]);
  }
  return out;
}

// Cyclic shift: element i moves to (i + shift) mod d. Negative shifts wrap.
inline BipolarHV hv_permute(const BipolarHV& a, std::int64_t shift) {
  const std::size_t d = a.dim();
  if (d == 0) return a;
  const auto sd = static_cast<std::int64_t>(d);
  std::int64_t s = shift % sd;
  if (s < 0) s += sd;
  BipolarHV out;
  out.elements.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.elements[(i + static_cast<std::size_t>(s)) % d] = a.elements[i];
  }
  return out;
}

}  // namespace hdcoin::hdc
