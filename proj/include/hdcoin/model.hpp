#pragma once

// Training, similarity and inference over integer hypervectors.
//
// The similarity metric is cosine, but the ordering between two candidate
// class vectors is decided without any floating point: the query norm is
// common to both sides, so cos(q,a) vs cos(q,b) reduces to comparing the
// signs of the integer dot products and, when the signs agree, the exact
// products dot(q,a)^2 * ||b||^2 vs dot(q,b)^2 * ||a||^2 in arbitrary
// precision. An all-zero class vector compares as -infinity. This keeps
// every consensus-relevant decision bit-reproducible across machines.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hdcoin/bigint.hpp"
#include "hdcoin/rational.hpp"
#include "hdcoin/hv.hpp"

namespace hdcoin::hdc {

struct ExactAccuracy {
  std::uint32_t correct = 0;
  std::uint32_t total = 0;

  [[nodiscard]] Rational as_rational() const {
    return Rational(static_cast<std::int64_t>(correct), static_cast<std::int64_t>(total));
  }
  [[nodiscard]] double percent() const {
    return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  }
  bool operator==(const ExactAccuracy& o) const {
    return correct == o.correct && total == o.total;
  }
};

// Exact ordering of two accuracies: -1, 0, +1 for a < b, a == b, a > b.
inline int compare_accuracy(const ExactAccuracy& a, const ExactAccuracy& b) {
  const unsigned __int128 lhs =
      static_cast<unsigned __int128>(a.correct) * static_cast<unsigned __int128>(b.total);
  const unsigned __int128 rhs =
      static_cast<unsigned __int128>(b.correct) * static_cast<unsigned __int128>(a.total);
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

struct AssociativeMemory {
  std::vector<IntHV> class_hvs;
  std::vector<std::uint32_t> class_counts;  // training samples per class
  std::uint32_t num_classes = 0;
  std::uint32_t dim = 0;

  [[nodiscard]] bool has_empty_class() const {
    for (const std::uint32_t c : class_counts) {
      if (c == 0) return true;
    }
    return false;
  }
};

// Single-pass training: each class vector is the elementwise sum of the
// encoded training vectors with that label. No retraining passes.
inline AssociativeMemory train(std::span<const IntHV> encoded,
                               std::span<const std::int32_t> labels, std::uint32_t num_classes) {
  if (encoded.size() != labels.size()) {
    throw std::invalid_argument("train: encoded/label count mismatch");
  }
  if (encoded.empty()) throw std::invalid_argument("train: empty training set");
  if (num_classes < 1) throw std::invalid_argument("train: need at least one class");
  const std::size_t dim = encoded.front().dim();

  AssociativeMemory am;
  am.num_classes = num_classes;
  am.dim = static_cast<std::uint32_t>(dim);
  am.class_hvs.assign(num_classes, IntHV::zeros(dim));
  am.class_counts.assign(num_classes, 0);
  for (std::size_t s = 0; s < encoded.size(); ++s) {
    const std::int32_t label = labels[s];
    if (label < 0 || static_cast<std::uint32_t>(label) >= num_classes) {
      throw std::out_of_range("train: label out of range");
    }
    if (encoded[s].dim() != dim) throw std::invalid_argument("train: mixed dimensions");
    std::int32_t* acc = am.class_hvs[static_cast<std::size_t>(label)].elements.data();
    const std::int32_t* src = encoded[s].elements.data();
    for (std::size_t i = 0; i < dim; ++i) acc[i] += src[i];
    ++am.class_counts[static_cast<std::size_t>(label)];
  }
  return am;
}

enum class SimOrder { a_greater, b_greater, equal };

namespace detail {

struct SimScore {
  __int128 dot = 0;                 // dot(query, candidate)
  unsigned __int128 norm2 = 0;      // ||candidate||^2; 0 means similarity -inf
};

inline SimScore score_against(const IntHV& query, const IntHV& candidate) {
  if (query.dim() != candidate.dim()) {
    throw std::invalid_argument("similarity: dimension mismatch");
  }
  SimScore s;
  const std::int32_t* q = query.elements.data();
  const std::int32_t* c = candidate.elements.data();
  for (std::size_t i = 0; i < query.dim(); ++i) {
    s.dot += static_cast<__int128>(static_cast<std::int64_t>(q[i]) * c[i]);
    s.norm2 += static_cast<unsigned __int128>(static_cast<std::int64_t>(c[i]) * c[i]);
  }
  return s;
}

inline SimOrder compare_scores(const SimScore& a, const SimScore& b) {
  const bool a_neg_inf = a.norm2 == 0;
  const bool b_neg_inf = b.norm2 == 0;
  if (a_neg_inf && b_neg_inf) return SimOrder::equal;
  if (a_neg_inf) return SimOrder::b_greater;
  if (b_neg_inf) return SimOrder::a_greater;

  const int sign_a = a.dot > 0 ? 1 : (a.dot < 0 ? -1 : 0);
  const int sign_b = b.dot > 0 ? 1 : (b.dot < 0 ? -1 : 0);
  if (sign_a != sign_b) return sign_a > sign_b ? SimOrder::a_greater : SimOrder::b_greater;
  if (sign_a == 0) return SimOrder::equal;

  const auto abs128 = [](__int128 v) {
    return static_cast<unsigned __int128>(v < 0 ? -v : v);
  };
  const BigUInt dot_a = BigUInt::from_u128(abs128(a.dot));
  const BigUInt dot_b = BigUInt::from_u128(abs128(b.dot));
  const BigUInt lhs = dot_a * dot_a * BigUInt::from_u128(b.norm2);
  const BigUInt rhs = dot_b * dot_b * BigUInt::from_u128(a.norm2);
  const int cmp = lhs.compare(rhs);
  if (cmp == 0) return SimOrder::equal;
  // Both cosines positive: larger magnitude wins. Both negative: smaller
  // magnitude is the greater cosine.
  if (sign_a > 0) return cmp > 0 ? SimOrder::a_greater : SimOrder::b_greater;
  return cmp < 0 ? SimOrder::a_greater : SimOrder::b_greater;
}

inline std::uint32_t infer_cached(const IntHV& query, const AssociativeMemory& am) {
  if (am.num_classes == 0) throw std::invalid_argument("infer: empty associative memory");
  std::uint32_t best = 0;
  SimScore best_score = score_against(query, am.class_hvs[0]);
  for (std::uint32_t c = 1; c < am.num_classes; ++c) {
    const SimScore score = score_against(query, am.class_hvs[c]);
    if (compare_scores(score, best_score) == SimOrder::a_greater) {
      best = c;
      best_score = score;
    }
  }
  return best;
}

}  // namespace detail

// Orders cos(q,a) against cos(q,b) exactly.
inline SimOrder compare_similarity(const IntHV& q, const IntHV& a, const IntHV& b) {
  return detail::compare_scores(detail::score_against(q, a), detail::score_against(q, b));
}

// Argmax of similarity over the class vectors; ties resolve to the smallest
// class index so that every verifier reaches the same label.
inline std::uint32_t infer(const IntHV& query, const AssociativeMemory& am) {
  return detail::infer_cached(query, am);
}

inline ExactAccuracy evaluate(const AssociativeMemory& am, std::span<const IntHV> encoded_test,
                              std::span<const std::int32_t> labels) {
  if (encoded_test.size() != labels.size()) {
    throw std::invalid_argument("evaluate: encoded/label count mismatch");
  }
  if (encoded_test.empty()) throw std::invalid_argument("evaluate: empty test set");
  ExactAccuracy acc;
  acc.total = static_cast<std::uint32_t>(encoded_test.size());
  for (std::size_t s = 0; s < encoded_test.size(); ++s) {
    const std::uint32_t predicted = detail::infer_cached(encoded_test[s], am);
    if (static_cast<std::int32_t>(predicted) == labels[s]) ++acc.correct;
  }
  return acc;
}

}  // namespace hdcoin::hdc
