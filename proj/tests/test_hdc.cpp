// HDC core: hypervector algebra, nonce-seeded item memories, encoding,
// training, exact-integer similarity and inference. The reference item
// memory for nonce 0 was computed with a standalone splitmix64 before this
// module existed; the float oracles reimplement the pipeline with plain
// loops in long double precision.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "hdcoin/encoding.hpp"
#include "hdcoin/hv.hpp"
#include "hdcoin/model.hpp"
#include "hdcoin/prng.hpp"

using namespace hdcoin;
using namespace hdcoin::hdc;

namespace {

IntHV make_int_hv(std::vector<std::int32_t> v) { return IntHV(std::move(v)); }

BipolarHV make_bipolar(std::vector<int> v) {
  BipolarHV hv;
  for (const int e : v) hv.elements.push_back(static_cast<std::int8_t>(e));
  return hv;
}

BipolarHV random_bipolar(SplitMix64& rng, std::size_t dim) {
  BipolarHV hv;
  hv.elements.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    hv.elements.push_back((rng.next() & 1) ? std::int8_t{1} : std::int8_t{-1});
  }
  return hv;
}

IntHV random_int_hv(SplitMix64& rng, std::size_t dim, std::int32_t magnitude) {
  IntHV hv;
  hv.elements.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    hv.elements.push_back(static_cast<std::int32_t>(rng.next_below(2 * magnitude + 1)) -
                          magnitude);
  }
  return hv;
}

// Long-double cosine, the reference the exact integer comparison must agree
// with. Zero vectors map to -infinity like the implementation defines.
long double cosine_ld(const IntHV& a, const IntHV& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += static_cast<long double>(a.elements[i]) * b.elements[i];
    na += static_cast<long double>(a.elements[i]) * a.elements[i];
    nb += static_cast<long double>(b.elements[i]) * b.elements[i];
  }
  if (nb == 0 || na == 0) return -HUGE_VALL;
  return dot / (sqrtl(na) * sqrtl(nb));
}

}  // namespace

TEST_CASE("hv_add elementwise") {
  CHECK(hv_add(make_int_hv({1, 2}), make_int_hv({0, 0})) == make_int_hv({1, 2}));
  CHECK(hv_add(make_int_hv({1, -1}), make_int_hv({-1, 1})) == make_int_hv({0, 0}));
  CHECK(hv_add(make_int_hv({2, 3, 4}), make_int_hv({1, 1, 1})) == make_int_hv({3, 4, 5}));
  CHECK_THROWS_AS(hv_add(make_int_hv({1}), make_int_hv({1, 2})), std::invalid_argument);
}

TEST_CASE("hv_multiply identity, self-inverse, elementwise") {
  const BipolarHV x = make_bipolar({1, -1, 1});
  CHECK(hv_multiply(make_bipolar({1, 1, 1}), x).elements == x.elements);
  const BipolarHV sq = hv_multiply(x, x);
  for (const auto e : sq.elements) CHECK(e == 1);
  const BipolarHV prod = hv_multiply(make_bipolar({1, -1, 1}), make_bipolar({-1, -1, 1}));
  CHECK(prod.elements == make_bipolar({-1, 1, 1}).elements);
  CHECK_THROWS_AS(hv_multiply(make_bipolar({1}), make_bipolar({1, 1})), std::invalid_argument);
}

TEST_CASE("hv_multiply is commutative and associative (random property)") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng.next_below(64);
    const BipolarHV a = random_bipolar(rng, d);
    const BipolarHV b = random_bipolar(rng, d);
    const BipolarHV c = random_bipolar(rng, d);
    CHECK(hv_multiply(a, b).elements == hv_multiply(b, a).elements);
    CHECK(hv_multiply(hv_multiply(a, b), c).elements ==
          hv_multiply(a, hv_multiply(b, c)).elements);
    CHECK(hv_multiply(a, b).is_bipolar());
  }
}

TEST_CASE("hv_permute shifts cyclically") {
  const BipolarHV x = make_bipolar({1, -1, 1, -1});
  CHECK(hv_permute(x, 0).elements == x.elements);
  CHECK(hv_permute(x, 4).elements == x.elements);
  // element i moves to (i + 1) mod d
  const BipolarHV one = hv_permute(make_bipolar({1, 1, -1, 1}), 1);
  CHECK(one.elements == make_bipolar({1, 1, 1, -1}).elements);
}

TEST_CASE("hv_permute round trip: permute by s then d-s restores (property)") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng.next_below(48);
    const BipolarHV x = random_bipolar(rng, d);
    const auto s = static_cast<std::int64_t>(rng.next_below(d + 1));
    CHECK(hv_permute(hv_permute(x, s), static_cast<std::int64_t>(d) - s).elements == x.elements);
  }
  CHECK(hv_permute(make_bipolar({1, -1}), -1).elements ==
        hv_permute(make_bipolar({1, -1}), 1).elements);
}

TEST_CASE("gen_item_memory matches the reference splitmix64 derivation") {
  EncodingConfig config;
  config.dim = 4;
  config.num_levels = 2;
  config.feature_bounds = {{0.0, 1.0}};
  const ItemMemory im = gen_item_memory(0, config, 1);
  // Frozen from an independent splitmix64 run with seed 0: the first four
  // draws give the ID vector, the next four give level 0; level 1 flips the
  // block [0, 2).
  CHECK(im.id_hvs[0].elements == make_bipolar({1, -1, 1, -1}).elements);
  CHECK(im.level_hvs[0].elements == make_bipolar({1, -1, 1, -1}).elements);
  CHECK(im.level_hvs[1].elements == make_bipolar({-1, 1, 1, -1}).elements);
}

TEST_CASE("gen_item_memory is deterministic in (nonce, d, m, L)") {
  EncodingConfig config;
  config.dim = 128;
  config.num_levels = 5;
  config.feature_bounds.assign(3, {0.0, 1.0});
  const ItemMemory a = gen_item_memory(77, config, 3);
  const ItemMemory b = gen_item_memory(77, config, 3);
  for (std::size_t j = 0; j < 3; ++j) CHECK(a.id_hvs[j].elements == b.id_hvs[j].elements);
  for (std::size_t l = 0; l < 5; ++l) CHECK(a.level_hvs[l].elements == b.level_hvs[l].elements);
  const ItemMemory c = gen_item_memory(78, config, 3);
  CHECK(a.id_hvs[0].elements != c.id_hvs[0].elements);
}

TEST_CASE("level vectors differ by exact flip blocks") {
  EncodingConfig config;
  config.dim = 8;
  config.num_levels = 2;
  config.feature_bounds = {{0.0, 1.0}};
  const ItemMemory im = gen_item_memory(5, config, 1);
  // f = floor(8 / (2*1)) = 4, flipped block [0, 4)
  int diff = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    if (im.level_hvs[0].elements[i] != im.level_hvs[1].elements[i]) {
      ++diff;
      CHECK(i < 4);
    }
  }
  CHECK(diff == 4);
}

TEST_CASE("level similarity is monotone: hamming(Lv_i, Lv_j) == |i-j| * f (property)") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    EncodingConfig config;
    config.num_levels = 2 + static_cast<std::uint32_t>(rng.next_below(9));
    config.dim = 2 * (config.num_levels - 1) * (1 + static_cast<std::uint32_t>(rng.next_below(8)));
    config.feature_bounds = {{0.0, 1.0}};
    const std::uint32_t f = config.dim / (2 * (config.num_levels - 1));
    const ItemMemory im = gen_item_memory(static_cast<std::uint32_t>(rng.next()), config, 1);
    for (std::uint32_t i = 0; i < config.num_levels; ++i) {
      for (std::uint32_t j = i; j < config.num_levels; ++j) {
        std::uint32_t hamming = 0;
        for (std::uint32_t e = 0; e < config.dim; ++e) {
          if (im.level_hvs[i].elements[e] != im.level_hvs[j].elements[e]) ++hamming;
        }
        CHECK(hamming == (j - i) * f);
      }
    }
  }
}

TEST_CASE("gen_item_memory rejects dimensions too small for the level count") {
  EncodingConfig config;
  config.dim = 4;
  config.num_levels = 10;
  config.feature_bounds = {{0.0, 1.0}};
  CHECK_THROWS_AS(gen_item_memory(0, config, 1), std::invalid_argument);
}

TEST_CASE("quantize edges and midpoint") {
  CHECK(quantize(0.0, {0.0, 10.0}, 10) == 0);
  CHECK(quantize(10.0, {0.0, 10.0}, 10) == 9);
  CHECK(quantize(5.0, {0.0, 10.0}, 10) == 5);
  CHECK(quantize(-3.0, {0.0, 10.0}, 10) == 0);   // clamps below
  CHECK(quantize(42.0, {0.0, 10.0}, 10) == 9);   // clamps above
  CHECK(quantize(7.0, {5.0, 5.0}, 10) == 0);     // degenerate bounds
}

TEST_CASE("encode matches the hand-computed elementwise oracle") {
  // Injected item memory: ID1=[+,+,+,+], ID2=[+,-,+,-], Lv0=[+,+,-,-],
  // Lv1=[-,+,-,+]. Sample quantizes to levels (0, 1), so
  // H[i] = ID1[i]*Lv0[i] + ID2[i]*Lv1[i] = [0, 0, -2, -2].
  ItemMemory im;
  im.dim = 4;
  im.num_features = 2;
  im.num_levels = 2;
  im.id_hvs = {make_bipolar({1, 1, 1, 1}), make_bipolar({1, -1, 1, -1})};
  im.level_hvs = {make_bipolar({1, 1, -1, -1}), make_bipolar({-1, 1, -1, 1})};
  EncodingConfig config;
  config.dim = 4;
  config.num_levels = 2;
  config.feature_bounds = {{0.0, 1.0}, {0.0, 1.0}};
  const std::vector<double> sample{0.0, 1.0};  // levels (0, 1)
  const IntHV encoded = encode(sample, im, config);
  // Independent recomputation with plain loops:
  std::vector<std::int32_t> expect(4, 0);
  const std::vector<std::uint32_t> levels{0, 1};
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t i = 0; i < 4; ++i) {
      expect[i] += im.id_hvs[j].elements[i] * im.level_hvs[levels[j]].elements[i];
    }
  }
  CHECK(expect == std::vector<std::int32_t>{0, 0, -2, -2});
  CHECK(encoded.elements == expect);
}

TEST_CASE("encode with one feature is the bound bipolar vector") {
  EncodingConfig config;
  config.dim = 32;
  config.num_levels = 4;
  config.feature_bounds = {{0.0, 1.0}};
  const ItemMemory im = gen_item_memory(9, config, 1);
  const std::vector<double> sample{0.6};
  const IntHV encoded = encode(sample, im, config);
  for (const std::int32_t e : encoded.elements) CHECK((e == 1 || e == -1));
}

TEST_CASE("encode is pure and bounded by the feature count (property)") {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    EncodingConfig config;
    config.dim = 16 + static_cast<std::uint32_t>(rng.next_below(48));
    config.num_levels = 2 + static_cast<std::uint32_t>(rng.next_below(4));
    const std::size_t m = 1 + rng.next_below(5);
    config.feature_bounds.assign(m, {0.0, 1.0});
    if (config.dim < 2 * (config.num_levels - 1)) continue;
    const ItemMemory im = gen_item_memory(static_cast<std::uint32_t>(rng.next()), config, m);
    std::vector<double> sample;
    for (std::size_t j = 0; j < m; ++j) sample.push_back(rng.next_unit());
    const IntHV a = encode(sample, im, config);
    const IntHV b = encode(sample, im, config);
    CHECK(a == b);
    for (const std::int32_t e : a.elements) {
      CHECK(e <= static_cast<std::int32_t>(m));
      CHECK(e >= -static_cast<std::int32_t>(m));
    }
  }
}

TEST_CASE("encode rejects feature-count mismatches") {
  EncodingConfig config;
  config.dim = 8;
  config.num_levels = 2;
  config.feature_bounds = {{0.0, 1.0}};
  const ItemMemory im = gen_item_memory(1, config, 1);
  const std::vector<double> sample{0.1, 0.2};
  CHECK_THROWS_AS(encode(sample, im, config), std::invalid_argument);
}

TEST_CASE("train: singletons, doubling, label range") {
  const IntHV a = make_int_hv({1, -2, 3});
  const IntHV b = make_int_hv({0, 4, -1});
  const std::vector<IntHV> encoded{a, b};
  const std::vector<std::int32_t> labels{0, 1};
  const AssociativeMemory am = train(encoded, labels, 2);
  CHECK(am.class_hvs[0] == a);
  CHECK(am.class_hvs[1] == b);
  CHECK_FALSE(am.has_empty_class());

  const std::vector<IntHV> twice{a, a};
  const std::vector<std::int32_t> same{1, 1};
  const AssociativeMemory am2 = train(twice, same, 2);
  CHECK(am2.class_hvs[1] == make_int_hv({2, -4, 6}));
  CHECK(am2.has_empty_class());  // class 0 saw no samples

  const std::vector<std::int32_t> bad{0, 2};
  CHECK_THROWS_AS(train(encoded, bad, 2), std::out_of_range);
}

TEST_CASE("train equals brute-force per-class summation (random oracle)") {
  SplitMix64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t dim = 8 + rng.next_below(24);
    std::vector<IntHV> encoded;
    std::vector<std::int32_t> labels;
    for (int s = 0; s < 10; ++s) {
      encoded.push_back(random_int_hv(rng, dim, 5));
      labels.push_back(static_cast<std::int32_t>(rng.next_below(3)));
    }
    const AssociativeMemory am = train(encoded, labels, 3);
    for (std::int32_t c = 0; c < 3; ++c) {
      std::vector<std::int32_t> want(dim, 0);
      for (std::size_t s = 0; s < encoded.size(); ++s) {
        if (labels[s] != c) continue;
        for (std::size_t i = 0; i < dim; ++i) want[i] += encoded[s].elements[i];
      }
      CHECK(am.class_hvs[static_cast<std::size_t>(c)].elements == want);
      // class vector elements stay within magnitude * class size
      const auto bound = static_cast<std::int32_t>(
          5 * am.class_counts[static_cast<std::size_t>(c)]);
      for (const std::int32_t e : want) {
        CHECK(e <= bound);
        CHECK(e >= -bound);
      }
    }
  }
}

TEST_CASE("train is invariant to sample order (property)") {
  SplitMix64 rng(16);
  std::vector<IntHV> encoded;
  std::vector<std::int32_t> labels;
  for (int s = 0; s < 12; ++s) {
    encoded.push_back(random_int_hv(rng, 16, 4));
    labels.push_back(static_cast<std::int32_t>(rng.next_below(4)));
  }
  const AssociativeMemory forward = train(encoded, labels, 4);
  std::vector<IntHV> reversed_hv(encoded.rbegin(), encoded.rend());
  std::vector<std::int32_t> reversed_lb(labels.rbegin(), labels.rend());
  const AssociativeMemory backward = train(reversed_hv, reversed_lb, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(forward.class_hvs[c] == backward.class_hvs[c]);
  }
}

TEST_CASE("compare_similarity: self vs orthogonal, symmetry, zero vector") {
  const IntHV q = make_int_hv({2, 0, -1, 3});
  const IntHV orth = make_int_hv({0, 5, 0, 0});  // dot(q, orth) == 0
  CHECK(compare_similarity(q, q, orth) == SimOrder::a_greater);
  CHECK(compare_similarity(q, orth, q) == SimOrder::b_greater);
  CHECK(compare_similarity(q, orth, orth) == SimOrder::equal);
  const IntHV zero = make_int_hv({0, 0, 0, 0});
  CHECK(compare_similarity(q, orth, zero) == SimOrder::a_greater);  // zero is -inf
  CHECK(compare_similarity(q, zero, zero) == SimOrder::equal);
  CHECK_THROWS_AS(compare_similarity(q, make_int_hv({1}), q), std::invalid_argument);
}

TEST_CASE("compare_similarity agrees with a long-double cosine oracle (50 triples)") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 16;
    const IntHV q = random_int_hv(rng, d, 6);
    const IntHV a = random_int_hv(rng, d, 6);
    const IntHV b = random_int_hv(rng, d, 6);
    const long double ca = cosine_ld(q, a);
    const long double cb = cosine_ld(q, b);
    const SimOrder got = compare_similarity(q, a, b);
    if (ca > cb) CHECK(got == SimOrder::a_greater);
    else if (cb > ca) CHECK(got == SimOrder::b_greater);
    else CHECK(got == SimOrder::equal);
  }
}

TEST_CASE("infer: exact match wins, ties resolve to the smallest class") {
  SplitMix64 rng(18);
  const IntHV q = make_int_hv({3, -1, 2, 0});
  AssociativeMemory am;
  am.dim = 4;
  am.num_classes = 2;
  am.class_hvs = {q, make_int_hv({-1, -3, 0, 5})};  // dot(q, hv1) == 0
  am.class_counts = {1, 1};
  CHECK(infer(q, am) == 0);

  AssociativeMemory tie;
  tie.dim = 4;
  tie.num_classes = 3;
  tie.class_hvs = {make_int_hv({1, 1, 1, 1}), make_int_hv({1, 1, 1, 1}),
                   make_int_hv({1, 1, 1, 1})};
  tie.class_counts = {1, 1, 1};
  CHECK(infer(q, tie) == 0);
}

TEST_CASE("infer matches brute-force float argmax with the same tie rule (20 instances)") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 8 + rng.next_below(32);
    const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.next_below(4));
    AssociativeMemory am;
    am.dim = static_cast<std::uint32_t>(d);
    am.num_classes = k;
    for (std::uint32_t c = 0; c < k; ++c) {
      am.class_hvs.push_back(random_int_hv(rng, d, 8));
      am.class_counts.push_back(1);
    }
    const IntHV q = random_int_hv(rng, d, 4);
    std::uint32_t oracle = 0;
    long double best = cosine_ld(q, am.class_hvs[0]);
    for (std::uint32_t c = 1; c < k; ++c) {
      const long double sim = cosine_ld(q, am.class_hvs[c]);
      if (sim > best) {
        best = sim;
        oracle = c;
      }
    }
    CHECK(infer(q, am) == oracle);
  }
}

TEST_CASE("evaluate counts exactly") {
  AssociativeMemory am;
  am.dim = 2;
  am.num_classes = 2;
  am.class_hvs = {make_int_hv({5, 0}), make_int_hv({0, 5})};
  am.class_counts = {1, 1};
  const std::vector<IntHV> queries{make_int_hv({4, 1}), make_int_hv({1, 4}),
                                   make_int_hv({3, 0}), make_int_hv({0, 3})};
  const std::vector<std::int32_t> labels{0, 1, 0, 1};
  CHECK(evaluate(am, queries, labels) == ExactAccuracy{4, 4});
  const std::vector<std::int32_t> off{0, 1, 1, 1};  // one wrong
  CHECK(evaluate(am, queries, off) == ExactAccuracy{3, 4});
  CHECK_THROWS_AS(evaluate(am, {}, {}), std::invalid_argument);
}

TEST_CASE("evaluate on a well-separated instance: all right, then all wrong") {
  // Orthogonal-by-seed: two random 256-dim bipolar singletons are nearly
  // orthogonal, so each test vector matches its own class; swapping the
  // labels of a perfectly separated set drives accuracy to zero.
  SplitMix64 rng(20);
  const BipolarHV c0 = random_bipolar(rng, 256);
  const BipolarHV c1 = random_bipolar(rng, 256);
  const std::vector<IntHV> encoded{to_int(c0), to_int(c1)};
  const std::vector<std::int32_t> labels{0, 1};
  const AssociativeMemory am = train(encoded, labels, 2);
  CHECK(evaluate(am, encoded, labels) == ExactAccuracy{2, 2});
  const std::vector<std::int32_t> swapped{1, 0};
  CHECK(evaluate(am, encoded, swapped) == ExactAccuracy{0, 2});
}
