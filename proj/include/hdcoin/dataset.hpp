#pragma once

// Dataset ingestion, canonical hashing and deterministic splitting.
//
// Canonical hash layout (the bytes all miners must agree on):
//   utf8(name) 0x00 | N u64be | m u64be | k u64be |
//   features row-major, each as the big-endian IEEE-754 bit pattern |
//   labels as i32be.
//
// CSV rows are `f1,f2,...,fm,label`; the label column is last and must be
// an integer. Labels are remapped to a dense 0..k-1 range preserving the
// sorted order of the original values.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdcoin/bytes.hpp"
#include "hdcoin/prng.hpp"
#include "hdcoin/rational.hpp"
#include "hdcoin/sha256.hpp"

namespace hdcoin::data {

struct Dataset {
  std::string name;
  std::size_t num_samples = 0;
  std::size_t num_features = 0;
  std::uint32_t num_classes = 0;
  std::vector<double> features;  // row-major, num_samples x num_features
  std::vector<std::int32_t> labels;

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {features.data() + i * num_features, num_features};
  }

  void validate() const {
    if (num_samples == 0) throw std::invalid_argument("Dataset: empty");
    if (features.size() != num_samples * num_features || labels.size() != num_samples) {
      throw std::invalid_argument("Dataset: inconsistent geometry");
    }
    for (const std::int32_t label : labels) {
      if (label < 0 || static_cast<std::uint32_t>(label) >= num_classes) {
        throw std::invalid_argument("Dataset: label out of range");
      }
    }
  }
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct RawRows {
  std::size_t num_features = 0;
  std::vector<double> features;
  std::vector<std::int64_t> raw_labels;
};

inline RawRows parse_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  RawRows rows;
  std::string line;
  std::size_t line_no = 0;
  bool skipped_header = !has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2) {
      throw LoadError("row " + std::to_string(line_no) + ": need at least one feature and a label");
    }
    if (rows.num_features == 0) {
      rows.num_features = fields.size() - 1;
    } else if (fields.size() - 1 != rows.num_features) {
      throw LoadError("row " + std::to_string(line_no) + ": ragged row (expected " +
                      std::to_string(rows.num_features + 1) + " columns)");
    }
    for (std::size_t j = 0; j < rows.num_features; ++j) {
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(fields[j].data(), fields[j].data() + fields[j].size(), value);
      if (ec != std::errc{} || ptr != fields[j].data() + fields[j].size()) {
        throw LoadError("row " + std::to_string(line_no) + ": bad numeric field '" +
                        std::string(fields[j]) + "'");
      }
      rows.features.push_back(value);
    }
    const std::string_view label_field = fields.back();
    std::int64_t label = 0;
    const auto [ptr, ec] =
        std::from_chars(label_field.data(), label_field.data() + label_field.size(), label);
    if (ec != std::errc{} || ptr != label_field.data() + label_field.size()) {
      throw LoadError("row " + std::to_string(line_no) + ": label must be an integer, got '" +
                      std::string(label_field) + "'");
    }
    rows.raw_labels.push_back(label);
  }
  if (rows.raw_labels.empty()) throw LoadError("'" + path.string() + "' has no data rows");
  return rows;
}

inline std::map<std::int64_t, std::int32_t> dense_label_map(
    std::span<const std::int64_t> raw_labels) {
  std::map<std::int64_t, std::int32_t> mapping;
  for (const std::int64_t raw : raw_labels) mapping.emplace(raw, 0);
  std::int32_t next = 0;
  for (auto& [raw, dense] : mapping) dense = next++;
  return mapping;
}

inline Dataset assemble(RawRows rows, const std::map<std::int64_t, std::int32_t>& mapping,
                        std::string name) {
  Dataset ds;
  ds.name = std::move(name);
  ds.num_samples = rows.raw_labels.size();
  ds.num_features = rows.num_features;
  ds.num_classes = static_cast<std::uint32_t>(mapping.size());
  ds.features = std::move(rows.features);
  ds.labels.reserve(ds.num_samples);
  for (const std::int64_t raw : rows.raw_labels) ds.labels.push_back(mapping.at(raw));
  ds.validate();
  return ds;
}

}  // namespace detail

inline Dataset load_csv(const std::filesystem::path& path, bool has_header = false,
                        std::string name = "") {
  detail::RawRows rows = detail::parse_csv(path, has_header);
  const auto mapping = detail::dense_label_map(rows.raw_labels);
  return detail::assemble(std::move(rows), mapping, std::move(name));
}

// Loads a pre-split pair with one shared label mapping, so a class that is
// absent from one file still gets a consistent dense id in both.
inline std::pair<Dataset, Dataset> load_csv_pair(const std::filesystem::path& train_path,
                                                 const std::filesystem::path& test_path,
                                                 bool has_header = false) {
  detail::RawRows train_rows = detail::parse_csv(train_path, has_header);
  detail::RawRows test_rows = detail::parse_csv(test_path, has_header);
  if (train_rows.num_features != test_rows.num_features) {
    throw LoadError("train/test feature counts differ");
  }
  std::vector<std::int64_t> all_labels = train_rows.raw_labels;
  all_labels.insert(all_labels.end(), test_rows.raw_labels.begin(), test_rows.raw_labels.end());
  const auto mapping = detail::dense_label_map(all_labels);
  return {detail::assemble(std::move(train_rows), mapping, ""),
          detail::assemble(std::move(test_rows), mapping, "")};
}

inline void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  char buf[64];
  for (std::size_t i = 0; i < ds.num_samples; ++i) {
    const auto row = ds.row(i);
    for (const double v : row) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out.write(buf, ptr - buf);
      out.put(',');
    }
    out << ds.labels[i] << '\n';
  }
  if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

inline Digest32 dataset_hash(const Dataset& ds) {
  Sha256 h;
  ByteBuffer header;
  header.append_cstr(ds.name);
  header.append_u64_be(ds.num_samples);
  header.append_u64_be(ds.num_features);
  header.append_u64_be(ds.num_classes);
  h.update(header.view());
  ByteBuffer body;
  for (const double v : ds.features) body.append_double_be(v);
  for (const std::int32_t label : ds.labels) {
    body.append_u32_be(static_cast<std::uint32_t>(label));
  }
  h.update(body.view());
  return h.finalize();
}

struct SplitResult {
  Dataset train;
  Dataset test;
};

// Deterministic stratified split. One splitmix64 stream seeded with
// split_seed shuffles each class's row indices in ascending label order
// (Fisher-Yates); the first ceil(fraction * count) shuffled rows of each
// class go to the training side. Membership comes from the shuffle; row
// order within each side keeps the original file order.
inline SplitResult split(const Dataset& ds, const Rational& train_fraction,
                         std::uint64_t split_seed) {
  if (train_fraction <= Rational(0, 1) || train_fraction >= Rational(1, 1)) {
    throw std::invalid_argument("split: train_fraction must be in (0, 1)");
  }
  ds.validate();
  std::vector<std::vector<std::uint64_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < ds.num_samples; ++i) {
    by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
  }
  SplitMix64 rng(split_seed);
  std::vector<bool> in_train(ds.num_samples, false);
  for (std::uint32_t c = 0; c < ds.num_classes; ++c) {
    auto& indices = by_class[c];
    if (indices.size() < 2) {
      throw std::invalid_argument("split: class " + std::to_string(c) +
                                  " has fewer than 2 samples, cannot stratify");
    }
    for (std::size_t i = indices.size() - 1; i > 0; --i) {
      const std::uint64_t j = rng.next_below(i + 1);
      std::swap(indices[i], indices[j]);
    }
    // ceil(fraction * count) without leaving exact arithmetic
    const auto count = static_cast<std::int64_t>(indices.size());
    const std::int64_t take =
        (train_fraction.num * count + train_fraction.den - 1) / train_fraction.den;
    for (std::int64_t i = 0; i < take; ++i) in_train[indices[static_cast<std::size_t>(i)]] = true;
  }

  const auto gather = [&](bool want_train) {
    Dataset out;
    out.name = ds.name;
    out.num_features = ds.num_features;
    out.num_classes = ds.num_classes;
    for (std::size_t i = 0; i < ds.num_samples; ++i) {
      if (in_train[i] != want_train) continue;
      const auto row = ds.row(i);
      out.features.insert(out.features.end(), row.begin(), row.end());
      out.labels.push_back(ds.labels[i]);
      ++out.num_samples;
    }
    return out;
  };
  return {gather(true), gather(false)};
}

struct SyntheticParams {
  std::uint32_t classes = 3;
  std::uint32_t features = 6;
  std::uint32_t samples_per_class = 40;
  double separation = 4.0;
  std::uint64_t seed = 1;
};

namespace detail {

// Approximate unit Gaussian as a sum of 12 uniforms minus 6. Pure IEEE
// arithmetic, no libm, so the generated bytes are identical on every
// conforming platform.
inline double gaussian_ish(SplitMix64& rng) {
  double sum = 0.0;
  for (int i = 0; i < 12; ++i) sum += rng.next_unit();
  return sum - 6.0;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

// Gaussian-blob generator for desk-scale experiments: class centers drawn
// uniformly from [0, separation)^m, unit-ish noise around them. Fully
// determined by the parameter tuple.
inline Dataset gen_synthetic(const SyntheticParams& p) {
  if (p.classes < 2) throw std::invalid_argument("gen_synthetic: need at least 2 classes");
  if (p.features < 1 || p.samples_per_class < 1) {
    throw std::invalid_argument("gen_synthetic: features and samples_per_class must be >= 1");
  }
  SplitMix64 rng(p.seed);
  std::vector<double> centers(static_cast<std::size_t>(p.classes) * p.features);
  for (double& c : centers) c = p.separation * rng.next_unit();

  Dataset ds;
  ds.name = "blobs-c" + std::to_string(p.classes) + "-f" + std::to_string(p.features) + "-n" +
            std::to_string(p.samples_per_class) + "-sep" + detail::format_double(p.separation) +
            "-seed" + std::to_string(p.seed);
  ds.num_features = p.features;
  ds.num_classes = p.classes;
  ds.num_samples = static_cast<std::size_t>(p.classes) * p.samples_per_class;
  ds.features.reserve(ds.num_samples * p.features);
  ds.labels.reserve(ds.num_samples);
  for (std::uint32_t c = 0; c < p.classes; ++c) {
    for (std::uint32_t s = 0; s < p.samples_per_class; ++s) {
      for (std::uint32_t j = 0; j < p.features; ++j) {
        ds.features.push_back(centers[static_cast<std::size_t>(c) * p.features + j] +
                              detail::gaussian_ish(rng));
      }
      ds.labels.push_back(static_cast<std::int32_t>(c));
    }
  }
  return ds;
}

// Accuracy of always predicting the most frequent class; the floor for
// accuracy thresholds.
inline Rational majority_baseline(const Dataset& ds) {
  ds.validate();
  std::vector<std::uint64_t> counts(ds.num_classes, 0);
  for (const std::int32_t label : ds.labels) ++counts[static_cast<std::size_t>(label)];
  const std::uint64_t best = *std::max_element(counts.begin(), counts.end());
  return Rational(static_cast<std::int64_t>(best), static_cast<std::int64_t>(ds.num_samples));
}

}  // namespace hdcoin::data
