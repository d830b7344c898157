#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "circlab/error.hpp"
#include "circlab/rng.hpp"

namespace circlab {

enum class distribution_tag { standard_gaussian, rademacher, uniform_sqrt3, integer_test };

// Law of the i.i.d. entries. The integer-test law is a finite integer support
// with positive integer weights; it is not normalised and exists for exact
// arithmetic checks.
struct EntryDistribution {
  distribution_tag tag = distribution_tag::standard_gaussian;
  std::vector<long> support;
  std::vector<unsigned> weights;

  static EntryDistribution gaussian() { return {distribution_tag::standard_gaussian, {}, {}}; }
  static EntryDistribution rademacher() { return {distribution_tag::rademacher, {}, {}}; }
  static EntryDistribution uniform() { return {distribution_tag::uniform_sqrt3, {}, {}}; }

  static EntryDistribution integer_test(std::vector<long> support, std::vector<unsigned> weights = {}) {
    if (support.empty()) throw invalid_input("integer-test law needs a nonempty support");
    if (weights.empty()) weights.assign(support.size(), 1u);
    if (weights.size() != support.size())
      throw invalid_input("integer-test law: support and weights differ in length");
    if (std::accumulate(weights.begin(), weights.end(), 0ull) == 0)
      throw invalid_input("integer-test law: weights sum to zero");
    return {distribution_tag::integer_test, std::move(support), std::move(weights)};
  }

  bool operator==(const EntryDistribution&) const = default;
};

inline std::string_view to_string(distribution_tag t) {
  switch (t) {
    case distribution_tag::standard_gaussian: return "gaussian";
    case distribution_tag::rademacher: return "rademacher";
    case distribution_tag::uniform_sqrt3: return "uniform";
    case distribution_tag::integer_test: return "integer";
  }
  return "?";
}

inline distribution_tag parse_distribution_tag(std::string_view s) {
  if (s == "gaussian" || s == "standard-gaussian") return distribution_tag::standard_gaussian;
  if (s == "rademacher") return distribution_tag::rademacher;
  if (s == "uniform" || s == "uniform-sqrt3") return distribution_tag::uniform_sqrt3;
  if (s == "integer" || s == "integer-test") return distribution_tag::integer_test;
  throw invalid_input("unknown distribution '" + std::string(s) + "'");
}

// X_0, ..., X_{n-1}, unscaled.
struct EntrySequence {
  std::vector<double> values;
  EntryDistribution distribution;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
};

inline EntrySequence sample_entries(const EntryDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw invalid_dimension("sample_entries: dimension must be positive");
  std::mt19937_64 gen(splitmix64(seed));
  std::vector<double> values(n);
  switch (dist.tag) {
    case distribution_tag::standard_gaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& v : values) v = normal(gen);
      break;
    }
    case distribution_tag::rademacher: {
      for (auto& v : values) v = (gen() >> 63) ? 1.0 : -1.0;
      break;
    }
    case distribution_tag::uniform_sqrt3: {
      const double a = std::sqrt(3.0);
      std::uniform_real_distribution<double> u(-a, a);
      for (auto& v : values) v = u(gen);
      break;
    }
    case distribution_tag::integer_test: {
      std::discrete_distribution<std::size_t> pick(dist.weights.begin(), dist.weights.end());
      for (auto& v : values) v = static_cast<double>(dist.support[pick(gen)]);
      break;
    }
  }
  return {std::move(values), dist, seed};
}

enum class circulant_kind { reverse, symmetric };

inline std::string_view to_string(circulant_kind k) {
  return k == circulant_kind::reverse ? "reverse" : "symmetric";
}

inline circulant_kind parse_kind(std::string_view s) {
  if (s == "reverse" || s == "rc") return circulant_kind::reverse;
  if (s == "symmetric" || s == "sc") return circulant_kind::symmetric;
  throw invalid_input("unknown matrix kind '" + std::string(s) + "'");
}

inline std::size_t& dense_cap() {
  static std::size_t cap = 4096;
  return cap;
}

// Index of the X variable sitting at 1-based position (i, j).
inline std::size_t entry_index(circulant_kind kind, std::size_t n, std::size_t i, std::size_t j) {
  if (kind == circulant_kind::reverse) return (i + j - 1) % n;
  const std::size_t d = i > j ? i - j : j - i;
  return std::min(d, n - d);
}

// Reverse or symmetric circulant matrix with entries X_k / sqrt(n). Entries
// are evaluated on demand from the index map; nothing is stored densely.
class CirculantMatrix {
 public:
  CirculantMatrix(circulant_kind kind, EntrySequence entries)
      : kind_(kind), entries_(std::move(entries)) {
    if (entries_.size() == 0) throw invalid_dimension("CirculantMatrix: empty entry sequence");
  }

  circulant_kind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return entries_.size(); }
  const EntrySequence& entries() const noexcept { return entries_; }

  // 1-based (i, j), scaled by 1/sqrt(n).
  double entry(std::size_t i, std::size_t j) const {
    const std::size_t dim = n();
    if (i < 1 || j < 1 || i > dim || j > dim)
      throw index_error("entry(" + std::to_string(i) + ", " + std::to_string(j) +
                        ") out of range for n = " + std::to_string(dim));
    return entries_[entry_index(kind_, dim, i, j)] / std::sqrt(static_cast<double>(dim));
  }

  // Dense copy; refuses dimensions above dense_cap().
  Eigen::MatrixXd materialize() const {
    const std::size_t dim = n();
    if (dim > dense_cap())
      throw resource_error("materialize: n = " + std::to_string(dim) + " exceeds dense cap " +
                           std::to_string(dense_cap()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    Eigen::MatrixXd m(dim, dim);
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t j = 1; j <= dim; ++j)
        m(i - 1, j - 1) = entries_[entry_index(kind_, dim, i, j)] * scale;
    return m;
  }

 private:
  circulant_kind kind_;
  EntrySequence entries_;
};

inline double entry(const CirculantMatrix& m, std::size_t i, std::size_t j) { return m.entry(i, j); }
inline Eigen::MatrixXd materialize(const CirculantMatrix& m) { return m.materialize(); }

}  // namespace circlab
