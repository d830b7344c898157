#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "circlab/error.hpp"
#include "circlab/matrix_core.hpp"

namespace circlab {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

// coeff * n^(half_power / 2). Keeps the 1/sqrt(n) normalisation symbolic so
// comparisons between trace routes never touch floating point.
struct ScaledRational {
  rational coeff;
  long n = 1;
  int half_power = 0;

  // Folds every whole power of n (and sqrt(n) when n is a perfect square)
  // into the coefficient, leaving half_power in {0, 1}.
  ScaledRational canonical() const {
    ScaledRational r = *this;
    if (r.coeff == 0) return {rational(0), n, 0};
    const rational nn(n);
    while (r.half_power >= 2) { r.coeff *= nn; r.half_power -= 2; }
    while (r.half_power < 0) { r.coeff /= nn; r.half_power += 2; }
    if (r.half_power == 1) {
      const long root = std::lround(std::sqrt(static_cast<double>(n)));
      if (root * root == n) { r.coeff *= rational(root); r.half_power = 0; }
    }
    return r;
  }

  double to_double() const {
    return static_cast<double>(coeff) * std::pow(static_cast<double>(n), half_power / 2.0);
  }

  friend bool operator==(const ScaledRational& a, const ScaledRational& b) {
    if (a.n != b.n) return false;
    const auto ca = a.canonical(), cb = b.canonical();
    return ca.coeff == cb.coeff && ca.half_power == cb.half_power;
  }
};

// Exact E[X^r] for each entry law; the uniform law on [-sqrt3, sqrt3] has
// E[X^(2k)] = 3^k / (2k+1).
inline rational raw_moment(const EntryDistribution& d, int r) {
  if (r < 0) throw invalid_input("raw_moment: negative order");
  if (r == 0) return rational(1);
  switch (d.tag) {
    case distribution_tag::rademacher:
      return rational(r % 2 == 0 ? 1 : 0);
    case distribution_tag::standard_gaussian: {
      if (r % 2) return rational(0);
      bigint m = 1;
      for (int k = r - 1; k > 1; k -= 2) m *= k;
      return rational(m);
    }
    case distribution_tag::uniform_sqrt3: {
      if (r % 2) return rational(0);
      bigint num = boost::multiprecision::pow(bigint(3), r / 2);
      return rational(num, bigint(r + 1));
    }
    case distribution_tag::integer_test: {
      bigint total = 0;
      rational acc = 0;
      for (std::size_t i = 0; i < d.support.size(); ++i) {
        acc += rational(boost::multiprecision::pow(bigint(d.support[i]), r) * d.weights[i]);
        total += d.weights[i];
      }
      return acc / rational(total);
    }
  }
  return rational(0);
}

using MomentFn = std::function<rational(int)>;

inline MomentFn moments_of(const EntryDistribution& d) {
  return [d](int r) { return raw_moment(d, r); };
}

// Upper bound on tuples an enumeration may visit. Overridable through the
// CIRCLAB_BUDGET environment variable.
inline std::uint64_t enumeration_budget() {
  if (const char* env = std::getenv("CIRCLAB_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return 100'000'000ULL;
}

// base^exp, saturating at uint64 max.
inline std::uint64_t saturating_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

inline void require_budget(std::uint64_t visits, const char* what) {
  const auto budget = enumeration_budget();
  if (visits > budget)
    throw resource_error(std::string(what) + ": " + std::to_string(visits) +
                         " tuples exceed enumeration budget " + std::to_string(budget));
}

}  // namespace circlab
