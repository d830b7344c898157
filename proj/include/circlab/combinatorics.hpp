#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "circlab/error.hpp"
#include "circlab/exact.hpp"
#include "circlab/matrix_core.hpp"

namespace circlab {

// Tuple of 1-based matrix-entry indices, optionally carrying a sign per slot.
struct IndexVector {
  std::vector<long> indices;
  std::optional<std::vector<int>> signs;

  bool operator==(const IndexVector&) const = default;
};

enum class MatchClass {
  odd_even_pair_matched,
  opposite_sign_pair_matched,
  pair_matched_other,
  has_unmatched,
  has_higher_order_match,
};

namespace detail {

inline long mod(long a, long n) {
  const long r = a % n;
  return r < 0 ? r + n : r;
}

// Representative of a residue in {1, ..., n}: residue 0 maps to n.
inline long one_based(long residue, long n) {
  const long r = mod(residue, n);
  return r == 0 ? n : r;
}

inline long alt_sign(std::size_t k) { return k % 2 == 0 ? 1 : -1; }  // (-1)^k

// Visits every vector in {1..n}^len whose alternating sum sum_k (-1)^k j_k is
// congruent to `target` (mod n). The last coordinate is solved for, so only
// n^(len-1) prefixes are walked.
template <class Visit>
void for_each_alternating(long n, std::size_t len, long target, Visit&& visit) {
  std::vector<long> j(len, 1);
  if (len == 0) {
    if (mod(target, n) == 0) visit(std::span<const long>(j));
    return;
  }
  const std::size_t free = len - 1;
  // coefficient of the last slot is (-1)^len (1-based position len)
  const long last_sign = alt_sign(len);
  while (true) {
    long s = 0;
    for (std::size_t k = 0; k < free; ++k) s += alt_sign(k + 1) * j[k];
    j[free] = one_based(last_sign * (target - s), n);
    visit(std::span<const long>(j));
    std::size_t pos = 0;
    while (pos < free && j[pos] == n) j[pos++] = 1;
    if (pos == free) break;
    ++j[pos];
  }
}

// Visits every (signs, j) with j in {1..upper}^len and sum eps_i j_i
// congruent to `target` (mod n). Returns without visiting when upper < 1
// (unless len == 0).
template <class Visit>
void for_each_signed(long n, std::size_t len, long upper, long target, Visit&& visit) {
  std::vector<long> j(len, 1);
  std::vector<int> eps(len, 1);
  if (len == 0) {
    if (mod(target, n) == 0) visit(std::span<const int>(eps), std::span<const long>(j));
    return;
  }
  if (upper < 1) return;
  const std::size_t free = len - 1;
  while (true) {
    long s = 0;
    for (std::size_t k = 0; k < free; ++k) s += eps[k] * j[k];
    const long need = mod(target - s, n);  // eps_last * j_last == need (mod n)
    for (int e : {1, -1}) {
      const long r = mod(e * need, n);
      if (r >= 1 && r <= upper) {
        eps[free] = e;
        j[free] = r;
        visit(std::span<const int>(eps), std::span<const long>(j));
      }
    }
    // odometer over (eps, j) pairs: j fastest, then sign
    std::size_t pos = 0;
    while (pos < free) {
      if (j[pos] < upper) { ++j[pos]; break; }
      j[pos] = 1;
      if (eps[pos] == 1) { eps[pos] = -1; break; }
      eps[pos] = 1;
      ++pos;
    }
    if (pos == free) break;
  }
}

// Multiplicities of the values in v (any order).
inline std::vector<int> multiplicities(std::span<const long> v) {
  std::vector<long> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> m;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    m.push_back(static_cast<int>(j - i));
    i = j;
  }
  return m;
}

inline void check_dim(long n, const char* what) {
  if (n < 1) throw invalid_dimension(std::string(what) + ": n must be positive");
}

}  // namespace detail

// A_{2p}: vectors in {1..n}^{2p} with sum (-1)^k j_k == 0 (mod n).
template <class Visit>
void for_each_A2p(long n, int p, Visit&& visit) {
  detail::check_dim(n, "A_2p");
  if (p < 0) throw invalid_input("A_2p: p must be nonnegative");
  require_budget(saturating_pow(n, p > 0 ? 2 * p - 1 : 0), "A_2p");
  detail::for_each_alternating(n, 2 * static_cast<std::size_t>(p), 0, visit);
}

// A_{p,i}: vectors in {1..n}^{2p+1} with sum (-1)^k j_k == 2i - 1 (mod n).
template <class Visit>
void for_each_Api(long n, int p, long i, Visit&& visit) {
  detail::check_dim(n, "A_p,i");
  if (p < 0) throw invalid_input("A_p,i: p must be nonnegative");
  if (i < 1 || i > n) throw invalid_input("A_p,i: i must lie in 1..n");
  require_budget(saturating_pow(n, 2 * p), "A_p,i");
  detail::for_each_alternating(n, 2 * static_cast<std::size_t>(p) + 1, 2 * i - 1, visit);
}

// C_k with an explicit index ceiling. The literal set uses floor(n/2).
template <class Visit>
void for_each_Ck(long n, int k, long upper, Visit&& visit) {
  detail::check_dim(n, "C_k");
  if (k < 0) throw invalid_input("C_k: k must be nonnegative");
  require_budget(saturating_pow(2 * std::max(upper, 1L), k > 0 ? k - 1 : 0), "C_k");
  detail::for_each_signed(n, static_cast<std::size_t>(k), upper, 0, visit);
}

template <class Visit>
void for_each_Ck(long n, int k, Visit&& visit) {
  for_each_Ck(n, k, n / 2, visit);
}

// C~_k (even n only): sum eps_i j_i == 0 mod n/2 but != 0 mod n, which is
// the single residue n/2; indices range over 1..n/2-1.
template <class Visit>
void for_each_Ck_tilde(long n, int k, Visit&& visit) {
  detail::check_dim(n, "C~_k");
  if (n % 2) throw invalid_input("C~_k is defined for even n only");
  if (k < 0) throw invalid_input("C~_k: k must be nonnegative");
  const long upper = n / 2 - 1;
  require_budget(saturating_pow(2 * std::max(upper, 1L), k > 0 ? k - 1 : 0), "C~_k");
  detail::for_each_signed(n, static_cast<std::size_t>(k), upper, n / 2, visit);
}

inline std::vector<IndexVector> enumerate_A2p(long n, int p) {
  std::vector<IndexVector> out;
  for_each_A2p(n, p, [&](std::span<const long> j) { out.push_back({{j.begin(), j.end()}, std::nullopt}); });
  return out;
}

inline std::vector<IndexVector> enumerate_Api(long n, int p, long i) {
  std::vector<IndexVector> out;
  for_each_Api(n, p, i, [&](std::span<const long> j) { out.push_back({{j.begin(), j.end()}, std::nullopt}); });
  return out;
}

inline std::vector<IndexVector> enumerate_Ck(long n, int k) {
  std::vector<IndexVector> out;
  for_each_Ck(n, k, [&](std::span<const int> e, std::span<const long> j) {
    out.push_back({{j.begin(), j.end()}, std::vector<int>(e.begin(), e.end())});
  });
  return out;
}

inline std::vector<IndexVector> enumerate_Ck_tilde(long n, int k) {
  std::vector<IndexVector> out;
  for_each_Ck_tilde(n, k, [&](std::span<const int> e, std::span<const long> j) {
    out.push_back({{j.begin(), j.end()}, std::vector<int>(e.begin(), e.end())});
  });
  return out;
}

// Whether `value` occurs exactly twice in v, once at an odd and once at an
// even 1-based position.
inline bool entry_odd_even_matched(std::span<const long> v, long value) {
  int odd = 0, even = 0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] == value) ((k + 1) % 2 ? odd : even)++;
  return odd == 1 && even == 1;
}

// Whether `value` occurs exactly twice in v with opposite signs.
inline bool entry_opposite_sign_matched(std::span<const long> v, std::span<const int> signs, long value) {
  if (signs.size() != v.size()) throw invalid_input("entry_opposite_sign_matched: sign vector length mismatch");
  int plus = 0, minus = 0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] == value) (signs[k] > 0 ? plus : minus)++;
  return plus == 1 && minus == 1;
}

namespace detail {

template <class Matched>
MatchClass classify_pairs(std::span<const long> v, Matched&& matched, MatchClass full) {
  bool all_matched = true;
  for (int m : multiplicities(v)) {
    if (m == 1) return MatchClass::has_unmatched;
  }
  for (int m : multiplicities(v)) {
    if (m > 2) return MatchClass::has_higher_order_match;
  }
  for (long x : v) all_matched = all_matched && matched(x);
  return all_matched ? full : MatchClass::pair_matched_other;
}

}  // namespace detail

// Precedence when several apply: has_unmatched, then has_higher_order_match.
inline MatchClass classify_odd_even(std::span<const long> v) {
  return detail::classify_pairs(
      v, [&](long x) { return entry_odd_even_matched(v, x); }, MatchClass::odd_even_pair_matched);
}

inline MatchClass classify_odd_even(const IndexVector& v) { return classify_odd_even(v.indices); }

inline MatchClass classify_opposite_sign(std::span<const long> v, std::span<const int> signs) {
  if (signs.size() != v.size()) throw invalid_input("classify_opposite_sign: sign vector length mismatch");
  return detail::classify_pairs(
      v, [&](long x) { return entry_opposite_sign_matched(v, signs, x); },
      MatchClass::opposite_sign_pair_matched);
}

inline MatchClass classify_opposite_sign(const IndexVector& v) {
  if (!v.signs) throw invalid_input("classify_opposite_sign: index vector carries no signs");
  return classify_opposite_sign(v.indices, *v.signs);
}

// Membership in C^(2)_p: every value occurs at least twice.
inline bool at_least_pair_matched(std::span<const long> v) {
  for (int m : detail::multiplicities(v))
    if (m < 2) return false;
  return true;
}

inline std::uint64_t falling_factorial(std::uint64_t n, unsigned p) {
  std::uint64_t r = 1;
  for (unsigned k = 0; k < p; ++k) r *= (n >= k ? n - k : 0);
  return r;
}

inline std::uint64_t factorial(unsigned p) { return falling_factorial(p, p); }

// Number of odd-even pair matched vectors in A_{2p}, by enumeration.
inline std::uint64_t count_odd_even_matched(long n, int p) {
  std::uint64_t count = 0;
  for_each_A2p(n, p, [&](std::span<const long> j) {
    if (classify_odd_even(j) == MatchClass::odd_even_pair_matched) ++count;
  });
  return count;
}

// Number of opposite-sign pair matched (eps, j) pairs in C_{2p}.
inline std::uint64_t count_opposite_sign_matched(long n, int p) {
  std::uint64_t count = 0;
  for_each_Ck(n, 2 * p, [&](std::span<const int> e, std::span<const long> j) {
    if (classify_opposite_sign(j, e) == MatchClass::opposite_sign_pair_matched) ++count;
  });
  return count;
}

// (n^p / 2^p) * C(2p, p) * p!, the leading-order size of U_{2p}.
inline double opposite_sign_asymptotic(long n, int p) {
  double r = 1.0;
  for (int k = 1; k <= p; ++k) r *= (n / 2.0) * (p + k);  // (2p)!/p! = prod_{k=1..p} (p+k)
  return r;
}

namespace detail {

// Product over distinct values of E[X^multiplicity].
inline rational moment_product(std::span<const long> j, const std::vector<rational>& mu) {
  rational r = 1;
  for (int m : multiplicities(j)) {
    r *= mu[m];
    if (r == 0) break;
  }
  return r;
}

inline std::vector<rational> moment_table(const MomentFn& moments, int h) {
  std::vector<rational> mu(h + 1);
  for (int r = 0; r <= h; ++r) mu[r] = moments(r);
  return mu;
}

inline bigint binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  bigint r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

// Exact E[(1/n) Tr(A^h)] for one n x n matrix with i.i.d. entries whose raw
// moments are given by `moments` (E[X^0] must be 1). Reverse kind: moment
// sum over A_{2p} (even h) or over i and A_{p,i} (odd h). Symmetric kind:
// the X_0 / X_{n/2} factors are expanded binomially and factor out of the
// C_k sums by independence.
inline ScaledRational exact_expected_moment(circulant_kind kind, long n, int h, const MomentFn& moments) {
  detail::check_dim(n, "exact_expected_moment");
  if (h < 1) throw invalid_input("exact_expected_moment: h must be positive");
  const auto mu = detail::moment_table(moments, h);

  if (kind == circulant_kind::reverse) {
    rational sum = 0;
    if (h % 2 == 0) {
      for_each_A2p(n, h / 2, [&](std::span<const long> j) { sum += detail::moment_product(j, mu); });
      return {sum, n, -h};
    }
    const int p = h / 2;
    require_budget(saturating_pow(n, 2 * p + 1), "exact_expected_moment");
    for (long i = 1; i <= n; ++i)
      for_each_Api(n, p, i, [&](std::span<const long> j) { sum += detail::moment_product(j, mu); });
    return {sum, n, -(2 * p + 3)};
  }

  // symmetric: E[(1/n) Tr] = n^(-h/2) * [odd n]  sum_k C(h,k) E[X_0^(h-k)] S_k
  //                                     [even n] 1/2 sum_k C(h,k) (E[Y_k] S_k + E[Y~_k] S~_k)
  auto c_sum = [&](int k, bool tilde) {
    rational s = 0;
    auto add = [&](std::span<const int>, std::span<const long> j) { s += detail::moment_product(j, mu); };
    if (tilde) for_each_Ck_tilde(n, k, add);
    else for_each_Ck(n, k, n % 2 ? n / 2 : n / 2 - 1, add);
    return s;
  };
  rational total = 0;
  for (int k = 0; k <= h; ++k) {
    const int m = h - k;
    const rational binom(detail::binomial(h, k));
    if (n % 2) {
      if (mu[m] != 0) total += binom * mu[m] * c_sum(k, false);
      continue;
    }
    // E[(X_0 + X_{n/2})^m] and E[(X_0 - X_{n/2})^m]
    rational e_plus = 0, e_minus = 0;
    for (int a = 0; a <= m; ++a) {
      const rational t = rational(detail::binomial(m, a)) * mu[a] * mu[m - a];
      e_plus += t;
      e_minus += (m - a) % 2 ? -t : t;
    }
    const rational y = e_plus + e_minus, y_tilde = e_plus - e_minus;
    if (y != 0) total += binom * y * c_sum(k, false);
    if (y_tilde != 0) total += binom * y_tilde * c_sum(k, true);
  }
  if (n % 2 == 0) total /= 2;
  return {total, n, -h};
}

}  // namespace circlab
