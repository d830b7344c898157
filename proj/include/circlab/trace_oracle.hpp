#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "circlab/combinatorics.hpp"
#include "circlab/error.hpp"
#include "circlab/exact.hpp"
#include "circlab/matrix_core.hpp"
#include "circlab/rng.hpp"

namespace circlab {

// Formula-side and direct-side trace of the same product, both exact when the
// inputs are integer sequences.
struct TraceComparison {
  circulant_kind kind;
  long n = 0;
  int h = 0;
  ScaledRational formula;
  ScaledRational direct;
  double formula_value = 0;
  double direct_value = 0;
  double abs_diff = 0;
  bool exact_equal = false;
};

namespace detail {

// Integer or floating-point scalar routes share one formula implementation.
template <class V>
V to_scalar(double x) {
  if constexpr (std::is_same_v<V, double>) return x;
  else return V(static_cast<long long>(std::llround(x)));
}

template <class V>
V ipow(const V& base, int e) {
  V r = V(1);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Unscaled sum of the reverse circulant trace formula for the product of the
// given sequences: sum over A_{2p} (even count) or sum over i and A_{p,i}
// (odd count) of prod_r X^{(r)}_{j_r}. Index n identifies with X_0.
template <class V>
V rc_formula_sum(long n, std::span<const std::vector<V>> xs) {
  const int h = static_cast<int>(xs.size());
  V sum = V(0);
  auto add = [&](std::span<const long> j) {
    V term = V(1);
    for (int r = 0; r < h; ++r) term *= xs[r][j[r] % n];
    sum += term;
  };
  if (h % 2 == 0) {
    for_each_A2p(n, h / 2, add);
  } else {
    require_budget(saturating_pow(n, h), "trace_rc_product");
    for (long i = 1; i <= n; ++i) for_each_Api(n, h / 2, i, add);
  }
  return sum;
}

// Bracketed sum of the symmetric circulant power formula, without the
// leading n^(-(p-2)/2) and (for even n) without the 1/2:
//   odd n:  sum_k C(p,k) X_0^(p-k) sum_{C_k} X_J
//   even n: sum_k C(p,k) [Y_k sum_{C_k} X_J + Y~_k sum_{C~_k} X_J]
// For even n the C_k indices run over 1..n/2-1; index n/2 is carried by Y_k.
template <class V>
V sc_formula_sum(long n, int p, const std::vector<V>& x) {
  auto c_sum = [&](int k, bool tilde) {
    V s = V(0);
    auto add = [&](std::span<const int>, std::span<const long> j) {
      V t = V(1);
      for (long idx : j) t *= x[idx];
      s += t;
    };
    if (tilde) for_each_Ck_tilde(n, k, add);
    else for_each_Ck(n, k, n % 2 ? n / 2 : n / 2 - 1, add);
    return s;
  };
  V total = V(0);
  for (int k = 0; k <= p; ++k) {
    V binom;
    if constexpr (std::is_same_v<V, double>) binom = static_cast<double>(binomial(p, k));
    else binom = binomial(p, k);
    if (n % 2) {
      total += binom * ipow(x[0], p - k) * c_sum(k, false);
    } else {
      const V a = ipow(V(x[0] + x[n / 2]), p - k), b = ipow(V(x[0] - x[n / 2]), p - k);
      total += binom * (V(a + b) * c_sum(k, false) + V(a - b) * c_sum(k, true));
    }
  }
  return total;
}

template <class V>
std::vector<V> convert(const EntrySequence& s) {
  std::vector<V> out;
  out.reserve(s.size());
  for (double v : s.values) out.push_back(to_scalar<V>(v));
  return out;
}

inline void require_integer(const EntrySequence& s) {
  for (double v : s.values)
    if (v != std::nearbyint(v)) throw invalid_input("exact trace routes need integer-valued entries");
}

inline long shared_dimension(std::span<const CirculantMatrix> ms, circulant_kind kind, const char* what) {
  if (ms.empty()) throw invalid_input(std::string(what) + ": empty product");
  const long n = static_cast<long>(ms.front().n());
  for (const auto& m : ms) {
    if (static_cast<long>(m.n()) != n) throw invalid_input(std::string(what) + ": mismatched dimensions");
    if (m.kind() != kind) throw invalid_input(std::string(what) + ": wrong matrix kind");
  }
  return n;
}

// Unscaled integer matrix with entry X_{index(i,j)}.
inline std::vector<std::vector<bigint>> integer_matrix(circulant_kind kind, const EntrySequence& x) {
  const std::size_t n = x.size();
  std::vector<std::vector<bigint>> m(n, std::vector<bigint>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = static_cast<long long>(x[entry_index(kind, n, i + 1, j + 1)]);
  return m;
}

}  // namespace detail

// Tr(RC^(1) ... RC^(h)) through the index-set formula:
//   n^(1-p) sum_{A_{2p}} ... for h = 2p, n^(-(2p+1)/2) sum_i sum_{A_{p,i}} ... for h = 2p+1.
inline ScaledRational trace_rc_product_exact(std::span<const CirculantMatrix> ms) {
  const long n = detail::shared_dimension(ms, circulant_kind::reverse, "trace_rc_product");
  std::vector<std::vector<bigint>> xs;
  for (const auto& m : ms) {
    detail::require_integer(m.entries());
    xs.push_back(detail::convert<bigint>(m.entries()));
  }
  const int h = static_cast<int>(ms.size());
  const bigint s = detail::rc_formula_sum<bigint>(n, xs);
  return {rational(s), n, h % 2 == 0 ? 2 - h : -h};
}

inline double trace_rc_product(std::span<const CirculantMatrix> ms) {
  const long n = detail::shared_dimension(ms, circulant_kind::reverse, "trace_rc_product");
  std::vector<std::vector<double>> xs;
  for (const auto& m : ms) xs.push_back(m.entries().values);
  const int h = static_cast<int>(ms.size());
  const double s = detail::rc_formula_sum<double>(n, xs);
  return s * std::pow(static_cast<double>(n), (h % 2 == 0 ? 2 - h : -h) / 2.0);
}

// Tr(SC^p) through the C_k / C~_k formula.
inline ScaledRational trace_sc_power_exact(const CirculantMatrix& m, int p) {
  if (m.kind() != circulant_kind::symmetric) throw invalid_input("trace_sc_power: wrong matrix kind");
  if (p < 1) throw invalid_input("trace_sc_power: p must be positive");
  detail::require_integer(m.entries());
  const long n = static_cast<long>(m.n());
  rational s(detail::sc_formula_sum<bigint>(n, p, detail::convert<bigint>(m.entries())));
  if (n % 2 == 0) s /= 2;
  return {s, n, 2 - p};
}

inline double trace_sc_power(const CirculantMatrix& m, int p) {
  if (m.kind() != circulant_kind::symmetric) throw invalid_input("trace_sc_power: wrong matrix kind");
  if (p < 1) throw invalid_input("trace_sc_power: p must be positive");
  const long n = static_cast<long>(m.n());
  double s = detail::sc_formula_sum<double>(n, p, m.entries().values);
  if (n % 2 == 0) s /= 2;
  return s * std::pow(static_cast<double>(n), (2 - p) / 2.0);
}

// Tr of the product of the unscaled integer matrices, times n^(-h/2).
inline ScaledRational direct_trace_exact(std::span<const CirculantMatrix> ms) {
  if (ms.empty()) throw invalid_input("direct_trace: empty product");
  const std::size_t n = ms.front().n();
  auto acc = detail::integer_matrix(ms.front().kind(), ms.front().entries());
  for (std::size_t r = 1; r < ms.size(); ++r) {
    if (ms[r].n() != n) throw invalid_input("direct_trace: mismatched dimensions");
    const auto b = detail::integer_matrix(ms[r].kind(), ms[r].entries());
    std::vector<std::vector<bigint>> c(n, std::vector<bigint>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        if (acc[i][k] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) c[i][j] += acc[i][k] * b[k][j];
      }
    acc = std::move(c);
  }
  bigint tr = 0;
  for (std::size_t i = 0; i < n; ++i) tr += acc[i][i];
  return {rational(tr), static_cast<long>(n), -static_cast<int>(ms.size())};
}

inline double direct_trace(std::span<const CirculantMatrix> ms) {
  if (ms.empty()) throw invalid_input("direct_trace: empty product");
  Eigen::MatrixXd acc = ms.front().materialize();
  for (std::size_t r = 1; r < ms.size(); ++r) {
    if (ms[r].n() != ms.front().n()) throw invalid_input("direct_trace: mismatched dimensions");
    acc = acc * ms[r].materialize();
  }
  return acc.trace();
}

struct CompactTrace {
  double main_term = 0;
  double remainder = 0;
};

// (1/n) Tr(SC^(1) ... SC^(p)) split into the leading C_p sum
// n^(-p/2) sum_{C_p} X^(1)_{j_1} ... X^(p)_{j_p} and a residual. The residual
// is computed as the difference from the direct trace.
inline CompactTrace trace_sc_product_compact(std::span<const CirculantMatrix> ms) {
  const long n = detail::shared_dimension(ms, circulant_kind::symmetric, "trace_sc_product_compact");
  const int p = static_cast<int>(ms.size());
  double s = 0;
  for_each_Ck(n, p, n % 2 ? n / 2 : n / 2 - 1, [&](std::span<const int>, std::span<const long> j) {
    double t = 1;
    for (int r = 0; r < p; ++r) t *= ms[r].entries()[j[r]];
    s += t;
  });
  CompactTrace out;
  out.main_term = s * std::pow(static_cast<double>(n), -p / 2.0);
  out.remainder = direct_trace(ms) / static_cast<double>(n) - out.main_term;
  return out;
}

inline EntryDistribution trace_test_law() { return EntryDistribution::integer_test({-3, -2, -1, 0, 1, 2, 3}); }

// Exact formula-vs-direct comparison on integer-test entries. Reverse kind
// uses h independent matrices; symmetric kind uses the h-th power of one.
inline TraceComparison verify_trace(circulant_kind kind, long n, int h, std::uint64_t seed) {
  if (n < 1 || n > 16) throw invalid_input("verify_trace: n must lie in 1..16");
  if (h < 1 || h > 6) throw invalid_input("verify_trace: h must lie in 1..6");
  const auto law = trace_test_law();
  std::vector<CirculantMatrix> ms;
  for (int r = 0; r < h; ++r) {
    const std::uint64_t label = kind == circulant_kind::reverse ? static_cast<std::uint64_t>(r) : 0;
    ms.emplace_back(kind, sample_entries(law, static_cast<std::size_t>(n), derive_seed(seed, {label})));
  }
  TraceComparison c;
  c.kind = kind;
  c.n = n;
  c.h = h;
  c.formula = kind == circulant_kind::reverse ? trace_rc_product_exact(ms) : trace_sc_power_exact(ms.front(), h);
  c.direct = direct_trace_exact(ms);
  c.formula_value = c.formula.to_double();
  c.direct_value = c.direct.to_double();
  c.exact_equal = c.formula == c.direct;
  if (!c.exact_equal) {
    const auto a = c.formula.canonical(), b = c.direct.canonical();
    if (a.half_power == b.half_power) {
      ScaledRational d{a.coeff - b.coeff, n, a.half_power};
      c.abs_diff = std::abs(d.to_double());
    } else {
      c.abs_diff = std::abs(c.formula_value - c.direct_value);
    }
  }
  return c;
}

}  // namespace circlab
