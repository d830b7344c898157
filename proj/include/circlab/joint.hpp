#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circlab/error.hpp"
#include "circlab/exact.hpp"
#include "circlab/matrix_core.hpp"
#include "circlab/parallel.hpp"
#include "circlab/rng.hpp"
#include "circlab/spectra.hpp"

namespace circlab {

// Word t_1 ... t_h over matrix labels 1..m.
struct Monomial {
  std::vector<int> word;
  int m = 1;

  Monomial() = default;
  Monomial(std::vector<int> w, int labels) : word(std::move(w)), m(labels) {
    if (word.empty()) throw invalid_input("Monomial: empty word");
    if (m < 1) throw invalid_input("Monomial: family size must be positive");
    for (int t : word)
      if (t < 1 || t > m) throw invalid_input("Monomial: label " + std::to_string(t) + " outside 1.." + std::to_string(m));
  }

  // Family size inferred from the largest label.
  static Monomial of(std::vector<int> w) {
    const int m = w.empty() ? 1 : *std::max_element(w.begin(), w.end());
    return Monomial(std::move(w), m);
  }

  std::size_t length() const noexcept { return word.size(); }
};

inline std::string to_string(const Monomial& q) {
  std::string s = "(";
  for (std::size_t i = 0; i < q.word.size(); ++i) s += (i ? "," : "") + std::to_string(q.word[i]);
  return s + ")";
}

struct SymmetryProfile {
  std::vector<int> even;  // index label-1
  std::vector<int> odd;
  bool symmetric = false;
};

inline SymmetryProfile symmetry_profile(const Monomial& q) {
  SymmetryProfile p;
  p.even.assign(q.m, 0);
  p.odd.assign(q.m, 0);
  for (std::size_t pos = 0; pos < q.word.size(); ++pos)
    ((pos + 1) % 2 ? p.odd : p.even)[q.word[pos] - 1]++;
  p.symmetric = p.even == p.odd;
  return p;
}

namespace detail {

inline double factorial_d(int k) {
  double r = 1;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

inline std::vector<int> label_counts(const Monomial& q) {
  std::vector<int> d(q.m, 0);
  for (int t : q.word) d[t - 1]++;
  return d;
}

}  // namespace detail

// Half-independent limit: prod_i s_i! when the word is symmetric (label i
// occurring 2 s_i times), zero otherwise.
inline double rc_limit_phi(const Monomial& q) {
  const auto prof = symmetry_profile(q);
  if (!prof.symmetric) return 0.0;
  double r = 1;
  for (int s : prof.odd) r *= detail::factorial_d(s);
  return r;
}

// Independent Gaussian limit: prod_i (2 s_i)! / (2^s_i s_i!) when every
// label count d_i = 2 s_i is even, zero otherwise. Word order is irrelevant.
inline double sc_limit_phi(const Monomial& q) {
  double r = 1;
  for (int d : detail::label_counts(q)) {
    if (d % 2) return 0.0;
    for (int k = d - 1; k > 1; k -= 2) r *= k;
  }
  return r;
}

namespace detail {

// Polynomial in eta_i, conj(eta_i): exponent vector (r_1, s_1, ..., r_m, s_m).
using Poly = std::map<std::vector<int>, bigint>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  return out;
}

inline void poly_add(Poly& a, const Poly& b) {
  for (const auto& [e, c] : b) a[e] += c;
}

using PolyMat = std::array<std::array<Poly, 2>, 2>;

inline PolyMat polymat_mul(const PolyMat& a, const PolyMat& b) {
  PolyMat c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) poly_add(c[i][j], poly_mul(a[i][k], b[k][j]));
  return c;
}

// E[prod_i eta_i^r_i conj(eta_i)^s_i] for independent standard complex
// Gaussians: prod_i r_i! [r_i == s_i].
inline bigint complex_gaussian_expectation(const std::vector<int>& e) {
  bigint r = 1;
  for (std::size_t i = 0; i < e.size(); i += 2) {
    if (e[i] != e[i + 1]) return 0;
    for (int k = 2; k <= e[i]; ++k) r *= k;
  }
  return r;
}

}  // namespace detail

// phi_2 of the word evaluated on the 2x2 model a_i = [[0, eta_i], [conj eta_i, 0]]
// with state (1/2) E Tr, by symbolic expansion and Wick-type moment rules.
inline rational half_independent_model_phi_exact(const Monomial& q) {
  const std::size_t vars = 2 * static_cast<std::size_t>(q.m);
  auto generator = [&](int label) {
    detail::PolyMat a;
    std::vector<int> eta(vars, 0), eta_bar(vars, 0);
    eta[2 * (label - 1)] = 1;
    eta_bar[2 * (label - 1) + 1] = 1;
    a[0][1][eta] = 1;
    a[1][0][eta_bar] = 1;
    return a;
  };
  detail::PolyMat prod;
  prod[0][0][std::vector<int>(vars, 0)] = 1;
  prod[1][1][std::vector<int>(vars, 0)] = 1;
  for (int t : q.word) prod = detail::polymat_mul(prod, generator(t));
  bigint total = 0;
  for (int d = 0; d < 2; ++d)
    for (const auto& [e, c] : prod[d][d]) total += c * detail::complex_gaussian_expectation(e);
  return rational(total, bigint(2));
}

inline double half_independent_model_phi(const Monomial& q) {
  return static_cast<double>(half_independent_model_phi_exact(q));
}

// (1/n) Tr(M_{t_1} ... M_{t_h}) by dense multiplication.
inline double product_trace_dense(circulant_kind kind, std::span<const EntrySequence> family, const Monomial& q) {
  if (static_cast<int>(family.size()) < q.m) throw invalid_input("product_trace: family smaller than word alphabet");
  std::vector<Eigen::MatrixXd> mats;
  for (const auto& x : family) mats.push_back(CirculantMatrix(kind, x).materialize());
  Eigen::MatrixXd acc = mats[q.word[0] - 1];
  for (std::size_t r = 1; r < q.word.size(); ++r) acc = acc * mats[q.word[r] - 1];
  return acc.trace() / static_cast<double>(acc.rows());
}

// (1/n) Tr(M_{t_1} ... M_{t_h}) in the Fourier domain.
//
// Symmetric kind: all factors are circulants sharing the DFT eigenbasis.
// Reverse kind: RC_x = C_x J and J C_y J has eigenvalues conj(y^_k), so an
// even-length product is a circulant with eigenvalues x^1 conj(x^2) x^3 ...,
// and an odd-length one is (circulant) J, whose trace is mu_0 - mu_{n/2}.
inline double product_trace_fourier(circulant_kind kind, std::span<const EntrySequence> family, const Monomial& q) {
  if (static_cast<int>(family.size()) < q.m) throw invalid_input("product_trace: family smaller than word alphabet");
  const std::size_t n = family.front().size();
  std::vector<std::vector<std::complex<double>>> hats;
  for (int label = 0; label < q.m; ++label) {
    if (family[label].size() != n) throw invalid_input("product_trace: mismatched dimensions");
    hats.push_back(kind == circulant_kind::symmetric ? detail::dft(detail::symmetric_symbol(family[label].values))
                                                     : detail::dft(family[label].values));
  }
  auto mu = [&](std::size_t k) {
    std::complex<double> r = 1.0;
    for (std::size_t pos = 0; pos < q.word.size(); ++pos) {
      const auto& v = hats[q.word[pos] - 1][k];
      r *= (kind == circulant_kind::reverse && pos % 2 == 1) ? std::conj(v) : v;
    }
    return r;
  };
  double tr = 0;
  if (kind == circulant_kind::symmetric || q.length() % 2 == 0) {
    for (std::size_t k = 0; k < n; ++k) tr += mu(k).real();
  } else {
    tr = mu(0).real() - (n % 2 == 0 ? mu(n / 2).real() : 0.0);
  }
  return tr * std::pow(static_cast<double>(n), -static_cast<double>(q.length()) / 2.0) / static_cast<double>(n);
}

struct PhiEstimate {
  double estimate = 0;
  double std_error = 0;
  std::size_t trials = 0;
};

inline std::size_t& dense_product_limit() {
  static std::size_t limit = 256;
  return limit;
}

// Monte Carlo estimate of phi_n(q) = (1/n) E Tr(q) over independent families
// of m matrices. Seeds derive from (seed, trial, label); the dense product is
// used up to dense_product_limit(), the Fourier route above it.
inline PhiEstimate phi_n_estimate(circulant_kind kind, const Monomial& q, std::size_t n, std::size_t trials,
                                  std::uint64_t seed,
                                  const EntryDistribution& dist = EntryDistribution::gaussian()) {
  if (trials == 0) throw invalid_input("phi_n_estimate: trials must be positive");
  if (n == 0) throw invalid_dimension("phi_n_estimate: n must be positive");
  std::vector<double> values(trials);
  parallel_for(trials, [&](std::size_t t) {
    std::vector<EntrySequence> family;
    for (int label = 0; label < q.m; ++label)
      family.push_back(sample_entries(dist, n, derive_seed(seed, {t, static_cast<std::uint64_t>(label)})));
    values[t] = n <= dense_product_limit() ? product_trace_dense(kind, family, q)
                                           : product_trace_fourier(kind, family, q);
  });
  RunningStats stats;
  for (double v : values) stats.push(v);
  return {stats.mean(), stats.std_error(), trials};
}

}  // namespace circlab
