#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "circlab/error.hpp"
#include "circlab/matrix_core.hpp"

namespace circlab {

// Eigenvalues of one matrix draw, sorted ascending.
struct SpectralSample {
  std::vector<double> eigenvalues;

  std::size_t n() const noexcept { return eigenvalues.size(); }
};

inline SpectralSample make_sample(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {std::move(values)};
}

// Multi-trial pooling: every trial contributes its n points with equal weight.
inline SpectralSample pool(std::span<const SpectralSample> samples) {
  std::vector<double> all;
  std::size_t total = 0;
  for (const auto& s : samples) total += s.n();
  all.reserve(total);
  for (const auto& s : samples) all.insert(all.end(), s.eigenvalues.begin(), s.eigenvalues.end());
  return make_sample(std::move(all));
}

inline SpectralSample eigenvalues_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw invalid_input("eigenvalues_dense: matrix is not square");
  if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw invalid_input("eigenvalues_dense: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw invalid_input("eigenvalues_dense: solver did not converge");
  const auto& ev = solver.eigenvalues();
  return make_sample(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

namespace detail {

// hat[k] = sum_d x[d] exp(-2 pi i d k / n)
inline std::vector<std::complex<double>> dft(std::span<const double> x) {
  std::vector<std::complex<double>> in(x.begin(), x.end()), out;
  if (in.size() < 2) return in;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  return out;
}

// First row of the symmetric circulant: s_d = X_{min(d, n-d)}.
inline std::vector<double> symmetric_symbol(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> s(n);
  for (std::size_t d = 0; d < n; ++d) s[d] = x[std::min(d, n - d)];
  return s;
}

}  // namespace detail

// Closed-form spectrum through the DFT of the defining sequence.
//
// Symmetric kind is an ordinary circulant, so its eigenvalues are the DFT of
// its symbol. The reverse kind factors as C_x J with J the involution
// c -> -c-1 (mod n); on span{v_k, v_-k} it acts as an anti-diagonal block,
// giving +-|x^_k| for 0 < k < n/2, x^_0, and -x^_{n/2} when n is even.
inline SpectralSample eigenvalues_fast(circulant_kind kind, const EntrySequence& x) {
  const std::size_t n = x.size();
  if (n == 0) throw invalid_dimension("eigenvalues_fast: empty sequence");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> ev;
  ev.reserve(n);
  if (kind == circulant_kind::symmetric) {
    const auto s = detail::symmetric_symbol(x.values);
    for (const auto& c : detail::dft(s)) ev.push_back(c.real() * scale);
  } else {
    const auto hat = detail::dft(x.values);
    ev.push_back(hat[0].real() * scale);
    for (std::size_t k = 1; 2 * k < n; ++k) {
      const double r = std::abs(hat[k]) * scale;
      ev.push_back(r);
      ev.push_back(-r);
    }
    if (n % 2 == 0) ev.push_back(-hat[n / 2].real() * scale);
  }
  return make_sample(std::move(ev));
}

inline SpectralSample eigenvalues_fast(const CirculantMatrix& m) {
  return eigenvalues_fast(m.kind(), m.entries());
}

// Fraction of eigenvalues <= x.
inline double esd_cdf(const SpectralSample& s, double x) {
  if (s.n() == 0) return 0.0;
  const auto it = std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), x);
  return static_cast<double>(it - s.eigenvalues.begin()) / static_cast<double>(s.n());
}

inline double esd_moment(const SpectralSample& s, int h) {
  if (h < 1) throw invalid_input("esd_moment: h must be positive");
  if (s.n() == 0) throw invalid_input("esd_moment: empty sample");
  double acc = 0.0;
  for (double v : s.eigenvalues) acc += std::pow(v, h);
  return acc / static_cast<double>(s.n());
}

enum class law_tag { symmetrized_rayleigh, standard_gaussian };

inline std::string_view to_string(law_tag t) {
  return t == law_tag::symmetrized_rayleigh ? "symmetrized-rayleigh" : "standard-gaussian";
}

// Limit laws of the two ensembles: reverse -> density |x| exp(-x^2),
// symmetric -> standard normal.
struct LimitLaw {
  law_tag tag;

  double cdf(double x) const {
    if (tag == law_tag::standard_gaussian) return 0.5 * std::erfc(-x / std::numbers::sqrt2);
    const double tail = 0.5 * std::exp(-x * x);
    return x < 0 ? tail : 1.0 - tail;
  }

  double pdf(double x) const {
    if (tag == law_tag::standard_gaussian)
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return std::abs(x) * std::exp(-x * x);
  }

  double moment(int h) const;
};

inline LimitLaw law_for(circulant_kind kind) {
  return {kind == circulant_kind::reverse ? law_tag::symmetrized_rayleigh : law_tag::standard_gaussian};
}

// p! for h = 2p under the Rayleigh law, (2p)!/(2^p p!) under the Gaussian law,
// zero for odd h.
inline double limit_moment(const LimitLaw& law, int h) {
  if (h < 1) throw invalid_input("limit_moment: h must be positive");
  if (h % 2 == 1) return 0.0;
  const int p = h / 2;
  double m = 1.0;
  if (law.tag == law_tag::symmetrized_rayleigh) {
    for (int k = 2; k <= p; ++k) m *= k;
  } else {
    for (int k = 2 * p - 1; k > 1; k -= 2) m *= k;
  }
  return m;
}

inline double LimitLaw::moment(int h) const { return limit_moment(*this, h); }

// Two-sided KS distance between the sample ECDF and a continuous law. At each
// distinct sample value both the left limit and the value of the ECDF are
// compared against the law's CDF.
inline double ks_distance(const SpectralSample& s, const LimitLaw& law) {
  const auto& v = s.eigenvalues;
  if (v.empty()) throw invalid_input("ks_distance: empty sample");
  const double N = static_cast<double>(v.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double f = law.cdf(v[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / N), std::abs(static_cast<double>(j) / N - f)});
    i = j;
  }
  return d;
}

}  // namespace circlab
