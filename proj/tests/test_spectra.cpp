#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "circlab/spectra.hpp"

namespace circlab {
namespace {

TEST(EigenvaluesDense, KnownPairs) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  EXPECT_EQ(eigenvalues_dense(a).eigenvalues.size(), 2u);
  EXPECT_NEAR(eigenvalues_dense(a).eigenvalues[0], -1.0, 1e-14);
  EXPECT_NEAR(eigenvalues_dense(a).eigenvalues[1], 1.0, 1e-14);
  for (double v : eigenvalues_dense(Eigen::MatrixXd::Identity(3, 3)).eigenvalues) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(EigenvaluesDense, RejectsAsymmetric) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1 + 1e-9, 0;
  EXPECT_THROW(eigenvalues_dense(a), invalid_input);
  EXPECT_THROW(eigenvalues_dense(Eigen::MatrixXd::Zero(2, 3)), invalid_input);
}

// Characteristic polynomial by Faddeev-LeVerrier, roots by sign-change
// bisection. Independent of both eigen routes.
std::vector<double> charpoly_roots(const Eigen::MatrixXd& a, double lo, double hi) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> c(n + 1);
  c[n] = 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = a * m + c[n - k + 1] * Eigen::MatrixXd::Identity(n, n);
    c[n - k] = -(a * m).trace() / k;
  }
  auto p = [&](double x) {
    double v = 0;
    for (int k = n; k >= 0; --k) v = v * x + c[k];
    return v;
  };
  std::vector<double> roots;
  const double step = 1e-3;
  for (double x = lo; x < hi; x += step) {
    double l = x, r = x + step;
    if (p(l) == 0) { roots.push_back(l); continue; }
    if ((p(l) < 0) == (p(r) < 0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (l + r);
      ((p(l) < 0) == (p(mid) < 0) ? l : r) = mid;
    }
    roots.push_back(0.5 * (l + r));
  }
  return roots;
}

TEST(EigenvaluesDense, ReverseIntegerMatchesCharPoly) {
  EntrySequence x{{1, 2, 3, 4}, {}, 0};
  const Eigen::MatrixXd unscaled = CirculantMatrix(circulant_kind::reverse, x).materialize() * 2.0;
  const auto roots = charpoly_roots(unscaled, -20, 20);
  const auto dense = eigenvalues_dense(unscaled).eigenvalues;
  ASSERT_EQ(roots.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(dense[k], roots[k], 1e-9);
  // the closed form via the DFT of (1,2,3,4): 10, +-2 sqrt 2, 2
  const auto fast = eigenvalues_fast(circulant_kind::reverse, x).eigenvalues;
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(fast[k] * 2.0, roots[k], 1e-9);
}

TEST(EigenvaluesFast, SymmetricScalarIdentity) {
  EntrySequence x{{2.5, 0, 0, 0, 0, 0, 0}, {}, 0};
  for (double v : eigenvalues_fast(circulant_kind::symmetric, x).eigenvalues)
    EXPECT_NEAR(v, 2.5 / std::sqrt(7.0), 1e-14);
}

TEST(EigenvaluesFast, ReverseTwoByTwoClosedForm) {
  const double a = 0.3, b = -1.7;
  EntrySequence x{{a, b}, {}, 0};
  const auto ev = eigenvalues_fast(circulant_kind::reverse, x).eigenvalues;
  EXPECT_NEAR(ev[0], std::min(b + a, b - a) / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(ev[1], std::max(b + a, b - a) / std::sqrt(2.0), 1e-15);
}

class FastVsDense : public ::testing::TestWithParam<circulant_kind> {};

TEST_P(FastVsDense, AgreeOnAllSmallDimensions) {
  for (std::size_t n = 2; n <= 64; ++n) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const CirculantMatrix m(GetParam(), sample_entries(EntryDistribution::gaussian(), n, seed));
      const auto fast = eigenvalues_fast(m).eigenvalues;
      const auto dense = eigenvalues_dense(m.materialize()).eigenvalues;
      ASSERT_EQ(fast.size(), n);
      for (std::size_t k = 0; k < n; ++k) ASSERT_NEAR(fast[k], dense[k], 1e-8) << "n=" << n << " seed=" << seed;
    }
  }
}

TEST_P(FastVsDense, TraceInvariant) {
  const CirculantMatrix m(GetParam(), sample_entries(EntryDistribution::uniform(), 33, 8));
  const auto s = eigenvalues_fast(m);
  double sum = 0;
  for (double v : s.eigenvalues) sum += v;
  const double tr = m.materialize().trace();
  EXPECT_LE(std::abs(sum - tr), 1e-9 * std::max(1.0, std::abs(tr)));
}

INSTANTIATE_TEST_SUITE_P(Kinds, FastVsDense, ::testing::Values(circulant_kind::reverse, circulant_kind::symmetric));

TEST(EsdCdf, Examples) {
  const auto s = make_sample({1.0, -1.0});
  EXPECT_DOUBLE_EQ(esd_cdf(s, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(esd_cdf(s, -2.0), 0.0);
  const auto t = make_sample({0.0, 1.0, 1.0, 3.0});
  EXPECT_DOUBLE_EQ(esd_cdf(t, 1.0), 0.75);  // ties at x count
  EXPECT_DOUBLE_EQ(esd_cdf(t, 3.0), 1.0);
}

TEST(EsdMoment, Examples) {
  const auto s = make_sample({-1.0, 1.0});
  EXPECT_DOUBLE_EQ(esd_moment(s, 2), 1.0);
  EXPECT_DOUBLE_EQ(esd_moment(s, 3), 0.0);
  EXPECT_THROW(esd_moment(s, 0), invalid_input);
}

TEST(EsdMoment, MatchesDenseTracePowers) {
  for (auto kind : {circulant_kind::reverse, circulant_kind::symmetric}) {
    for (std::size_t n : {16u, 57u, 128u}) {
      const CirculantMatrix m(kind, sample_entries(EntryDistribution::gaussian(), n, n));
      const auto s = eigenvalues_fast(m);
      const Eigen::MatrixXd d = m.materialize();
      Eigen::MatrixXd power = d;
      for (int h = 1; h <= 6; ++h) {
        if (h > 1) power = power * d;
        const double want = power.trace() / static_cast<double>(n);
        EXPECT_LE(std::abs(esd_moment(s, h) - want), 1e-8 * std::max(1.0, std::abs(want)))
            << to_string(kind) << " n=" << n << " h=" << h;
      }
      EXPECT_GE(esd_moment(s, 2), 0.0);
    }
  }
}

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int intervals = 200000) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

TEST(LimitLaw, MomentExamples) {
  const LimitLaw rayleigh{law_tag::symmetrized_rayleigh}, gauss{law_tag::standard_gaussian};
  EXPECT_EQ(limit_moment(rayleigh, 4), 2.0);
  EXPECT_EQ(limit_moment(gauss, 6), 15.0);
  EXPECT_EQ(limit_moment(rayleigh, 7), 0.0);
  EXPECT_EQ(limit_moment(gauss, 7), 0.0);
  EXPECT_EQ(limit_moment(rayleigh, 2), 1.0);
  EXPECT_EQ(limit_moment(gauss, 2), 1.0);
}

TEST(LimitLaw, MomentsMatchQuadrature) {
  for (auto tag : {law_tag::symmetrized_rayleigh, law_tag::standard_gaussian}) {
    const LimitLaw law{tag};
    for (int h = 1; h <= 10; ++h) {
      const double q = simpson([&](double x) { return std::pow(x, h) * law.pdf(x); }, -14, 14);
      if (h % 2) {
        EXPECT_EQ(limit_moment(law, h), 0.0);
        EXPECT_NEAR(q, 0.0, 1e-9);
      } else {
        EXPECT_NEAR(q / limit_moment(law, h), 1.0, 1e-6) << to_string(tag) << " h=" << h;
      }
    }
  }
}

TEST(LimitLaw, CdfIsIntegratedPdf) {
  for (auto tag : {law_tag::symmetrized_rayleigh, law_tag::standard_gaussian}) {
    const LimitLaw law{tag};
    EXPECT_NEAR(simpson([&](double x) { return law.pdf(x); }, -6, 6), 1.0, 1e-6);
    double prev = 0;
    for (double x = -8; x <= 8; x += 0.25) {
      const double f = law.cdf(x);
      EXPECT_GE(f, prev);
      prev = f;
      // split at the kink of |x| exp(-x^2)
      double integral = simpson([&](double t) { return law.pdf(t); }, -14, std::min(x, 0.0), 20000);
      if (x > 0) integral += simpson([&](double t) { return law.pdf(t); }, 0, x, 20000);
      EXPECT_NEAR(f, integral, 1e-8);
    }
    EXPECT_NEAR(law.cdf(-40), 0.0, 1e-300);
    EXPECT_NEAR(law.cdf(40), 1.0, 1e-15);
  }
}

double quantile(const LimitLaw& law, double u) {
  if (law.tag == law_tag::symmetrized_rayleigh)
    return u < 0.5 ? -std::sqrt(-std::log(2 * u)) : std::sqrt(-std::log(2 * (1 - u)));
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (law.cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(KsDistance, QuantileSampleIsHalfStep) {
  for (auto tag : {law_tag::symmetrized_rayleigh, law_tag::standard_gaussian}) {
    const LimitLaw law{tag};
    for (std::size_t n : {10u, 1000u}) {
      std::vector<double> v;
      for (std::size_t k = 1; k <= n; ++k) v.push_back(quantile(law, (k - 0.5) / n));
      EXPECT_LE(ks_distance(make_sample(v), law), 0.5 / n + 1e-9);
    }
  }
}

TEST(KsDistance, SinglePointAtMedian) {
  EXPECT_DOUBLE_EQ(ks_distance(make_sample({0.0}), LimitLaw{law_tag::standard_gaussian}), 0.5);
  EXPECT_DOUBLE_EQ(ks_distance(make_sample({0.0}), LimitLaw{law_tag::symmetrized_rayleigh}), 0.5);
  EXPECT_THROW(ks_distance(SpectralSample{}, LimitLaw{law_tag::standard_gaussian}), invalid_input);
}

TEST(KsDistance, TiesUseBothSides) {
  // three equal points at the median: the jump spans 0 -> 1
  EXPECT_DOUBLE_EQ(ks_distance(make_sample({0.0, 0.0, 0.0}), LimitLaw{law_tag::standard_gaussian}), 0.5);
}

TEST(Pool, ConcatenatesWithEqualWeight) {
  std::vector<SpectralSample> s{make_sample({3, 1}), make_sample({2, 0})};
  EXPECT_EQ(pool(s).eigenvalues, (std::vector<double>{0, 1, 2, 3}));
}

}  // namespace
}  // namespace circlab
