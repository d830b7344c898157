#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "circlab/joint.hpp"

namespace circlab {
namespace {

// All words of length 1..max_len over labels 1..m.
std::vector<Monomial> all_words(int max_len, int m) {
  std::vector<Monomial> out;
  for (int len = 1; len <= max_len; ++len) {
    std::vector<int> w(len, 1);
    while (true) {
      out.emplace_back(w, m);
      int pos = 0;
      while (pos < len && w[pos] == m) w[pos++] = 1;
      if (pos == len) break;
      ++w[pos];
    }
  }
  return out;
}

TEST(SymmetryProfile, Examples) {
  const auto a = symmetry_profile(Monomial::of({1, 2, 2, 1}));
  EXPECT_EQ(a.odd, (std::vector<int>{1, 1}));
  EXPECT_EQ(a.even, (std::vector<int>{1, 1}));
  EXPECT_TRUE(a.symmetric);
  const auto b = symmetry_profile(Monomial::of({1, 2, 1, 2}));
  EXPECT_EQ(b.odd[0], 2);
  EXPECT_EQ(b.even[0], 0);
  EXPECT_FALSE(b.symmetric);
  EXPECT_TRUE(symmetry_profile(Monomial::of({1, 1})).symmetric);
  for (const auto& q : all_words(5, 3)) {
    const auto p = symmetry_profile(q);
    int total = 0;
    for (int i = 0; i < q.m; ++i) total += p.even[i] + p.odd[i];
    EXPECT_EQ(total, static_cast<int>(q.length()));
  }
}

TEST(Monomial, Validation) {
  EXPECT_THROW(Monomial({}, 2), invalid_input);
  EXPECT_THROW(Monomial({1, 3}, 2), invalid_input);
  EXPECT_THROW(Monomial({0}, 2), invalid_input);
}

TEST(LimitPhi, Examples) {
  EXPECT_EQ(rc_limit_phi(Monomial::of({1, 2, 2, 1})), 1.0);
  EXPECT_EQ(rc_limit_phi(Monomial::of({1, 2, 1, 2})), 0.0);
  EXPECT_EQ(rc_limit_phi(Monomial::of({1, 1, 1, 1})), 2.0);
  EXPECT_EQ(rc_limit_phi(Monomial::of({1, 1, 1})), 0.0);
  EXPECT_EQ(sc_limit_phi(Monomial::of({1, 2, 1, 2})), 1.0);
  EXPECT_EQ(sc_limit_phi(Monomial::of({1, 1, 1, 1})), 3.0);
  EXPECT_EQ(sc_limit_phi(Monomial::of({1, 1, 2})), 0.0);
}

TEST(ModelPhi, Examples) {
  EXPECT_EQ(half_independent_model_phi(Monomial::of({1, 1})), 1.0);
  EXPECT_EQ(half_independent_model_phi(Monomial::of({1, 2, 1, 2})), 0.0);
  EXPECT_EQ(half_independent_model_phi(Monomial::of({1, 1, 1, 1})), 2.0);
  EXPECT_EQ(half_independent_model_phi(Monomial::of({1, 1, 1})), 0.0);
}

TEST(ModelPhi, EqualsLimitFormulaOnAllShortWords) {
  for (const auto& q : all_words(6, 3))
    ASSERT_TRUE(half_independent_model_phi_exact(q) == rational(static_cast<long long>(rc_limit_phi(q))))
        << to_string(q);
}

TEST(LimitPhi, HalfCommutationInvariance) {
  for (const auto& q : all_words(6, 3)) {
    for (std::size_t p = 0; p + 2 < q.length(); ++p) {
      auto w = q.word;
      std::swap(w[p], w[p + 2]);
      EXPECT_EQ(rc_limit_phi(Monomial(w, q.m)), rc_limit_phi(q)) << to_string(q);
    }
  }
}

TEST(LimitPhi, ScPermutationInvarianceAndFactorisation) {
  for (const auto& q : all_words(6, 3)) {
    auto w = q.word;
    std::sort(w.begin(), w.end());
    do {
      ASSERT_EQ(sc_limit_phi(Monomial(w, q.m)), sc_limit_phi(q));
    } while (std::next_permutation(w.begin(), w.end()));
    double product = 1;
    for (int label = 1; label <= q.m; ++label) {
      const auto c = std::count(q.word.begin(), q.word.end(), label);
      if (c > 0) product *= sc_limit_phi(Monomial(std::vector<int>(c, 1), 1));
    }
    EXPECT_EQ(sc_limit_phi(q), product) << to_string(q);
  }
}

TEST(LimitPhi, SingleMatrixWordsGiveLimitMoments) {
  for (int h = 1; h <= 10; ++h) {
    const Monomial q(std::vector<int>(h, 1), 1);
    EXPECT_EQ(rc_limit_phi(q), limit_moment(LimitLaw{law_tag::symmetrized_rayleigh}, h));
    EXPECT_EQ(sc_limit_phi(q), limit_moment(LimitLaw{law_tag::standard_gaussian}, h));
  }
}

TEST(ProductTrace, FourierMatchesDense) {
  for (auto kind : {circulant_kind::reverse, circulant_kind::symmetric})
    for (std::size_t n : {1u, 2u, 7u, 16u, 31u}) {
      std::vector<EntrySequence> family;
      for (int label = 0; label < 3; ++label)
        family.push_back(sample_entries(EntryDistribution::gaussian(), n, 10 * n + label));
      for (const auto& q : all_words(5, 3)) {
        const double d = product_trace_dense(kind, family, q), f = product_trace_fourier(kind, family, q);
        ASSERT_NEAR(f, d, 1e-10 * std::max(1.0, std::abs(d))) << to_string(kind) << " n=" << n << " " << to_string(q);
      }
    }
}

TEST(PhiEstimate, MonteCarloExamples) {
  const auto rc11 = phi_n_estimate(circulant_kind::reverse, Monomial::of({1, 1}), 500, 100, 1);
  EXPECT_LE(std::abs(rc11.estimate - 1.0), 3 * rc11.std_error + 1e-12);
  const auto rc1212 = phi_n_estimate(circulant_kind::reverse, Monomial::of({1, 2, 1, 2}), 500, 100, 2);
  EXPECT_LE(std::abs(rc1212.estimate), 3 * rc1212.std_error);
  const auto sc1212 = phi_n_estimate(circulant_kind::symmetric, Monomial::of({1, 2, 1, 2}), 500, 100, 3);
  EXPECT_LE(std::abs(sc1212.estimate - 1.0), 3 * sc1212.std_error);
}

TEST(PhiEstimate, DeterministicAndValidated) {
  const auto q = Monomial::of({1, 2, 2, 1});
  const auto a = phi_n_estimate(circulant_kind::reverse, q, 64, 30, 77);
  const auto b = phi_n_estimate(circulant_kind::reverse, q, 64, 30, 77);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_THROW(phi_n_estimate(circulant_kind::reverse, q, 64, 0, 1), invalid_input);
}

TEST(PhiEstimate, DenseAndFourierPathsAgree) {
  const auto q = Monomial::of({1, 2, 2, 1, 3});
  const std::size_t saved = dense_product_limit();
  const auto dense = phi_n_estimate(circulant_kind::reverse, q, 40, 20, 5);
  dense_product_limit() = 0;
  const auto fourier = phi_n_estimate(circulant_kind::reverse, q, 40, 20, 5);
  dense_product_limit() = saved;
  EXPECT_NEAR(dense.estimate, fourier.estimate, 1e-10);
}

}  // namespace
}  // namespace circlab
