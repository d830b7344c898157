#include <cmath>

#include <gtest/gtest.h>

#include "circlab/matrix_core.hpp"

namespace circlab {
namespace {

TEST(SampleEntries, RademacherSupport) {
  const auto x = sample_entries(EntryDistribution::rademacher(), 4, 11);
  ASSERT_EQ(x.size(), 4u);
  for (double v : x.values) EXPECT_TRUE(v == 1.0 || v == -1.0);
}

TEST(SampleEntries, GaussianMeanWithinCltBound) {
  const auto x = sample_entries(EntryDistribution::gaussian(), 10000, 3);
  double mean = 0;
  for (double v : x.values) mean += v;
  mean /= 10000.0;
  EXPECT_LE(std::abs(mean), 5.0 / std::sqrt(10000.0));
}

TEST(SampleEntries, UniformUnitVariance) {
  const auto x = sample_entries(EntryDistribution::uniform(), 20000, 5);
  double m2 = 0;
  for (double v : x.values) {
    EXPECT_LE(std::abs(v), std::sqrt(3.0));
    m2 += v * v;
  }
  EXPECT_NEAR(m2 / 20000.0, 1.0, 0.05);
}

TEST(SampleEntries, IntegerTestSupport) {
  const auto x = sample_entries(EntryDistribution::integer_test({-1, 0, 1}), 5, 9);
  for (double v : x.values) EXPECT_TRUE(v == -1.0 || v == 0.0 || v == 1.0);
}

TEST(SampleEntries, ZeroDimensionRejected) {
  EXPECT_THROW(sample_entries(EntryDistribution::gaussian(), 0, 1), invalid_dimension);
}

TEST(SampleEntries, DeterministicInSeed) {
  for (auto d : {EntryDistribution::gaussian(), EntryDistribution::rademacher(), EntryDistribution::uniform(),
                 EntryDistribution::integer_test({-2, 5}, {3, 1})}) {
    const auto a = sample_entries(d, 257, 42), b = sample_entries(d, 257, 42), c = sample_entries(d, 257, 43);
    EXPECT_EQ(a.values, b.values);
    EXPECT_NE(a.values, c.values);
  }
}

EntrySequence iota(std::size_t n) {
  EntrySequence x;
  for (std::size_t j = 0; j < n; ++j) x.values.push_back(static_cast<double>(j + 10));
  return x;
}

TEST(Entry, ReverseCornerEntries) {
  const CirculantMatrix m(circulant_kind::reverse, iota(4));
  EXPECT_DOUBLE_EQ(m.entry(1, 1), 11.0 / 2);  // X_1
  EXPECT_DOUBLE_EQ(m.entry(1, 4), 10.0 / 2);  // x_4 identified with X_0
}

TEST(Entry, SymmetricDiagonalIsX0) {
  for (std::size_t n : {1u, 2u, 5u, 8u}) {
    const CirculantMatrix m(circulant_kind::symmetric, iota(n));
    for (std::size_t i = 1; i <= n; ++i) EXPECT_DOUBLE_EQ(m.entry(i, i), 10.0 / std::sqrt(double(n)));
  }
}

TEST(Entry, OutOfRange) {
  const CirculantMatrix m(circulant_kind::reverse, iota(3));
  EXPECT_THROW(m.entry(0, 1), index_error);
  EXPECT_THROW(m.entry(1, 4), index_error);
}

TEST(Materialize, ReverseTwoByTwo) {
  EntrySequence x{{3.0, 7.0}, {}, 0};  // X_0 = 3, X_1 = 7
  const auto d = CirculantMatrix(circulant_kind::reverse, x).materialize();
  const double s = std::sqrt(2.0);
  EXPECT_DOUBLE_EQ(d(0, 0), 7 / s);
  EXPECT_DOUBLE_EQ(d(0, 1), 3 / s);
  EXPECT_DOUBLE_EQ(d(1, 0), 3 / s);
  EXPECT_DOUBLE_EQ(d(1, 1), 7 / s);
}

TEST(Materialize, SymmetricThreeByThree) {
  EntrySequence x{{2.0, 5.0, 99.0}, {}, 0};
  const auto d = CirculantMatrix(circulant_kind::symmetric, x).materialize();
  const double s = std::sqrt(3.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(d(i, j), (i == j ? 2.0 : 5.0) / s);
}

TEST(Materialize, CapEnforced) {
  const std::size_t saved = dense_cap();
  dense_cap() = 8;
  EXPECT_THROW(CirculantMatrix(circulant_kind::reverse, iota(9)).materialize(), resource_error);
  dense_cap() = saved;
}

class StructureProperty : public ::testing::TestWithParam<circulant_kind> {};

TEST_P(StructureProperty, SymmetricAndRowRotation) {
  const auto kind = GetParam();
  for (std::size_t n = 1; n <= 64; n += 7) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto d = CirculantMatrix(kind, sample_entries(EntryDistribution::gaussian(), n, seed)).materialize();
      EXPECT_TRUE(d == d.transpose());
      for (std::size_t r = 0; r + 1 < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          // reverse: left rotation; symmetric: right rotation
          const std::size_t src = kind == circulant_kind::reverse ? (c + 1) % n : (c + n - 1) % n;
          ASSERT_EQ(d(r + 1, c), d(r, src));
        }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, StructureProperty,
                         ::testing::Values(circulant_kind::reverse, circulant_kind::symmetric));

}  // namespace
}  // namespace circlab
