#include <gtest/gtest.h>

#include <random>

#include "maple/maple.hpp"
#include "test_support.hpp"

using namespace maple;
namespace mt = maple::testing;

namespace {

Box cube(std::size_t n, std::int64_t lo, std::int64_t hi) {
  return Box{IntVector(n, lo), IntVector(n, hi)};
}

IntVector random_vector(std::mt19937_64& rng, std::size_t n, std::int64_t lo, std::int64_t hi) {
  IntVector v(n);
  for (auto& x : v) x = mt::uniform_int(rng, lo, hi);
  return v;
}

}  // namespace

TEST(Conforms, Examples) {
  EXPECT_TRUE(conforms(IntVector{1, -1}, IntVector{2, -2}));
  EXPECT_FALSE(conforms(IntVector{1, 1}, IntVector{2, -2}));
  EXPECT_TRUE(conforms(IntVector{0, 0}, IntVector{5, -3}));
  EXPECT_FALSE(conforms(IntVector{2, 0}, IntVector{1, 0}));
  EXPECT_FALSE(conforms(IntVector{1, 0}, IntVector{0, 0}));
}

TEST(Conforms, LengthMismatch) {
  EXPECT_THROW(conforms(IntVector{1}, IntVector{1, 2}), Error);
}

TEST(Conforms, PartialOrderProperties) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto x = random_vector(rng, 3, -2, 2);
    const auto y = random_vector(rng, 3, -2, 2);
    const auto z = random_vector(rng, 3, -2, 2);
    ASSERT_TRUE(conforms(x, x));
    if (conforms(x, y) && conforms(y, x)) {
      ASSERT_EQ(x, y);
    }
    if (conforms(x, y) && conforms(y, z)) {
      ASSERT_TRUE(conforms(x, z));
    }
  }
}

TEST(KernelEnumeration, SumOfTwo) {
  const auto s = enumerate_kernel_in_box(IntegerMatrix{{1, 1}}, cube(2, -2, 2));
  EXPECT_EQ(s, (DirectionSet{{-2, 2}, {-1, 1}, {1, -1}, {2, -2}}));
}

TEST(KernelEnumeration, NonnegativeBoxHasNoSignUniformPoint) {
  EXPECT_TRUE(enumerate_kernel_in_box(IntegerMatrix{{1, 1}}, cube(2, 0, 2)).empty());
}

TEST(KernelEnumeration, OneTwo) {
  const auto s = enumerate_kernel_in_box(IntegerMatrix{{1, 2}}, cube(2, -2, 2));
  EXPECT_EQ(s, (DirectionSet{{-2, 1}, {2, -1}}));
}

TEST(KernelEnumeration, MatchesOdometerOnRandomSystems) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng() % 4;
    const std::size_t m = 1 + rng() % (n - 1);
    const IntegerMatrix a = mt::random_full_row_rank(rng, m, n, -3, 3);
    const Box box = cube(n, -2, 2);
    DirectionSet expected;
    mt::for_each_box_point(box.lo, box.hi, [&](const IntVector& g) {
      if (!is_zero(g) && mt::in_kernel(a, g)) expected.insert(g);
    });
    ASSERT_EQ(enumerate_kernel_in_box(a, box), expected);
  }
}

TEST(KernelEnumeration, BudgetGuards) {
  const IntegerMatrix wide = IntegerMatrix::from_rows(std::vector<IntVector>{IntVector(30, 1)});
  try {
    enumerate_kernel_in_box(wide, cube(30, -1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
  EnumerationLimits tiny;
  tiny.node_budget = 10;
  EXPECT_THROW(enumerate_kernel_in_box(IntegerMatrix{{1, 1, 1}}, cube(3, -3, 3), tiny), Error);
}

TEST(GraverOracle, Examples) {
  EXPECT_EQ(graver_oracle(IntegerMatrix{{1, 1}}, cube(2, -3, 3)), (DirectionSet{{-1, 1}, {1, -1}}));
  EXPECT_EQ(graver_oracle(IntegerMatrix{{1, 1, 1}}, cube(3, -2, 2)),
            (DirectionSet{{-1, 0, 1}, {-1, 1, 0}, {0, -1, 1}, {0, 1, -1}, {1, -1, 0}, {1, 0, -1}}));
  EXPECT_EQ(graver_oracle(IntegerMatrix{{1, 2}}, cube(2, -4, 4)), (DirectionSet{{-2, 1}, {2, -1}}));
}

TEST(GraverOracle, PrimitiveCircuitsOfOneTwoThree) {
  // Graver basis of (1 2 3) is known to be ±{(2,-1,0),(3,0,-1),(1,1,-1),(1,-2,1),(0,3,-2)}.
  const auto g = graver_oracle(IntegerMatrix{{1, 2, 3}}, cube(3, -3, 3));
  EXPECT_EQ(g, (DirectionSet{{-3, 0, 1}, {-2, 1, 0}, {-1, -1, 1}, {-1, 2, -1}, {0, -3, 2},
                             {0, 3, -2}, {1, -2, 1}, {1, 1, -1}, {2, -1, 0}, {3, 0, -1}}));
}

TEST(GraverOracle, MinimalCompleteSymmetric) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 3 + rng() % 3;
    const std::size_t m = 1 + rng() % 2;
    const IntegerMatrix a = mt::random_full_row_rank(rng, m, n, -3, 3);
    const Box box = cube(n, -3, 3);
    const auto kernel = enumerate_kernel_in_box(a, box);
    const auto graver = graver_oracle(a, box);
    for (const auto& g : graver) {
      ASSERT_TRUE(graver.count(negated(g)));
      for (const auto& h : graver)
        if (h != g) {
          ASSERT_FALSE(conforms(h, g));
        }
    }
    for (const auto& y : kernel) {
      bool dominated = false;
      for (const auto& g : graver) dominated = dominated || conforms(g, y);
      ASSERT_TRUE(dominated);
    }
  }
}

TEST(Isomorphism, ToAmbientExamples) {
  const IntegerMatrix b{{1}, {-1}};
  EXPECT_EQ(to_ambient(b, IntVector{3}), (IntVector{3, -3}));
  EXPECT_EQ(to_ambient(b, IntVector{0}), (IntVector{0, 0}));
  EXPECT_THROW(to_ambient(b, IntVector{1, 2}), Error);
  const IntegerMatrix a{{1, 2}};
  const auto g = to_ambient(kernel_lattice_basis(a), IntVector{1});
  EXPECT_EQ(g[0] + 2 * g[1], 0);
  EXPECT_FALSE(is_zero(g));
}

TEST(Isomorphism, ToCoordsExamples) {
  const IntegerMatrix b{{1}, {-1}};
  const auto z = to_coords_exact(b, IntVector{3, -3});
  ASSERT_EQ(z.size(), 1u);
  EXPECT_EQ(z[0], 3);
  // (1, 1) is orthogonal to range(B).
  EXPECT_EQ(to_coords_exact(b, IntVector{1, 1})[0], 0);
  const auto zf = to_coords(b, std::vector<double>{3.0, -3.0});
  EXPECT_DOUBLE_EQ(zf[0], 3.0);
  EXPECT_THROW(to_coords_exact(IntegerMatrix{{1, 2}, {1, 2}}, IntVector{1, 1}), Error);
}

TEST(Isomorphism, AdditiveAndRoundTrip) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng() % 5;
    const std::size_t m = 1 + rng() % (n - 1);
    const IntegerMatrix a = mt::random_full_row_rank(rng, m, n, -4, 4);
    const IntegerMatrix b = lll_reduce(kernel_lattice_basis(a));
    const auto z1 = random_vector(rng, n - m, -5, 5);
    const auto z2 = random_vector(rng, n - m, -5, 5);
    IntVector sum(n - m);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = z1[i] + z2[i];
    const auto g1 = to_ambient(b, z1);
    const auto g2 = to_ambient(b, z2);
    IntVector gs(n);
    for (std::size_t i = 0; i < n; ++i) gs[i] = g1[i] + g2[i];
    ASSERT_EQ(to_ambient(b, sum), gs);
    ASSERT_TRUE(mt::in_kernel(a, g1));
    const auto back = to_coords_exact(b, g1);
    for (std::size_t i = 0; i < z1.size(); ++i) ASSERT_EQ(back[i], Rational(to_integer(z1[i])));
  }
}
