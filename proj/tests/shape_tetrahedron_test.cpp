#include "fourbody/shape_tetrahedron.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/test_helpers.hpp"

namespace fourbody {
namespace {

using testing::brute_force_cubic_roots;
using testing::random_masses;

TEST(MassQuadruple, SortsDescendingAndRemembersPermutation) {
  const auto q = MassQuadruple::fromUnordered({2.0, 4.0, 1.0, 3.0});
  EXPECT_DOUBLE_EQ(q.m(0), 4.0);
  EXPECT_DOUBLE_EQ(q.m(1), 3.0);
  EXPECT_DOUBLE_EQ(q.m(2), 2.0);
  EXPECT_DOUBLE_EQ(q.m(3), 1.0);
  EXPECT_EQ(q.userIndex(0), 1);
  EXPECT_EQ(q.userIndex(3), 2);

  Matrix34d user = Matrix34d::Zero();
  for (int i = 0; i < 4; ++i) user(0, i) = static_cast<double>(i);
  const Matrix34d canon = q.toCanonical(user);
  EXPECT_DOUBLE_EQ(canon(0, 0), 1.0);  // heaviest body was user column 1
  const Matrix34d back = q.toUser(canon);
  EXPECT_EQ(back, user);
}

TEST(MassQuadruple, RejectsNonPositive) {
  EXPECT_THROW(MassQuadruple::fromUnordered({1.0, -1.0, 2.0, 3.0}), std::invalid_argument);
  EXPECT_THROW(MassQuadruple::fromUnordered({1.0, 0.0, 2.0, 3.0}), std::invalid_argument);
}

TEST(ReducedMass, EqualMassCases) {
  const auto ones = MassQuadruple::fromUnordered({1.0, 1.0, 1.0, 1.0});
  EXPECT_NEAR(reduced_mass(ones), std::pow(4.0, -1.0 / 3.0), 1e-15);
  const auto twos = MassQuadruple::fromUnordered({2.0, 2.0, 2.0, 2.0});
  EXPECT_NEAR(reduced_mass(twos), std::cbrt(2.0), 1e-15);
}

TEST(ReducedMass, ReferenceMassesRegression) {
  const auto q = MassQuadruple::fromUnordered(
      {0.428260218865972, 0.355184464717379, 0.261905866491155, 0.113826160081235});
  EXPECT_NEAR(reduced_mass(q), 0.15756743083294925, 1e-15);
}

TEST(CharacteristicCubic, InterlacesFourThreeTwoOne) {
  const auto q = MassQuadruple::fromUnordered({4.0, 3.0, 2.0, 1.0});
  const CubicRoots r = characteristic_cubic_roots(q);
  EXPECT_GT(4.0, r.x_a);
  EXPECT_GT(r.x_a, 3.0);
  EXPECT_GT(3.0, r.x_b);
  EXPECT_GT(r.x_b, 2.0);
  EXPECT_GT(2.0, r.x_c);
  EXPECT_GT(r.x_c, 1.0);

  const auto oracle = brute_force_cubic_roots(q, 0.5, 4.5);
  ASSERT_EQ(oracle.size(), 3u);
  EXPECT_NEAR(r.x_c, oracle[0], 1e-12);
  EXPECT_NEAR(r.x_b, oracle[1], 1e-12);
  EXPECT_NEAR(r.x_a, oracle[2], 1e-12);
}

TEST(CharacteristicCubic, RootsAreCriticalPointsOfInverseMassPolynomial) {
  // 1/x_a, 1/x_b, 1/x_c are the critical points of
  // (y - 1/m1)(y - 1/m2)(y - 1/m3)(y - 1/m4).
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q = MassQuadruple::fromUnordered(random_masses(rng));
    const CubicRoots r = characteristic_cubic_roots(q);
    for (double x : {r.x_a, r.x_b, r.x_c}) {
      const double y = 1.0 / x;
      double dp = 0.0;
      for (int i = 0; i < 4; ++i) {
        double term = 1.0;
        for (int j = 0; j < 4; ++j) {
          if (j != i) term *= y - 1.0 / q.m(j);
        }
        dp += term;
      }
      EXPECT_NEAR(dp, 0.0, 1e-10) << "root " << x;
    }
  }
}

TEST(CharacteristicCubic, EqualMassesRejected) {
  const auto q = MassQuadruple::fromUnordered({1.0, 1.0, 2.0, 3.0});
  EXPECT_THROW(characteristic_cubic_roots(q), DegenerateMasses);
  const auto close = MassQuadruple::fromUnordered({1.0, 1.0 + 1e-12, 2.0, 3.0});
  EXPECT_THROW(characteristic_cubic_roots(close), DegenerateMasses);
}

TEST(ShapeTetrahedron, ResidualRelativeToleranceHolds) {
  const auto q = MassQuadruple::fromUnordered({4.0, 3.0, 2.0, 1.0});
  const ShapeTetrahedron tet = build_shape_tetrahedron(q);
  const IdentityReport rep = validate_shape_identities(tet, q);
  EXPECT_TRUE(rep.allPass()) << "max residual " << rep.maxResidual();

  // column 1 norm^2 = mu (1/m1 - 1/m_total)
  const double mu = tet.mu;
  EXPECT_NEAR(tet.E.col(0).squaredNorm(), mu * (0.25 - 0.1), 1e-13);
  EXPECT_NEAR(mu, std::cbrt(2.4), 1e-15);
}

TEST(ShapeTetrahedron, SignPatternExact) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = MassQuadruple::fromUnordered(random_masses(rng));
    const ShapeTetrahedron tet = build_shape_tetrahedron(q);
    const int neg_per_row[3] = {3, 2, 1};
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 4; ++col) {
        const bool expect_negative = col >= 4 - neg_per_row[row];
        EXPECT_EQ(tet.E(row, col) < 0.0, expect_negative)
            << "row " << row << " col " << col;
      }
    }
    EXPECT_TRUE((tet.normalizers.array() > 0.0).all());
  }
}

TEST(ShapeTetrahedron, EdgesAndVolume) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = MassQuadruple::fromUnordered(random_masses(rng));
    const ShapeTetrahedron tet = build_shape_tetrahedron(q);
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const double want = std::sqrt(tet.mu * (1.0 / q.m(i) + 1.0 / q.m(j)));
        const double got = (tet.E.col(i) - tet.E.col(j)).norm();
        EXPECT_LT(testing::rel_diff(got, want), 1e-12);
      }
    }
    Eigen::Matrix3d span;
    for (int j = 0; j < 3; ++j) span.col(j) = tet.E.col(j + 1) - tet.E.col(0);
    EXPECT_NEAR(std::abs(span.determinant()) / 6.0, 1.0 / 6.0, 1e-12);
  }
}

TEST(ShapeTetrahedron, RandomSweepInterlacingAndIdentities) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const auto q = MassQuadruple::fromUnordered(random_masses(rng));
    const CubicRoots r = characteristic_cubic_roots(q);
    EXPECT_TRUE(q.m(0) > r.x_a && r.x_a > q.m(1) && q.m(1) > r.x_b && r.x_b > q.m(2) &&
                q.m(2) > r.x_c && r.x_c > q.m(3));
    const ShapeTetrahedron tet = build_shape_tetrahedron(q);
    const IdentityReport rep = validate_shape_identities(tet, q);
    EXPECT_TRUE(rep.allPass()) << "max residual " << rep.maxResidual();
  }
}

TEST(ShapeTetrahedron, PermutationInvariance) {
  const auto sorted = MassQuadruple::fromUnordered({4.0, 3.0, 2.0, 1.0});
  const auto shuffled = MassQuadruple::fromUnordered({2.0, 1.0, 4.0, 3.0});
  const ShapeTetrahedron a = build_shape_tetrahedron(sorted);
  const ShapeTetrahedron b = build_shape_tetrahedron(shuffled);
  EXPECT_EQ(a.E, b.E);
  EXPECT_EQ(shuffled.userIndex(0), 2);
}

TEST(IdentityReport, PerturbationIsFlagged) {
  const auto q = MassQuadruple::fromUnordered({4.0, 3.0, 2.0, 1.0});
  ShapeTetrahedron tet = build_shape_tetrahedron(q);
  tet.E(1, 2) += 1e-6;
  const IdentityReport rep = validate_shape_identities(tet, q);
  EXPECT_FALSE(rep.allPass());
  EXPECT_GT(rep.maxResidual(), 1e-7);
}

}  // namespace
}  // namespace fourbody
