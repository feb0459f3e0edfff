#include "fourbody/transforms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fourbody/central_config.hpp"
#include "support/test_helpers.hpp"

namespace fourbody {
namespace {

using testing::random_descending_scales;
using testing::random_masses;
using testing::random_rotation;
using testing::random_vector;

ShapeTetrahedron fourThreeTwoOne() {
  return build_shape_tetrahedron(MassQuadruple::fromUnordered({4.0, 3.0, 2.0, 1.0}));
}

TEST(ForwardTransform, IdentityGivesE) {
  const ShapeTetrahedron tet = fourThreeTwoOne();
  CoordinateDecomposition dec;  // G = G' = I, R = 1
  const Matrix34d X = forward_transform(tet, dec);
  EXPECT_LT((X - tet.E).cwiseAbs().maxCoeff(), 1e-15);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double want = std::sqrt(tet.mu * (1.0 / tet.masses.m(i) + 1.0 / tet.masses.m(j)));
      EXPECT_NEAR((X.col(i) - X.col(j)).norm(), want, 1e-13);
    }
  }
}

TEST(ForwardTransform, EquilateralScalesGiveSqrtTwoEdges) {
  const ShapeTetrahedron tet = fourThreeTwoOne();
  CoordinateDecomposition dec;
  dec.R = (tet.roots.vec() / tet.mu).cwiseSqrt();
  const Matrix34d X = forward_transform(tet, dec);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      EXPECT_NEAR((X.col(i) - X.col(j)).norm(), std::sqrt(2.0), 1e-13);
    }
  }
}

TEST(ForwardTransform, OutputIsCenterOfMassFrame) {
  std::mt19937_64 rng(5);
  const ShapeTetrahedron tet = fourThreeTwoOne();
  for (int trial = 0; trial < 20; ++trial) {
    CoordinateDecomposition dec;
    dec.G = random_rotation(rng);
    dec.Gp = random_rotation(rng);
    dec.R = random_descending_scales(rng);
    const Matrix34d X = forward_transform(tet, dec);
    EXPECT_LT((X * tet.masses.values()).norm(), 1e-13);
  }
}

TEST(Decompose, RoundTripOnRandomStates) {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto q = MassQuadruple::fromUnordered(random_masses(rng));
    const ShapeTetrahedron tet = build_shape_tetrahedron(q);
    CoordinateDecomposition in;
    in.G = random_rotation(rng);
    in.Gp = random_rotation(rng);
    in.R = random_descending_scales(rng);
    const Matrix34d X = forward_transform(tet, in);

    const CoordinateDecomposition out = decompose_configuration(X, tet);
    EXPECT_FALSE(out.gauge_ambiguous);
    EXPECT_LT((out.R - in.R).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_NEAR(out.G.determinant(), 1.0, 1e-12);
    EXPECT_NEAR(out.Gp.determinant(), 1.0, 1e-12);
    EXPECT_LT((out.G.transpose() * out.G - Eigen::Matrix3d::Identity()).norm(), 1e-12);

    const Matrix34d X2 = forward_transform(tet, out);
    worst = std::max(worst, (X2 - X).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Decompose, IdentityCase) {
  const ShapeTetrahedron tet = fourThreeTwoOne();
  CoordinateDecomposition in;
  in.R = Eigen::Vector3d(1.0, 1.0, 1.0);
  const CoordinateDecomposition out = decompose_configuration(tet.E, tet);
  // R1 = R2 = R3 makes the rotation split non-unique; invariants only.
  EXPECT_TRUE(out.gauge_ambiguous);
  EXPECT_LT((out.R - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix34d X2 = forward_transform(tet, out);
  EXPECT_LT((X2 - tet.E).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Decompose, PlanarConfigurationFlagsRankDeficiency) {
  const ShapeTetrahedron tet = fourThreeTwoOne();
  CoordinateDecomposition in;
  in.R = Eigen::Vector3d(1.3, 0.8, 0.0);
  in.Gp = Eigen::AngleAxisd(0.4, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const Matrix34d X = forward_transform(tet, in);
  const CoordinateDecomposition out = decompose_configuration(X, tet);
  EXPECT_TRUE(out.planar);
  EXPECT_TRUE(out.gauge_ambiguous);
  EXPECT_FALSE(out.collinear);
  EXPECT_NEAR(out.R[2], 0.0, 1e-12);
  // gauge-invariant content still matches
  const Matrix34d X2 = forward_transform(tet, out);
  EXPECT_LT((X2 - X).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Decompose, MirrorConfigurationCarriesSignOnR3) {
  const ShapeTetrahedron tet = fourThreeTwoOne();
  const Matrix34d X = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal() *
                      Eigen::Vector3d(3.0, 2.0, 1.0).asDiagonal() * tet.E;
  const CoordinateDecomposition out = decompose_configuration(X, tet);
  EXPECT_LT(out.R[2], 0.0);
  EXPECT_NEAR(out.G.determinant(), 1.0, 1e-12);
  EXPECT_NEAR(out.Gp.determinant(), 1.0, 1e-12);
  const Matrix34d X2 = forward_transform(tet, out);
  EXPECT_LT((X2 - X).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(GramShape, DiagonalAndSpectrum) {
  std::mt19937_64 rng(23);
  const ShapeTetrahedron tet = fourThreeTwoOne();
  CoordinateDecomposition dec;
  dec.R = Eigen::Vector3d(2.0, 1.5, 0.5);
  EXPECT_LT((gram_matrix(dec).A - dec.R.cwiseAbs2().asDiagonal().toDenseMatrix()).norm(),
            1e-14);

  dec.Gp = random_rotation(rng);
  const GramShape g = gram_matrix(dec);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(g.A);
  const Eigen::Vector3d want(0.25, 2.25, 4.0);  // ascending
  EXPECT_LT((eig.eigenvalues() - want).cwiseAbs().maxCoeff(), 1e-12);

  // changing G leaves A fixed
  const Eigen::Matrix3d A0 = g.A;
  dec.G = random_rotation(rng);
  EXPECT_EQ(gram_matrix(dec).A, A0);
}

TEST(PairwiseDistances, MatchesCartesianOracle) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = MassQuadruple::fromUnordered(random_masses(rng));
    const ShapeTetrahedron tet = build_shape_tetrahedron(q);
    CoordinateDecomposition dec;
    dec.G = random_rotation(rng);
    dec.Gp = random_rotation(rng);
    dec.R = random_descending_scales(rng);
    const Matrix34d X = forward_transform(tet, dec);
    const auto d = pairwise_distances(gram_matrix(dec), tet);
    for (std::size_t k = 0; k < kPairOrder.size(); ++k) {
      const auto [i, j] = kPairOrder[k];
      EXPECT_LT(testing::rel_diff(d[k], (X.col(i) - X.col(j)).norm()), 1e-12);
    }
  }
}

TEST(PairwiseDistances, IdentityGramGivesEdgeLengths) {
  const ShapeTetrahedron tet = fourThreeTwoOne();
  CoordinateDecomposition dec;  // A = I
  const auto d = pairwise_distances(gram_matrix(dec), tet);
  for (std::size_t k = 0; k < kPairOrder.size(); ++k) {
    const auto [i, j] = kPairOrder[k];
    const double want = std::sqrt(tet.mu * (1.0 / tet.masses.m(i) + 1.0 / tet.masses.m(j)));
    EXPECT_NEAR(d[k], want, 1e-13);
  }
}

TEST(MomentsOfInertia, MatchScalesAndInvertBack) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q = MassQuadruple::fromUnordered(random_masses(rng));
    const ShapeTetrahedron tet = build_shape_tetrahedron(q);
    CoordinateDecomposition dec;
    dec.G = random_rotation(rng);
    dec.Gp = random_rotation(rng);
    dec.R = random_descending_scales(rng);
    const Matrix34d X = forward_transform(tet, dec);

    Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector3d r = X.col(i);
      inertia += q.m(i) * (r.squaredNorm() * Eigen::Matrix3d::Identity() -
                           r * r.transpose());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(inertia);
    const Eigen::Vector3d I = eig.eigenvalues();  // ascending
    const double mu = tet.mu;
    // R1 >= R2 >= R3 puts I1 <= I2 <= I3 with I1 = mu (R2^2 + R3^2) etc.
    const Eigen::Vector3d& R = dec.R;
    EXPECT_LT(testing::rel_diff(I[0], mu * (R[1] * R[1] + R[2] * R[2])), 1e-10);
    EXPECT_LT(testing::rel_diff(I[1], mu * (R[2] * R[2] + R[0] * R[0])), 1e-10);
    EXPECT_LT(testing::rel_diff(I[2], mu * (R[0] * R[0] + R[1] * R[1])), 1e-10);

    // inversion of the moment relations recovers the scales
    EXPECT_LT(testing::rel_diff(std::sqrt((I[1] + I[2] - I[0]) / (2.0 * mu)), R[0]), 1e-10);
    EXPECT_LT(testing::rel_diff(std::sqrt((I[2] + I[0] - I[1]) / (2.0 * mu)), R[1]), 1e-10);
    EXPECT_LT(testing::rel_diff(std::sqrt((I[0] + I[1] - I[2]) / (2.0 * mu)), R[2]), 1e-10);
  }
}

TEST(PlanarForward, TruncatesAtZeroAngle) {
  const ShapeTetrahedron tet = fourThreeTwoOne();
  const auto X = planar_forward_transform(0.0, 1.4, 0.9, Eigen::Matrix3d::Identity(), tet);
  const Matrix34d full = Eigen::Vector3d(1.4, 0.9, 0.0).asDiagonal() * tet.E;
  EXPECT_LT((X - full.topRows<2>()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PlanarForward, DistancesIndependentOfPsi) {
  std::mt19937_64 rng(37);
  const ShapeTetrahedron tet = fourThreeTwoOne();
  const Eigen::Matrix3d Gp = random_rotation(rng);
  const auto X0 = planar_forward_transform(0.0, 1.4, 0.9, Gp, tet);
  const auto X1 = planar_forward_transform(2.1, 1.4, 0.9, Gp, tet);
  for (const auto& [i, j] : kPairOrder) {
    EXPECT_NEAR((X0.col(i) - X0.col(j)).norm(), (X1.col(i) - X1.col(j)).norm(), 1e-13);
  }
}

TEST(DirectedAreas, UnitSquare) {
  Eigen::Matrix<double, 2, 4> p;
  p << 0, 1, 1, 0,
       0, 0, 1, 1;
  const DirectedAreas S = directed_areas(p);
  EXPECT_NEAR(S.S[0], 1.0, 1e-15);
  EXPECT_NEAR(S.S[1], -1.0, 1e-15);
  EXPECT_NEAR(S.S[2], 1.0, 1e-15);
  EXPECT_NEAR(S.S[3], -1.0, 1e-15);
  EXPECT_NEAR(S.S.sum(), 0.0, 1e-15);
}

TEST(DirectedAreas, CollinearPointsVanish) {
  Eigen::Matrix<double, 2, 4> p;
  p << 0, 1, 2, 3,
       0, 2, 4, 6;
  EXPECT_LT(directed_areas(p).S.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(DirectedAreas, PlaneConditionsAreIdentities) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Matrix<double, 2, 4> p;
    for (int i = 0; i < 8; ++i) p(i / 4, i % 4) = u(rng);
    const Eigen::Vector4d S = directed_areas(p).S;
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    EXPECT_LT(std::abs(S.sum()) / scale, 1e-12);
    EXPECT_LT((p * S).norm() / scale, 1e-12);
  }
}

TEST(AreasFromShape, MatchesDirectedAreasUpToOneConstant) {
  // planar shape state: R3 = 0 with a generic second rotation
  std::mt19937_64 rng(43);
  const ShapeTetrahedron tet = fourThreeTwoOne();
  const Eigen::Matrix3d Gp = random_rotation(rng);
  const auto pos = planar_forward_transform(0.8, 1.5, 1.1, Gp, tet);
  const AreaFit fit = areas_from_shape(tet, Gp, pos);
  EXPECT_LT((fit.S - directed_areas(pos).S).cwiseAbs().maxCoeff() /
                fit.S.cwiseAbs().maxCoeff(),
            1e-10);

  // rotating G' about e3 leaves the areas unchanged
  const Eigen::Matrix3d Gp2 =
      Gp * Eigen::AngleAxisd(0.9, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  EXPECT_LT((shape_area_direction(tet, Gp2) - shape_area_direction(tet, Gp)).norm(), 1e-13);

  // scale and in-plane angle do not move the area direction
  const auto pos2 = planar_forward_transform(2.0, 0.6, 0.4, Gp, tet);
  const AreaFit fit2 = areas_from_shape(tet, Gp, pos2);
  EXPECT_LT((fit2.S / fit2.C - fit.S / fit.C).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AreasFromShape, InconsistentInputThrows) {
  std::mt19937_64 rng(47);
  const ShapeTetrahedron tet = fourThreeTwoOne();
  const Eigen::Matrix3d Gp = random_rotation(rng);
  const auto pos = planar_forward_transform(0.8, 1.5, 1.1, Gp, tet);
  const Eigen::Matrix3d wrong =
      Gp * Eigen::AngleAxisd(0.5, Eigen::Vector3d::UnitX()).toRotationMatrix();
  EXPECT_THROW(areas_from_shape(tet, wrong, pos), InconsistentAreas);
}

TEST(ConfigurationState, FromUserCanonicalizesAndCenters) {
  Matrix34d pos = Matrix34d::Random();
  Matrix34d vel = Matrix34d::Random();
  const auto st = ConfigurationState::fromUser({2.0, 4.0, 1.0, 3.0}, pos, vel);
  EXPECT_LT(st.centerOfMassResidual(), 1e-14);
  EXPECT_LT((st.velocities * st.masses.values()).norm(), 1e-13);
  // canonical column 0 is the heaviest body = user column 1, shifted by the
  // center of mass
  const Eigen::Vector4d m = st.masses.values();
  EXPECT_DOUBLE_EQ(m[0], 4.0);
}

}  // namespace
}  // namespace fourbody
