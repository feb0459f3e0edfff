#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>

#include "fourbody/shape_tetrahedron.hpp"

namespace fourbody {

struct InconsistentAreas : std::runtime_error {
  explicit InconsistentAreas(const std::string& what) : std::runtime_error(what) {}
};

// (G, R1 R2 R3, G') for one configuration: X = G diag(R) G'^T E.
//
// Canonical gauge: R sorted descending, both factors proper rotations, the
// largest-magnitude entry of the first two columns of G' positive (sign
// ambiguities are resolved by simultaneous column-pair flips, which leave the
// product invariant). For a mirror configuration (det X M E^T < 0) the third
// scale carries the sign: R3 < 0.
struct CoordinateDecomposition {
  Eigen::Matrix3d G = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d Gp = Eigen::Matrix3d::Identity();
  Eigen::Vector3d R = Eigen::Vector3d::Ones();

  bool planar = false;           // R3 ~ 0
  bool collinear = false;        // R2 ~ 0 as well
  bool gauge_ambiguous = false;  // chart-singular: compare only invariants

  Eigen::Matrix3d scaleMatrix() const { return R.asDiagonal(); }
};

// Cartesian positions/velocities of the four bodies, columns in canonical
// (descending-mass) order, center of mass and total momentum at zero.
struct ConfigurationState {
  Matrix34d positions = Matrix34d::Zero();
  Matrix34d velocities = Matrix34d::Zero();
  MassQuadruple masses;

  // Permutes user-ordered columns into canonical order and removes any
  // center-of-mass offset and drift.
  static ConfigurationState fromUser(const std::array<double, 4>& user_masses,
                                     const Matrix34d& user_positions,
                                     const Matrix34d& user_velocities);

  double centerOfMassResidual() const;
};

// The symmetric 3x3 matrix A = G' diag(R^2) G'^T of the distance form.
struct GramShape {
  Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
};

// Twice the signed triangle areas S_1..S_4: the alternating-sign 3x3 minors
// of [[1,1,1,1],[x],[y]]. For any planar quadruple, sum S_i = 0 and
// sum S_i r_i = 0 identically.
struct DirectedAreas {
  Eigen::Vector4d S = Eigen::Vector4d::Zero();
};

// X = G diag(R) G'^T E; output is in the center-of-mass frame by construction.
Matrix34d forward_transform(const ShapeTetrahedron& tet,
                            const CoordinateDecomposition& dec);

// Analytic velocities for given rates (body-frame convention
// skew(omega) = G^T dG/dt, same for Omega with G'):
//   dX/dt = G (skew(omega) D + dD/dt - D skew(Omega)) G'^T E.
Matrix34d velocities_from_rates(const ShapeTetrahedron& tet,
                                const CoordinateDecomposition& dec,
                                const Eigen::Vector3d& Rdot,
                                const Eigen::Vector3d& omega,
                                const Eigen::Vector3d& Omega);

// Inverse of forward_transform: a singular-value factorization of
// B = X M E^T / mu, which equals G diag(R) G'^T exactly. Near-zero or
// near-equal scales set the gauge_ambiguous flag. If prev is given, the
// discrete sign gauge is aligned with it instead of the canonical rule
// (used when decomposing consecutive trajectory samples).
CoordinateDecomposition decompose_configuration(
    const Matrix34d& positions, const ShapeTetrahedron& tet,
    const CoordinateDecomposition* prev = nullptr);

GramShape gram_matrix(const CoordinateDecomposition& dec);

// Squared distance r_ij^2 = (e_i - e_j)^T A (e_i - e_j) with e_k the columns
// of E; returns the six distances in pair order (12,13,14,23,24,34).
std::array<double, 6> pairwise_distances(const GramShape& gram,
                                         const ShapeTetrahedron& tet);

inline constexpr std::array<std::pair<int, int>, 6> kPairOrder{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Planar chart (z = 0): rows 1-2 of Rz(psi) diag(R1,R2,0) G'^T E.
Eigen::Matrix<double, 2, 4> planar_forward_transform(double psi, double R1, double R2,
                                                     const Eigen::Matrix3d& Gp,
                                                     const ShapeTetrahedron& tet);

DirectedAreas directed_areas(const Eigen::Matrix<double, 2, 4>& positions);

// Direction of the directed-area vector determined by the shape alone:
// S is proportional to M E^T G' e3.
Eigen::Vector4d shape_area_direction(const ShapeTetrahedron& tet,
                                     const Eigen::Matrix3d& Gp);

// Fits the proportionality constant C in S = C M E^T G' e3 against the
// areas of the given planar positions; throws InconsistentAreas if the four
// component ratios disagree beyond rel_tol.
struct AreaFit {
  Eigen::Vector4d S;  // C * M E^T G' e3
  double C = 0.0;
};
AreaFit areas_from_shape(const ShapeTetrahedron& tet, const Eigen::Matrix3d& Gp,
                         const Eigen::Matrix<double, 2, 4>& planar_positions,
                         double rel_tol = 1e-8);

}  // namespace fourbody
