#include "fourbody/transforms.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace fourbody {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

// relative threshold for "a scale is zero / two scales coincide"
constexpr double kScaleDegeneracyTol = 1e-10;

}  // namespace

ConfigurationState ConfigurationState::fromUser(const std::array<double, 4>& user_masses,
                                                const Matrix34d& user_positions,
                                                const Matrix34d& user_velocities) {
  ConfigurationState st;
  st.masses = MassQuadruple::fromUnordered(user_masses);
  st.positions = st.masses.toCanonical(user_positions);
  st.velocities = st.masses.toCanonical(user_velocities);
  const Eigen::Vector4d& m = st.masses.values();
  const double mtot = m.sum();
  st.positions.colwise() -= Eigen::Vector3d(st.positions * m / mtot);
  st.velocities.colwise() -= Eigen::Vector3d(st.velocities * m / mtot);
  return st;
}

double ConfigurationState::centerOfMassResidual() const {
  const Eigen::Vector4d& m = masses.values();
  const double scale = std::max(1.0, positions.cwiseAbs().maxCoeff());
  return (positions * m).norm() / (m.sum() * scale);
}

Matrix34d forward_transform(const ShapeTetrahedron& tet,
                            const CoordinateDecomposition& dec) {
  return dec.G * dec.scaleMatrix() * dec.Gp.transpose() * tet.E;
}

Matrix34d velocities_from_rates(const ShapeTetrahedron& tet,
                                const CoordinateDecomposition& dec,
                                const Eigen::Vector3d& Rdot,
                                const Eigen::Vector3d& omega,
                                const Eigen::Vector3d& Omega) {
  const Eigen::Matrix3d D = dec.scaleMatrix();
  const Eigen::Matrix3d W =
      skew(omega) * D + Eigen::Matrix3d(Rdot.asDiagonal()) - D * skew(Omega);
  return dec.G * W * dec.Gp.transpose() * tet.E;
}

CoordinateDecomposition decompose_configuration(const Matrix34d& positions,
                                                const ShapeTetrahedron& tet,
                                                const CoordinateDecomposition* prev) {
  const Eigen::Matrix3d B =
      positions * tet.masses.values().asDiagonal() * tet.E.transpose() / tet.mu;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d U = svd.matrixU();
  Eigen::Matrix3d V = svd.matrixV();
  Eigen::Vector3d R = svd.singularValues();  // descending, nonnegative

  // Force both factors proper; a mirror configuration puts the sign on R3.
  if (U.determinant() < 0.0) {
    U.col(2) *= -1.0;
    R[2] = -R[2];
  }
  if (V.determinant() < 0.0) {
    V.col(2) *= -1.0;
    R[2] = -R[2];
  }

  if (prev != nullptr) {
    // Align the four-fold sign gauge with the previous sample.
    static const std::array<Eigen::Vector3d, 4> signs = {
        Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, -1, -1),
        Eigen::Vector3d(-1, 1, -1), Eigen::Vector3d(-1, -1, 1)};
    double best = -std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_s = signs[0];
    for (const auto& s : signs) {
      const double score = (U * s.asDiagonal()).cwiseProduct(prev->G).sum() +
                           (V * s.asDiagonal()).cwiseProduct(prev->Gp).sum();
      if (score > best) {
        best = score;
        best_s = s;
      }
    }
    U = U * best_s.asDiagonal();
    V = V * best_s.asDiagonal();
  } else {
    // Largest-magnitude entry of G' columns 1,2 positive; each fix pairs the
    // flip with column 3 so both determinants stay +1.
    for (int i = 0; i < 2; ++i) {
      int arg = 0;
      V.col(i).cwiseAbs().maxCoeff(&arg);
      if (V(arg, i) < 0.0) {
        U.col(i) *= -1.0;
        V.col(i) *= -1.0;
        U.col(2) *= -1.0;
        V.col(2) *= -1.0;
      }
    }
  }

  CoordinateDecomposition dec;
  dec.G = U;
  dec.Gp = V;
  dec.R = R;
  const double scale = std::max(std::abs(R[0]), 1e-300);
  dec.planar = std::abs(R[2]) <= kScaleDegeneracyTol * scale;
  dec.collinear = std::abs(R[1]) <= kScaleDegeneracyTol * scale;
  const bool near_equal = (R[0] - R[1] <= kScaleDegeneracyTol * scale) ||
                          (std::abs(R[1]) - std::abs(R[2]) <= kScaleDegeneracyTol * scale);
  dec.gauge_ambiguous = dec.planar || dec.collinear || near_equal;
  return dec;
}

GramShape gram_matrix(const CoordinateDecomposition& dec) {
  GramShape g;
  g.A = dec.Gp * dec.R.cwiseAbs2().asDiagonal() * dec.Gp.transpose();
  return g;
}

std::array<double, 6> pairwise_distances(const GramShape& gram,
                                         const ShapeTetrahedron& tet) {
  std::array<double, 6> out{};
  for (std::size_t k = 0; k < kPairOrder.size(); ++k) {
    const auto [i, j] = kPairOrder[k];
    const Eigen::Vector3d d = tet.E.col(i) - tet.E.col(j);
    out[k] = std::sqrt(d.dot(gram.A * d));
  }
  return out;
}

Eigen::Matrix<double, 2, 4> planar_forward_transform(double psi, double R1, double R2,
                                                     const Eigen::Matrix3d& Gp,
                                                     const ShapeTetrahedron& tet) {
  Eigen::Matrix<double, 2, 3> RD;
  RD << std::cos(psi) * R1, -std::sin(psi) * R2, 0.0,
        std::sin(psi) * R1, std::cos(psi) * R2, 0.0;
  return RD * Gp.transpose() * tet.E;
}

DirectedAreas directed_areas(const Eigen::Matrix<double, 2, 4>& positions) {
  Eigen::Matrix<double, 3, 4> B;
  B.row(0).setOnes();
  B.bottomRows<2>() = positions;
  DirectedAreas out;
  double sign = 1.0;
  for (int j = 0; j < 4; ++j) {
    Eigen::Matrix3d minor;
    int c = 0;
    for (int k = 0; k < 4; ++k) {
      if (k == j) continue;
      minor.col(c++) = B.col(k);
    }
    out.S[j] = sign * minor.determinant();
    sign = -sign;
  }
  return out;
}

Eigen::Vector4d shape_area_direction(const ShapeTetrahedron& tet,
                                     const Eigen::Matrix3d& Gp) {
  return tet.masses.values().asDiagonal() * tet.E.transpose() * Gp.col(2);
}

AreaFit areas_from_shape(const ShapeTetrahedron& tet, const Eigen::Matrix3d& Gp,
                         const Eigen::Matrix<double, 2, 4>& planar_positions,
                         double rel_tol) {
  const Eigen::Vector4d w = shape_area_direction(tet, Gp);
  const Eigen::Vector4d S = directed_areas(planar_positions).S;
  const double C = S.dot(w) / w.dot(w);
  const double scale = S.cwiseAbs().maxCoeff();
  const double residual = (S - C * w).cwiseAbs().maxCoeff();
  if (!(residual <= rel_tol * scale)) {
    throw InconsistentAreas("directed areas are not proportional to M E^T G' e3 (residual " +
                            std::to_string(residual / scale) + ")");
  }
  AreaFit fit;
  fit.S = C * w;
  fit.C = C;
  return fit;
}

}  // namespace fourbody
