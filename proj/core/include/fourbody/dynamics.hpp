#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

#include "fourbody/shape_tetrahedron.hpp"
#include "fourbody/transforms.hpp"

namespace fourbody {

struct Collision : std::runtime_error {
  explicit Collision(const std::string& what) : std::runtime_error(what) {}
};

struct CollisionAbort : std::runtime_error {
  CollisionAbort(double when, double separation)
      : std::runtime_error("close encounter at t = " + std::to_string(when) +
                           " (min distance " + std::to_string(separation) + ")"),
        t(when),
        min_distance(separation) {}
  double t;
  double min_distance;
};

// Rates in the body-frame convention skew(omega) = G^T dG/dt (and the same
// for Omega with G'). The convention is pinned by the kinetic-energy and
// angular-momentum equivalence tests, not by fiat.
struct KinematicRates {
  Eigen::Vector3d Rdot = Eigen::Vector3d::Zero();
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
  Eigen::Vector3d Omega = Eigen::Vector3d::Zero();
};

struct TrajectorySample {
  double t = 0.0;
  Matrix34d positions = Matrix34d::Zero();
  Matrix34d velocities = Matrix34d::Zero();
  CoordinateDecomposition dec;
  std::optional<KinematicRates> rates;  // central differences; interior samples only
  double energy = 0.0;                  // V + cartesian kinetic
  Eigen::Vector3d angular_momentum = Eigen::Vector3d::Zero();  // inertial frame
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.0;
  ShapeTetrahedron tet;

  std::size_t size() const { return samples.size(); }
  const TrajectorySample& operator[](std::size_t i) const { return samples[i]; }
};

// V = -sum_{i<j} m_i m_j / r_ij (G = 1). Throws Collision below 1e-12
// separation.
double newton_potential(const Matrix34d& positions, const MassQuadruple& masses);

// a_i = sum_{j != i} m_j (r_j - r_i) / r_ij^3
Matrix34d accelerations(const Matrix34d& positions, const MassQuadruple& masses);

double min_pair_distance(const Matrix34d& positions);

// Fixed-step classical RK4 on cartesian positions/velocities. Each sample is
// enriched with the gauge-aligned decomposition, energy and inertial angular
// momentum; rates are attached afterwards by central differences. Aborts with
// CollisionAbort when any pair distance falls below 1e-6.
Trajectory integrate(const ConfigurationState& initial, double dt, double t_end);

// Potential as a function of the shape coordinates only (distances depend on
// R and G' through the Gram matrix).
double potential_of_shape(const ShapeTetrahedron& tet, const Eigen::Vector3d& R,
                          const Eigen::Matrix3d& Gp);

// Kinetic energy in the new coordinates:
//   K = mu/2 [ sum Rdot_i^2 - 4 (R2 R3 w1 W1 + R3 R1 w2 W2 + R1 R2 w3 W3)
//              + w^T diag(R2^2+R3^2, R3^2+R1^2, R1^2+R2^2) w
//              + W^T diag(...) W ]
double kinetic_energy_new_coords(double mu, const Eigen::Vector3d& R,
                                 const KinematicRates& rates);

// Internal angular momentum in the principal-axes frame:
//   L = mu diag(R2^2+R3^2, R3^2+R1^2, R1^2+R2^2) w
//       - 2 mu (R2 R3 W1, R3 R1 W2, R1 R2 W3)
// The inertial angular momentum is G L.
Eigen::Vector3d internal_angular_momentum(double mu, const Eigen::Vector3d& R,
                                          const KinematicRates& rates);

// The same bilinear form with the roles of w and W exchanged; this is the
// momentum conjugate to the second rotation.
Eigen::Vector3d internal_angular_momentum_gp(double mu, const Eigen::Vector3d& R,
                                             const KinematicRates& rates);

// E = V + K(new coords) for one enriched sample.
double total_energy(const ShapeTetrahedron& tet, const TrajectorySample& sample);

// ---- residual operators (finite differences against the integrated truth) --
//
// All residuals converge at second order in dt. Samples without valid rates
// (window boundaries, gauge flips) are skipped.

// Generalized Euler equations for the first rotation: dL/dt = L x omega.
// Componentwise max |lhs - rhs| over the window.
Eigen::Vector3d euler_equation_residual(const Trajectory& traj);

// Node elimination: with the inertial frame rotated so the conserved angular
// momentum is (0,0,l), the internal momentum satisfies L = l G^T e3.
double node_elimination_check(const Trajectory& traj);

// Scale equations: mu Rddot_i + 2 mu [coupling] - mu R_i [centrifugal]
//                  = -dV/dR_i, with dV/dR_i by central differences of the
// shape potential.
Eigen::Vector3d scale_equation_residual(const Trajectory& traj);

// Internal torque: K = L' x Omega - dL'/dt must satisfy K . c_j = dV/dq_j in
// any regular chart for G'; checked in a z-x-z chart re-seeded per sample so
// the evaluation point sits at the chart equator.
double torque_consistency_check(const Trajectory& traj);

}  // namespace fourbody
