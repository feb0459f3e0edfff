#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fourbody/shape_tetrahedron.hpp"
#include "fourbody/transforms.hpp"

namespace fourbody {

struct NoRoot : std::runtime_error {
  explicit NoRoot(const std::string& what) : std::runtime_error(what) {}
};
struct NegativeMass : std::runtime_error {
  explicit NegativeMass(const std::string& what) : std::runtime_error(what) {}
};
struct ComplexDistance : std::runtime_error {
  explicit ComplexDistance(const std::string& what) : std::runtime_error(what) {}
};

// Positions of the equilateral (Laplace) configuration,
//   diag(sqrt(x_a/mu), sqrt(x_b/mu), sqrt(x_c/mu)) E,
// all six edges sqrt(2), columns in canonical mass order.
Matrix34d equilateral_configuration(const ShapeTetrahedron& tet);

// Bordered 5x5 determinant in the squared distances; zero iff the four
// points are coplanar. Distances in pair order (12,13,14,23,24,34).
double cayley_menger(const std::array<double, 6>& distances);

// Dziobek variables A_j = S_j / m_j, one per body, fixed input order.
struct WeightedAreas {
  Eigen::Vector4d A;

  // two (+)/two (-) is the convex pattern, 3/1 the concave one; zeros and
  // uniform signs never embed with positive masses
  bool validSignPattern() const;
};

struct CentralConfigResiduals {
  double dziobek = 0.0;        // max |r^-3 - 1 - lambda Ai Aj|
  double cayley_menger = 0.0;  // |CM determinant|
  double sum_S = 0.0;          // |sum S_i| / max |S_i|
  double sum_mA = 0.0;         // |sum m_i A_i| / max |m_i A_i|
  double kappa_spread = 0.0;   // relative spread of a_i = -kappa r_i
};

// One planar central configuration in sigma = 1 units.
struct PlanarCentralConfig {
  WeightedAreas areas;       // the input constants
  double lambda = 0.0;
  double sigma = 1.0;
  std::array<double, 6> distances{};      // pair order (12,13,14,23,24,34)
  Eigen::Vector4d masses;                 // per body, input order
  Eigen::Vector4d signed_areas;           // S_j of the embedding, input order
  Eigen::Matrix<double, 2, 4> embedding;  // center of mass at origin
  MassQuadruple canonical_masses;         // carries the sort permutation
  ShapeTetrahedron tet;                   // built on the recovered masses
  double R1 = 0.0, R2 = 0.0;              // scales of the embedded solution
  double theta = 0.0;                     // atan2(R2, R1)
  Eigen::Matrix3d Gp = Eigen::Matrix3d::Identity();
  double area_constant = 0.0;  // C in S = C M E^T G' e3 (positive gauge)
  double kappa = 0.0;          // common factor in a_i = -kappa r_i
  CentralConfigResiduals residuals;

  double scale() const { return std::hypot(R1, R2); }
  double totalMass() const { return masses.sum(); }
};

// One root of the coplanarity condition CM(lambda) = 0.
struct DziobekRoot {
  double lambda = 0.0;
  bool physical = false;   // embedded with consistent positive masses
  std::string rejection;   // why not, when !physical
  std::optional<PlanarCentralConfig> config;
};

// Scans the admissible lambda interval (all 1 + lambda Ai Aj > 0) with
// grid_points samples, brackets every sign change of the Cayley-Menger
// determinant and refines each root to ~1e-15 relative.
std::vector<DziobekRoot> dziobek_scan(const WeightedAreas& areas,
                                      int grid_points = 10000);

// First physical root of the scan. Throws NoRoot / NegativeMass /
// ComplexDistance as classified.
PlanarCentralConfig dziobek_solve(const WeightedAreas& areas);

// Conic R(psi) = p / (1 + e cos(psi - psi0)) traced by the shape radius.
struct ConicParams {
  double p = 1.0;
  double e = 0.0;
  double psi0 = 0.0;
};

struct OrbitSample {
  double psi = 0.0;
  double t = 0.0;
  Eigen::Matrix<double, 2, 4> positions;  // input body order
};

// Samples one revolution psi in [psi0, psi0 + 2 pi), n_samples rows, with
// time stamps measured from periapsis. Requires e < 1.
std::vector<OrbitSample> homographic_trajectory(const PlanarCentralConfig& cc,
                                                const ConicParams& conic,
                                                int n_samples);

// Full cartesian state (z = 0) on the homographic orbit at anomaly psi;
// exact initial data for the integrator.
ConfigurationState homographic_state(const PlanarCentralConfig& cc,
                                     const ConicParams& conic, double psi);

// Gravitational strength of the reduced radial problem: V(R) = -beta / R.
double shape_attraction(const PlanarCentralConfig& cc);

// Angular rate of the circular (e = 0) relative equilibrium at the solver's
// own scale: psidot^2 = sigma * total mass.
double circular_angular_rate(const PlanarCentralConfig& cc);

// Planar kinematic data in the polar chart R1 = R cos(theta), R2 = R sin(theta).
struct PlanarKinematics {
  double R = 1.0;
  double Rdot = 0.0;
  double theta = 0.0;
  double thetadot = 0.0;
  double psidot = 0.0;
  Eigen::Vector3d Omega = Eigen::Vector3d::Zero();
  double potential = 0.0;
};

struct PlanarInvariants {
  double P_psi = 0.0;
  double energy = 0.0;
};

// P_psi = mu [psidot (R1^2+R2^2) - 2 R1 R2 Omega3] and the polar-form energy
//   E = mu/2 [Rdot^2 + R^2 (thetadot^2 + Omega3^2 cos^2 2theta
//       + Omega1^2 sin^2 theta + Omega2^2 cos^2 theta)] + P_psi^2/(2 mu R^2) + V.
PlanarInvariants planar_energy_momentum(double mu, const PlanarKinematics& kin);

// Kinematics on the homographic orbit at anomaly psi (Omega = 0, theta fixed).
PlanarKinematics orbit_kinematics(const PlanarCentralConfig& cc,
                                  const ConicParams& conic, double psi);

// ---- Kepler timing of the reduced radial motion ----

struct KeplerElements {
  double e = 0.0;
  double mean_motion = 0.0;  // sqrt(beta / (mu a^3))
  double period = 0.0;
};

KeplerElements kepler_elements(const PlanarCentralConfig& cc, const ConicParams& conic);

// Time since periapsis for true anomaly nu (continuous across revolutions).
double kepler_time_from_anomaly(double nu, const KeplerElements& k);

// Inverse map by Newton iteration on E - e sin E = M to 1e-13.
double kepler_anomaly_from_time(double t, const KeplerElements& k);

}  // namespace fourbody
