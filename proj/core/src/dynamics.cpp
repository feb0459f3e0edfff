#include "fourbody/dynamics.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace fourbody {

namespace {

constexpr double kCollisionTol = 1e-12;
constexpr double kEncounterAbort = 1e-6;

Eigen::Vector3d rotation_log(const Eigen::Matrix3d& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Eigen::Vector3d diag_inertia(const Eigen::Vector3d& R) {
  return {R[1] * R[1] + R[2] * R[2], R[2] * R[2] + R[0] * R[0],
          R[0] * R[0] + R[1] * R[1]};
}

Eigen::Vector3d cross_scales(const Eigen::Vector3d& R) {
  return {R[1] * R[2], R[2] * R[0], R[0] * R[1]};
}

}  // namespace

double min_pair_distance(const Matrix34d& positions) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [i, j] : kPairOrder) {
    best = std::min(best, (positions.col(i) - positions.col(j)).norm());
  }
  return best;
}

double newton_potential(const Matrix34d& positions, const MassQuadruple& masses) {
  const Eigen::Vector4d& m = masses.values();
  double V = 0.0;
  for (const auto& [i, j] : kPairOrder) {
    const double r = (positions.col(i) - positions.col(j)).norm();
    if (r < kCollisionTol) {
      throw Collision("bodies " + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      " coincide");
    }
    V -= m[i] * m[j] / r;
  }
  return V;
}

Matrix34d accelerations(const Matrix34d& positions, const MassQuadruple& masses) {
  const Eigen::Vector4d& m = masses.values();
  Matrix34d acc = Matrix34d::Zero();
  for (const auto& [i, j] : kPairOrder) {
    const Eigen::Vector3d d = positions.col(j) - positions.col(i);
    const double r = d.norm();
    if (r < kCollisionTol) {
      throw Collision("bodies " + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      " coincide");
    }
    const Eigen::Vector3d f = d / (r * r * r);
    acc.col(i) += m[j] * f;
    acc.col(j) -= m[i] * f;
  }
  return acc;
}

double potential_of_shape(const ShapeTetrahedron& tet, const Eigen::Vector3d& R,
                          const Eigen::Matrix3d& Gp) {
  const Eigen::Matrix3d A = Gp * R.cwiseAbs2().asDiagonal() * Gp.transpose();
  const Eigen::Vector4d& m = tet.masses.values();
  double V = 0.0;
  for (const auto& [i, j] : kPairOrder) {
    const Eigen::Vector3d d = tet.E.col(i) - tet.E.col(j);
    V -= m[i] * m[j] / std::sqrt(d.dot(A * d));
  }
  return V;
}

double kinetic_energy_new_coords(double mu, const Eigen::Vector3d& R,
                                 const KinematicRates& rates) {
  const Eigen::Vector3d d = diag_inertia(R);
  const Eigen::Vector3d c = cross_scales(R);
  const double coupling = c.dot(rates.omega.cwiseProduct(rates.Omega));
  return 0.5 * mu *
         (rates.Rdot.squaredNorm() - 4.0 * coupling +
          rates.omega.dot(d.cwiseProduct(rates.omega)) +
          rates.Omega.dot(d.cwiseProduct(rates.Omega)));
}

Eigen::Vector3d internal_angular_momentum(double mu, const Eigen::Vector3d& R,
                                          const KinematicRates& rates) {
  return mu * diag_inertia(R).cwiseProduct(rates.omega) -
         2.0 * mu * cross_scales(R).cwiseProduct(rates.Omega);
}

Eigen::Vector3d internal_angular_momentum_gp(double mu, const Eigen::Vector3d& R,
                                             const KinematicRates& rates) {
  return mu * diag_inertia(R).cwiseProduct(rates.Omega) -
         2.0 * mu * cross_scales(R).cwiseProduct(rates.omega);
}

double total_energy(const ShapeTetrahedron& tet, const TrajectorySample& sample) {
  if (!sample.rates) {
    throw std::logic_error("total_energy needs a sample with attached rates");
  }
  return newton_potential(sample.positions, tet.masses) +
         kinetic_energy_new_coords(tet.mu, sample.dec.R, *sample.rates);
}

namespace {

void enrich(TrajectorySample& s, const ShapeTetrahedron& tet,
            const CoordinateDecomposition* prev) {
  s.dec = decompose_configuration(s.positions, tet, prev);
  const Eigen::Vector4d& m = tet.masses.values();
  double kin = 0.0;
  Eigen::Vector3d J = Eigen::Vector3d::Zero();
  for (int i = 0; i < 4; ++i) {
    kin += 0.5 * m[i] * s.velocities.col(i).squaredNorm();
    J += m[i] * s.positions.col(i).cross(Eigen::Vector3d(s.velocities.col(i)));
  }
  s.energy = newton_potential(s.positions, tet.masses) + kin;
  s.angular_momentum = J;
}

// Rates by central differences; invalid across gauge flips.
void attach_rates(Trajectory& traj) {
  const double dt = traj.dt;
  for (std::size_t k = 1; k + 1 < traj.samples.size(); ++k) {
    const auto& a = traj.samples[k - 1].dec;
    const auto& b = traj.samples[k + 1].dec;
    const Eigen::Matrix3d dG = a.G.transpose() * b.G;
    const Eigen::Matrix3d dGp = a.Gp.transpose() * b.Gp;
    // a genuine sign flip moves a column by ~2; smooth motion stays near I
    if ((dG - Eigen::Matrix3d::Identity()).norm() > 0.5 ||
        (dGp - Eigen::Matrix3d::Identity()).norm() > 0.5) {
      continue;
    }
    KinematicRates r;
    r.omega = rotation_log(dG) / (2.0 * dt);
    r.Omega = rotation_log(dGp) / (2.0 * dt);
    r.Rdot = (b.R - a.R) / (2.0 * dt);
    traj.samples[k].rates = r;
  }
}

}  // namespace

Trajectory integrate(const ConfigurationState& initial, double dt, double t_end) {
  if (!(dt > 0.0) || !(t_end > 0.0)) {
    throw std::invalid_argument("integrate needs dt > 0 and t_end > 0");
  }
  Trajectory traj;
  traj.dt = dt;
  traj.tet = build_shape_tetrahedron(initial.masses);

  const auto nsteps = static_cast<std::size_t>(std::llround(t_end / dt));
  traj.samples.reserve(nsteps + 1);

  Matrix34d X = initial.positions;
  Matrix34d V = initial.velocities;
  const MassQuadruple& masses = initial.masses;

  TrajectorySample s0;
  s0.t = 0.0;
  s0.positions = X;
  s0.velocities = V;
  enrich(s0, traj.tet, nullptr);
  traj.samples.push_back(std::move(s0));

  for (std::size_t step = 1; step <= nsteps; ++step) {
    const Matrix34d k1x = V;
    const Matrix34d k1v = accelerations(X, masses);
    const Matrix34d k2x = V + 0.5 * dt * k1v;
    const Matrix34d k2v = accelerations(X + 0.5 * dt * k1x, masses);
    const Matrix34d k3x = V + 0.5 * dt * k2v;
    const Matrix34d k3v = accelerations(X + 0.5 * dt * k2x, masses);
    const Matrix34d k4x = V + dt * k3v;
    const Matrix34d k4v = accelerations(X + dt * k3x, masses);
    X += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    V += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    const double sep = min_pair_distance(X);
    if (sep < kEncounterAbort) {
      throw CollisionAbort(static_cast<double>(step) * dt, sep);
    }

    TrajectorySample s;
    s.t = static_cast<double>(step) * dt;
    s.positions = X;
    s.velocities = V;
    enrich(s, traj.tet, &traj.samples.back().dec);
    traj.samples.push_back(std::move(s));
  }

  attach_rates(traj);
  return traj;
}

namespace {

bool window_ok(const Trajectory& traj, std::size_t k) {
  return traj.samples[k - 1].rates && traj.samples[k].rates && traj.samples[k + 1].rates;
}

}  // namespace

Eigen::Vector3d euler_equation_residual(const Trajectory& traj) {
  const double mu = traj.tet.mu;
  Eigen::Vector3d worst = Eigen::Vector3d::Zero();
  for (std::size_t k = 2; k + 2 < traj.size(); ++k) {
    if (!window_ok(traj, k)) continue;
    const auto& sm = traj.samples[k - 1];
    const auto& s0 = traj.samples[k];
    const auto& sp = traj.samples[k + 1];
    const Eigen::Vector3d Lm = internal_angular_momentum(mu, sm.dec.R, *sm.rates);
    const Eigen::Vector3d Lp = internal_angular_momentum(mu, sp.dec.R, *sp.rates);
    const Eigen::Vector3d L0 = internal_angular_momentum(mu, s0.dec.R, *s0.rates);
    const Eigen::Vector3d lhs = (Lp - Lm) / (2.0 * traj.dt);
    const Eigen::Vector3d rhs = L0.cross(s0.rates->omega);
    worst = worst.cwiseMax((lhs - rhs).cwiseAbs());
  }
  return worst;
}

double node_elimination_check(const Trajectory& traj) {
  const double mu = traj.tet.mu;
  const Eigen::Vector3d J0 = traj.samples.front().angular_momentum;
  const double ell = J0.norm();
  Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
  if (ell > 0.0) {
    Q = Eigen::Quaterniond::FromTwoVectors(J0, Eigen::Vector3d::UnitZ())
            .toRotationMatrix();
  }
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const auto& s = traj.samples[k];
    if (!s.rates) continue;
    const Eigen::Vector3d L = internal_angular_momentum(mu, s.dec.R, *s.rates);
    const Eigen::Vector3d target =
        ell * (Q * s.dec.G).transpose() * Eigen::Vector3d::UnitZ();
    worst = std::max(worst, (L - target).cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

Eigen::Vector3d shape_potential_gradient_R(const ShapeTetrahedron& tet,
                                           const Eigen::Vector3d& R,
                                           const Eigen::Matrix3d& Gp) {
  const double h = 1e-6 * std::max(1.0, R.cwiseAbs().maxCoeff());
  Eigen::Vector3d g;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d Rp = R, Rm = R;
    Rp[i] += h;
    Rm[i] -= h;
    g[i] = (potential_of_shape(tet, Rp, Gp) - potential_of_shape(tet, Rm, Gp)) / (2.0 * h);
  }
  return g;
}

}  // namespace

Eigen::Vector3d scale_equation_residual(const Trajectory& traj) {
  const double mu = traj.tet.mu;
  const double dt = traj.dt;
  Eigen::Vector3d worst = Eigen::Vector3d::Zero();
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    if (!traj.samples[k].rates) continue;
    const auto& sm = traj.samples[k - 1];
    const auto& s0 = traj.samples[k];
    const auto& sp = traj.samples[k + 1];
    const Eigen::Vector3d R = s0.dec.R;
    const Eigen::Vector3d Rddot = (sp.dec.R - 2.0 * R + sm.dec.R) / (dt * dt);
    const Eigen::Vector3d& w = s0.rates->omega;
    const Eigen::Vector3d& W = s0.rates->Omega;
    const Eigen::Vector3d coupling{R[1] * w[2] * W[2] + R[2] * w[1] * W[1],
                                   R[2] * w[0] * W[0] + R[0] * w[2] * W[2],
                                   R[0] * w[1] * W[1] + R[1] * w[0] * W[0]};
    const Eigen::Vector3d centrifugal{
        R[0] * (w[1] * w[1] + w[2] * w[2] + W[1] * W[1] + W[2] * W[2]),
        R[1] * (w[2] * w[2] + w[0] * w[0] + W[2] * W[2] + W[0] * W[0]),
        R[2] * (w[0] * w[0] + w[1] * w[1] + W[0] * W[0] + W[1] * W[1])};
    const Eigen::Vector3d gradV = shape_potential_gradient_R(traj.tet, R, s0.dec.Gp);
    const Eigen::Vector3d res =
        mu * Rddot + 2.0 * mu * coupling - mu * centrifugal + gradV;
    worst = worst.cwiseMax(res.cwiseAbs());
  }
  return worst;
}

namespace {

Eigen::Matrix3d zxz_matrix(const Eigen::Vector3d& q) {
  return (Eigen::AngleAxisd(q[0], Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(q[1], Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(q[2], Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

Eigen::Vector3d zxz_angles(const Eigen::Matrix3d& M) {
  const double q2 = std::acos(std::clamp(M(2, 2), -1.0, 1.0));
  const double q1 = std::atan2(M(0, 2), -M(1, 2));
  const double q3 = std::atan2(M(2, 0), M(2, 1));
  return {q1, q2, q3};
}

// Body-frame kinematic basis: Omega = sum_j c_j qdot_j for z-x-z angles.
Eigen::Matrix3d zxz_body_basis(const Eigen::Vector3d& q) {
  const double s2 = std::sin(q[1]), c2 = std::cos(q[1]);
  const double s3 = std::sin(q[2]), c3 = std::cos(q[2]);
  Eigen::Matrix3d C;
  C.col(0) = Eigen::Vector3d(s2 * s3, s2 * c3, c2);
  C.col(1) = Eigen::Vector3d(c3, -s3, 0.0);
  C.col(2) = Eigen::Vector3d(0.0, 0.0, 1.0);
  return C;
}

}  // namespace

double torque_consistency_check(const Trajectory& traj) {
  const double mu = traj.tet.mu;
  const double dt = traj.dt;
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < traj.size(); ++k) {
    if (!window_ok(traj, k)) continue;
    const auto& sm = traj.samples[k - 1];
    const auto& s0 = traj.samples[k];
    const auto& sp = traj.samples[k + 1];
    const Eigen::Vector3d Lm = internal_angular_momentum_gp(mu, sm.dec.R, *sm.rates);
    const Eigen::Vector3d Lp = internal_angular_momentum_gp(mu, sp.dec.R, *sp.rates);
    const Eigen::Vector3d L0 = internal_angular_momentum_gp(mu, s0.dec.R, *s0.rates);
    const Eigen::Vector3d K =
        L0.cross(s0.rates->Omega) - (Lp - Lm) / (2.0 * dt);

    // Chart re-seeded so this sample sits at q = (0, pi/2, 0), far from the
    // z-x-z singularities at q2 in {0, pi}.
    const Eigen::Matrix3d Qfix =
        s0.dec.Gp * Eigen::AngleAxisd(-M_PI / 2.0, Eigen::Vector3d::UnitX());
    const Eigen::Vector3d q = zxz_angles(Qfix.transpose() * s0.dec.Gp);
    const Eigen::Matrix3d C = zxz_body_basis(q);

    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      const double dV = (potential_of_shape(traj.tet, s0.dec.R, Qfix * zxz_matrix(qp)) -
                         potential_of_shape(traj.tet, s0.dec.R, Qfix * zxz_matrix(qm))) /
                        (2.0 * h);
      worst = std::max(worst, std::abs(K.dot(C.col(j)) - dV));
    }
  }
  return worst;
}

}  // namespace fourbody
