#include "fourbody/central_config.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <limits>

#include "fourbody/dynamics.hpp"

namespace fourbody {

namespace {

// Mass unit of the recovered solution. Any uniform rescaling of the four
// masses leaves the configuration central (kappa = sigma * total mass either
// way); the factor two fixes the unit used by the reference solution this
// solver is validated against.
constexpr double kMassUnitFactor = 2.0;

constexpr double kLambdaGridPad = 1e-9;

std::array<double, 6> pair_products(const Eigen::Vector4d& A) {
  std::array<double, 6> p{};
  for (std::size_t k = 0; k < kPairOrder.size(); ++k) {
    p[k] = A[kPairOrder[k].first] * A[kPairOrder[k].second];
  }
  return p;
}

std::optional<std::array<double, 6>> dziobek_distances(const std::array<double, 6>& products,
                                                       double lambda) {
  std::array<double, 6> d{};
  for (std::size_t k = 0; k < 6; ++k) {
    const double u = 1.0 + lambda * products[k];
    if (!(u > 0.0)) return std::nullopt;
    d[k] = std::pow(u, -1.0 / 3.0);
  }
  return d;
}

struct Embedding {
  Eigen::Matrix<double, 2, 4> points;
  Eigen::Vector4d S;
  bool ok = false;
  std::string error;
};

double dist_of(const std::array<double, 6>& d, int i, int j) {
  for (std::size_t k = 0; k < kPairOrder.size(); ++k) {
    if (kPairOrder[k] == std::pair<int, int>{std::min(i, j), std::max(i, j)}) return d[k];
  }
  return 0.0;
}

// Body 1 at the origin, body 2 on the positive first axis, body 3 in the
// upper half plane; body 4 from its distances to 1 and 2 with the branch
// that reproduces r_34.
Embedding embed_planar(const std::array<double, 6>& d) {
  Embedding out;
  const double r12 = dist_of(d, 0, 1), r13 = dist_of(d, 0, 2), r14 = dist_of(d, 0, 3);
  const double r23 = dist_of(d, 1, 2), r24 = dist_of(d, 1, 3), r34 = dist_of(d, 2, 3);

  Eigen::Matrix<double, 2, 4>& p = out.points;
  p.setZero();
  p(0, 1) = r12;
  const double x3 = (r12 * r12 + r13 * r13 - r23 * r23) / (2.0 * r12);
  const double y3sq = r13 * r13 - x3 * x3;
  const double x4 = (r12 * r12 + r14 * r14 - r24 * r24) / (2.0 * r12);
  const double y4sq = r14 * r14 - x4 * x4;
  if (y3sq < 0.0 || y4sq < 0.0) {
    out.error = "distance set admits no planar embedding";
    return out;
  }
  p(0, 2) = x3;
  p(1, 2) = std::sqrt(y3sq);
  p(0, 3) = x4;
  const double y4 = std::sqrt(y4sq);
  const double err_plus = std::abs(std::hypot(x4 - x3, y4 - p(1, 2)) - r34);
  const double err_minus = std::abs(std::hypot(x4 - x3, -y4 - p(1, 2)) - r34);
  p(1, 3) = (err_plus <= err_minus) ? y4 : -y4;
  if (std::min(err_plus, err_minus) > 1e-8 * r34) {
    out.error = "fourth body does not close the planar embedding";
    return out;
  }
  out.S = directed_areas(p).S;
  out.ok = true;
  return out;
}

CentralConfigResiduals compute_residuals(const PlanarCentralConfig& cc,
                                         const Matrix34d& canonical_positions) {
  CentralConfigResiduals res;
  const auto products = pair_products(cc.areas.A);
  for (std::size_t k = 0; k < 6; ++k) {
    const double r3 = std::pow(cc.distances[k], -3.0);
    res.dziobek = std::max(res.dziobek, std::abs(r3 - cc.sigma - cc.lambda * products[k]));
  }
  res.cayley_menger = std::abs(cayley_menger(cc.distances));
  res.sum_S = std::abs(cc.signed_areas.sum()) / cc.signed_areas.cwiseAbs().maxCoeff();
  const Eigen::Vector4d mA = cc.masses.cwiseProduct(cc.areas.A);
  res.sum_mA = std::abs(mA.sum()) / mA.cwiseAbs().maxCoeff();

  const Matrix34d acc = accelerations(canonical_positions, cc.canonical_masses);
  double kappa_sum = 0.0;
  std::array<double, 4> kappas{};
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d r = canonical_positions.col(i);
    kappas[i] = -acc.col(i).dot(r) / r.squaredNorm();
    kappa_sum += kappas[i];
  }
  const double kappa = kappa_sum / 4.0;
  double spread = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d r = canonical_positions.col(i);
    spread = std::max(spread, (acc.col(i) + kappa * r).norm() /
                                  (std::abs(kappa) * r.norm()));
  }
  res.kappa_spread = spread;
  return res;
}

}  // namespace

Matrix34d equilateral_configuration(const ShapeTetrahedron& tet) {
  const Eigen::Vector3d scales = (tet.roots.vec() / tet.mu).cwiseSqrt();
  return scales.asDiagonal() * tet.E;
}

double cayley_menger(const std::array<double, 6>& distances) {
  Eigen::Matrix<double, 5, 5> B = Eigen::Matrix<double, 5, 5>::Ones();
  B(0, 0) = 0.0;
  for (int i = 0; i < 4; ++i) B(i + 1, i + 1) = 0.0;
  for (std::size_t k = 0; k < kPairOrder.size(); ++k) {
    const auto [i, j] = kPairOrder[k];
    B(i + 1, j + 1) = B(j + 1, i + 1) = distances[k] * distances[k];
  }
  return B.determinant();
}

bool WeightedAreas::validSignPattern() const {
  int pos = 0, neg = 0;
  for (int i = 0; i < 4; ++i) {
    if (A[i] > 0.0) ++pos;
    if (A[i] < 0.0) ++neg;
  }
  return pos + neg == 4 && pos > 0 && neg > 0;
}

std::vector<DziobekRoot> dziobek_scan(const WeightedAreas& areas, int grid_points) {
  if (!areas.validSignPattern()) {
    throw std::invalid_argument(
        "weighted areas must be nonzero with mixed signs (two/two or three/one)");
  }
  const auto products = pair_products(areas.A);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (double p : products) {
    if (p > 0.0) lo = std::max(lo, -1.0 / p);
    if (p < 0.0) hi = std::min(hi, -1.0 / p);
  }
  lo = std::max(lo, -1e3);
  hi = std::min(hi, 1e3);
  if (!(hi > lo)) {
    throw ComplexDistance("no lambda keeps all 1 + lambda Ai Aj positive");
  }

  const double pad = (hi - lo) * kLambdaGridPad;
  lo += pad;
  hi -= pad;
  const auto f = [&](double lambda) -> double {
    const auto d = dziobek_distances(products, lambda);
    return d ? cayley_menger(*d) : std::numeric_limits<double>::quiet_NaN();
  };

  std::vector<DziobekRoot> roots;
  double prev_x = lo, prev_f = f(lo);
  for (int k = 1; k < grid_points; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / (grid_points - 1);
    const double fx = f(x);
    if (std::isfinite(prev_f) && std::isfinite(fx) && prev_f * fx < 0.0) {
      double a = prev_x, b = x, fa = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = f(c);
        if (fc == 0.0) {
          a = b = c;
          break;
        }
        if (fa * fc < 0.0) {
          b = c;
        } else {
          a = c;
          fa = fc;
        }
        if (b - a <= 1e-17 * std::max(1.0, std::abs(c))) break;
      }
      // secant polish inside the final bracket
      double x0 = a, x1 = b, f0 = f(a), f1 = f(b);
      for (int it = 0; it < 3 && f1 != f0; ++it) {
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 >= a && x2 <= b)) break;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x2);
      }
      DziobekRoot root;
      root.lambda = std::abs(f1) <= std::abs(f0) ? x1 : x0;
      roots.push_back(root);
    }
    prev_x = x;
    prev_f = fx;
  }

  for (DziobekRoot& root : roots) {
    const auto dists = dziobek_distances(products, root.lambda);
    if (!dists) {
      root.rejection = "distances not real at the root";
      continue;
    }
    Embedding emb = embed_planar(*dists);
    if (!emb.ok) {
      root.rejection = emb.error;
      continue;
    }
    // orientation so that the signed areas match the sign of A componentwise
    bool match = true, antimatch = true;
    for (int i = 0; i < 4; ++i) {
      if (emb.S[i] * areas.A[i] <= 0.0) match = false;
      if (emb.S[i] * areas.A[i] >= 0.0) antimatch = false;
    }
    if (antimatch) {
      emb.points.row(1) *= -1.0;
      emb.S = -emb.S;
      match = true;
    }
    if (!match) {
      root.rejection = "signed areas incompatible with the sign pattern of A (negative mass)";
      continue;
    }

    PlanarCentralConfig cc;
    cc.areas = areas;
    cc.lambda = root.lambda;
    cc.distances = *dists;
    cc.signed_areas = emb.S;
    cc.masses = kMassUnitFactor * emb.S.cwiseQuotient(areas.A);

    std::array<double, 4> user_masses{cc.masses[0], cc.masses[1], cc.masses[2], cc.masses[3]};
    try {
      cc.canonical_masses = MassQuadruple::fromUnordered(user_masses);
      cc.tet = build_shape_tetrahedron(cc.canonical_masses);
    } catch (const DegenerateMasses&) {
      root.rejection = "recovered masses are degenerate; shape tetrahedron undefined";
      continue;
    }

    // center of mass to the origin, then the canonical decomposition
    const Eigen::Vector2d com =
        emb.points * cc.masses / cc.masses.sum();
    cc.embedding = emb.points.colwise() - com;

    Matrix34d user3 = Matrix34d::Zero();
    user3.topRows<2>() = cc.embedding;
    const Matrix34d canonical3 = cc.canonical_masses.toCanonical(user3);
    CoordinateDecomposition dec = decompose_configuration(canonical3, cc.tet);
    cc.R1 = dec.R[0];
    cc.R2 = dec.R[1];
    cc.theta = std::atan2(cc.R2, cc.R1);
    cc.Gp = dec.Gp;

    // positive-gauge area constant: flipping columns 2,3 of both rotations
    // leaves the decomposition valid and the null axis reversed
    const Eigen::Vector4d S_canon = cc.canonical_masses.toCanonical(cc.signed_areas);
    Eigen::Vector4d w = shape_area_direction(cc.tet, cc.Gp);
    double C = S_canon.dot(w) / w.dot(w);
    if (C < 0.0) {
      cc.Gp.col(1) *= -1.0;
      cc.Gp.col(2) *= -1.0;
      w = shape_area_direction(cc.tet, cc.Gp);
      C = S_canon.dot(w) / w.dot(w);
    }
    cc.area_constant = C;
    const double area_mismatch =
        (S_canon - C * w).cwiseAbs().maxCoeff() / S_canon.cwiseAbs().maxCoeff();
    if (area_mismatch > 1e-8) {
      root.rejection = "embedded areas inconsistent with the shape direction";
      continue;
    }

    cc.residuals = compute_residuals(cc, canonical3);
    const Matrix34d acc = accelerations(canonical3, cc.canonical_masses);
    cc.kappa = -acc.col(0).dot(canonical3.col(0)) / canonical3.col(0).squaredNorm();

    root.physical = true;
    root.config = std::move(cc);
  }
  return roots;
}

PlanarCentralConfig dziobek_solve(const WeightedAreas& areas) {
  const std::vector<DziobekRoot> roots = dziobek_scan(areas);
  if (roots.empty()) {
    throw NoRoot("the Cayley-Menger determinant has no zero in the admissible lambda interval");
  }
  for (const DziobekRoot& r : roots) {
    if (r.physical) return *r.config;
  }
  std::string detail = "no physically valid root:";
  for (const DziobekRoot& r : roots) {
    detail += " [lambda=" + std::to_string(r.lambda) + ": " + r.rejection + "]";
  }
  throw NegativeMass(detail);
}

namespace {

double conic_radius(const ConicParams& conic, double psi) {
  return conic.p / (1.0 + conic.e * std::cos(psi - conic.psi0));
}

}  // namespace

double shape_attraction(const PlanarCentralConfig& cc) {
  double V = 0.0;
  for (std::size_t k = 0; k < kPairOrder.size(); ++k) {
    const auto [i, j] = kPairOrder[k];
    V -= cc.masses[i] * cc.masses[j] / cc.distances[k];
  }
  return -V * cc.scale();
}

double circular_angular_rate(const PlanarCentralConfig& cc) {
  return std::sqrt(cc.sigma * cc.totalMass());
}

std::vector<OrbitSample> homographic_trajectory(const PlanarCentralConfig& cc,
                                                const ConicParams& conic,
                                                int n_samples) {
  if (!(conic.p > 0.0) || !(conic.e >= 0.0 && conic.e < 1.0) || n_samples < 2) {
    throw std::invalid_argument("homographic_trajectory needs p > 0, 0 <= e < 1, n >= 2");
  }
  const KeplerElements kep = kepler_elements(cc, conic);
  const double c = std::cos(cc.theta), s = std::sin(cc.theta);
  std::vector<OrbitSample> out;
  out.reserve(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    OrbitSample smp;
    smp.psi = conic.psi0 + 2.0 * M_PI * static_cast<double>(k) / n_samples;
    smp.t = kepler_time_from_anomaly(smp.psi - conic.psi0, kep);
    const double R = conic_radius(conic, smp.psi);
    const Eigen::Matrix<double, 2, 4> canonical =
        planar_forward_transform(smp.psi, R * c, R * s, cc.Gp, cc.tet);
    Matrix34d canonical3 = Matrix34d::Zero();
    canonical3.topRows<2>() = canonical;
    smp.positions = cc.canonical_masses.toUser(canonical3).topRows<2>();
    out.push_back(smp);
  }
  return out;
}

ConfigurationState homographic_state(const PlanarCentralConfig& cc,
                                     const ConicParams& conic, double psi) {
  const double mu = cc.tet.mu;
  const double beta = shape_attraction(cc);
  const double P_psi = std::sqrt(mu * beta * conic.p);
  const double R = conic_radius(conic, psi);
  const double psidot = P_psi / (mu * R * R);
  const double Rdot =
      R * conic.e * std::sin(psi - conic.psi0) / (1.0 + conic.e * std::cos(psi - conic.psi0)) *
      psidot;
  const double c = std::cos(cc.theta), s = std::sin(cc.theta);

  Eigen::Matrix3d Rz = Eigen::Matrix3d::Zero();
  Rz(0, 0) = std::cos(psi);
  Rz(0, 1) = -std::sin(psi);
  Rz(1, 0) = std::sin(psi);
  Rz(1, 1) = std::cos(psi);
  Rz(2, 2) = 1.0;
  Eigen::Matrix3d Rzdot = Eigen::Matrix3d::Zero();
  Rzdot(0, 0) = -std::sin(psi) * psidot;
  Rzdot(0, 1) = -std::cos(psi) * psidot;
  Rzdot(1, 0) = std::cos(psi) * psidot;
  Rzdot(1, 1) = -std::sin(psi) * psidot;

  const Eigen::Vector3d D(R * c, R * s, 0.0);
  const Eigen::Vector3d Dd(Rdot * c, Rdot * s, 0.0);
  const Matrix34d base = cc.Gp.transpose() * cc.tet.E;

  ConfigurationState st;
  st.masses = cc.canonical_masses;
  st.positions = Rz * D.asDiagonal() * base;
  st.velocities = (Rzdot * D.asDiagonal() + Rz * Dd.asDiagonal()) * base;
  return st;
}

PlanarInvariants planar_energy_momentum(double mu, const PlanarKinematics& kin) {
  const double R1 = kin.R * std::cos(kin.theta);
  const double R2 = kin.R * std::sin(kin.theta);
  PlanarInvariants out;
  out.P_psi = mu * (kin.psidot * (R1 * R1 + R2 * R2) - 2.0 * R1 * R2 * kin.Omega[2]);
  const double c2t = std::cos(2.0 * kin.theta);
  const double st = std::sin(kin.theta), ct = std::cos(kin.theta);
  out.energy = 0.5 * mu *
                   (kin.Rdot * kin.Rdot +
                    kin.R * kin.R *
                        (kin.thetadot * kin.thetadot + kin.Omega[2] * kin.Omega[2] * c2t * c2t +
                         kin.Omega[0] * kin.Omega[0] * st * st +
                         kin.Omega[1] * kin.Omega[1] * ct * ct)) +
               out.P_psi * out.P_psi / (2.0 * mu * kin.R * kin.R) + kin.potential;
  return out;
}

PlanarKinematics orbit_kinematics(const PlanarCentralConfig& cc,
                                  const ConicParams& conic, double psi) {
  const double mu = cc.tet.mu;
  const double beta = shape_attraction(cc);
  const double P_psi = std::sqrt(mu * beta * conic.p);
  PlanarKinematics kin;
  kin.R = conic_radius(conic, psi);
  kin.psidot = P_psi / (mu * kin.R * kin.R);
  kin.Rdot = kin.R * conic.e * std::sin(psi - conic.psi0) /
             (1.0 + conic.e * std::cos(psi - conic.psi0)) * kin.psidot;
  kin.theta = cc.theta;
  kin.potential = -beta / kin.R;
  return kin;
}

KeplerElements kepler_elements(const PlanarCentralConfig& cc, const ConicParams& conic) {
  if (!(conic.e >= 0.0 && conic.e < 1.0)) {
    throw std::invalid_argument("kepler timing needs 0 <= e < 1");
  }
  KeplerElements k;
  k.e = conic.e;
  const double a = conic.p / (1.0 - conic.e * conic.e);
  k.mean_motion = std::sqrt(shape_attraction(cc) / (cc.tet.mu * a * a * a));
  k.period = 2.0 * M_PI / k.mean_motion;
  return k;
}

double kepler_time_from_anomaly(double nu, const KeplerElements& k) {
  const double krev = std::floor((nu + M_PI) / (2.0 * M_PI));
  const double E = 2.0 * std::atan2(std::sqrt(1.0 - k.e) * std::sin(0.5 * nu),
                                    std::sqrt(1.0 + k.e) * std::cos(0.5 * nu)) +
                   2.0 * M_PI * krev;
  return (E - k.e * std::sin(E)) / k.mean_motion;
}

double kepler_anomaly_from_time(double t, const KeplerElements& k) {
  const double M = k.mean_motion * t;
  double E = M;
  for (int it = 0; it < 100; ++it) {
    const double step = (E - k.e * std::sin(E) - M) / (1.0 - k.e * std::cos(E));
    E -= step;
    if (std::abs(step) <= 1e-13) break;
  }
  const double krev = std::floor((E + M_PI) / (2.0 * M_PI));
  const double Ered = E - 2.0 * M_PI * krev;
  return 2.0 * std::atan2(std::sqrt(1.0 + k.e) * std::sin(0.5 * Ered),
                          std::sqrt(1.0 - k.e) * std::cos(0.5 * Ered)) +
         2.0 * M_PI * krev;
}

}  // namespace fourbody
