#include "fourbody/shape_tetrahedron.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fourbody {

MassQuadruple MassQuadruple::fromUnordered(const std::array<double, 4>& user_masses) {
  for (double m : user_masses) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("masses must be positive and finite");
    }
  }
  MassQuadruple out;
  std::array<int, 4> idx{0, 1, 2, 3};
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return user_masses[a] > user_masses[b];
  });
  out.perm_ = idx;
  for (int k = 0; k < 4; ++k) out.values_[k] = user_masses[idx[k]];
  return out;
}

bool MassQuadruple::isIdentityOrder() const {
  for (int k = 0; k < 4; ++k) {
    if (perm_[k] != k) return false;
  }
  return true;
}

bool MassQuadruple::pairwiseDistinct(double rel_tol) const {
  for (int k = 0; k < 3; ++k) {
    if (values_[k] - values_[k + 1] <= rel_tol * values_[k]) return false;
  }
  return true;
}

void MassQuadruple::requireDistinct() const {
  if (!pairwiseDistinct()) {
    throw DegenerateMasses("two masses coincide within tolerance; the rigid tetrahedron is not defined");
  }
}

Matrix34d MassQuadruple::toCanonical(const Matrix34d& user_columns) const {
  Matrix34d out;
  for (int k = 0; k < 4; ++k) out.col(k) = user_columns.col(perm_[k]);
  return out;
}

Matrix34d MassQuadruple::toUser(const Matrix34d& canonical_columns) const {
  Matrix34d out;
  for (int k = 0; k < 4; ++k) out.col(perm_[k]) = canonical_columns.col(k);
  return out;
}

Eigen::Vector4d MassQuadruple::toCanonical(const Eigen::Vector4d& user) const {
  Eigen::Vector4d out;
  for (int k = 0; k < 4; ++k) out[k] = user[perm_[k]];
  return out;
}

Eigen::Vector4d MassQuadruple::toUser(const Eigen::Vector4d& canonical) const {
  Eigen::Vector4d out;
  for (int k = 0; k < 4; ++k) out[perm_[k]] = canonical[k];
  return out;
}

double reduced_mass(const MassQuadruple& masses) {
  const Eigen::Vector4d& m = masses.values();
  return std::cbrt(m.prod() / m.sum());
}

namespace {

struct SymFuncs {
  double m, e2, e3, e4;
};

SymFuncs sym_funcs(const Eigen::Vector4d& m) {
  SymFuncs s;
  s.m = m.sum();
  s.e2 = m[0] * m[1] + m[0] * m[2] + m[0] * m[3] + m[1] * m[2] + m[1] * m[3] + m[2] * m[3];
  s.e3 = m[0] * m[1] * m[2] + m[0] * m[1] * m[3] + m[0] * m[2] * m[3] + m[1] * m[2] * m[3];
  s.e4 = m.prod();
  return s;
}

double cubic_val(const SymFuncs& s, double x) {
  return ((-s.m * x + 2.0 * s.e2) * x - 3.0 * s.e3) * x + 4.0 * s.e4;
}

double cubic_der(const SymFuncs& s, double x) {
  return (-3.0 * s.m * x + 4.0 * s.e2) * x - 3.0 * s.e3;
}

// One root bracketed in (lo, hi); bisection to near machine width, then a
// few Newton steps to polish.
double bracketed_root(const SymFuncs& s, double lo, double hi) {
  double a = lo, b = hi;
  double fa = cubic_val(s, a);
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (a + b);
    const double fc = cubic_val(s, c);
    if (fc == 0.0) return c;
    if (fa * fc < 0.0) {
      b = c;
    } else {
      a = c;
      fa = fc;
    }
    if (b - a <= 1e-16 * std::abs(c)) break;
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 4; ++it) {
    const double d = cubic_der(s, x);
    if (d == 0.0) break;
    const double step = cubic_val(s, x) / d;
    const double xn = x - step;
    if (xn <= lo || xn >= hi) break;  // keep the interlacing bracket
    x = xn;
    if (std::abs(step) <= 1e-17 * std::abs(x)) break;
  }
  return x;
}

}  // namespace

double characteristic_cubic_value(const MassQuadruple& masses, double x) {
  return cubic_val(sym_funcs(masses.values()), x);
}

CubicRoots characteristic_cubic_roots(const MassQuadruple& masses) {
  masses.requireDistinct();
  const Eigen::Vector4d& m = masses.values();
  const SymFuncs s = sym_funcs(m);
  // Exactly one root in each interval (m_{k+1}, m_k); the cubic is nonzero at
  // the masses themselves for pairwise-distinct masses.
  CubicRoots r;
  r.x_a = bracketed_root(s, m[1], m[0]);
  r.x_b = bracketed_root(s, m[2], m[1]);
  r.x_c = bracketed_root(s, m[3], m[2]);
  return r;
}

ShapeTetrahedron build_shape_tetrahedron(const MassQuadruple& masses) {
  masses.requireDistinct();
  ShapeTetrahedron tet;
  tet.masses = masses;
  tet.mu = reduced_mass(masses);
  tet.roots = characteristic_cubic_roots(masses);

  const Eigen::Vector4d& m = masses.values();
  const Eigen::Vector3d roots = tet.roots.vec();
  for (int row = 0; row < 3; ++row) {
    Eigen::Vector4d w;
    for (int j = 0; j < 4; ++j) w[j] = 1.0 / (m[j] - roots[row]);
    const double y = 1.0 / std::sqrt(tet.mu * (m.array() * w.array() * w.array()).sum());
    tet.normalizers[row] = y;
    tet.E.row(row) = (tet.mu * y) * w.transpose();
  }
  tet.d_vector = std::sqrt(tet.mu / m.sum()) * Eigen::Vector4d::Ones();
  return tet;
}

bool IdentityReport::allPass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Entry& e) { return e.pass; });
}

double IdentityReport::maxResidual() const {
  double r = 0.0;
  for (const auto& e : entries) r = std::max(r, e.residual);
  return r;
}

IdentityReport validate_shape_identities(const ShapeTetrahedron& tet,
                                         const MassQuadruple& masses,
                                         double tol) {
  const Eigen::Vector4d& m = masses.values();
  const double mu = tet.mu;
  const double mtot = m.sum();
  const Matrix34d& E = tet.E;

  Eigen::Matrix4d F;
  F.topRows<3>() = E;
  F.row(3) = tet.d_vector.transpose();

  IdentityReport rep;
  rep.tolerance = tol;
  auto set = [&](int i, const std::string& name, double residual) {
    rep.entries[i] = {name, residual, residual <= tol};
  };

  const Eigen::Matrix4d M = m.asDiagonal();
  set(0, "product",
      ((F * M * F.transpose()) / mu - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff());

  const Eigen::Matrix4d FtF = F.transpose() * F;
  const Eigen::Matrix4d inv_target = mu * m.cwiseInverse().asDiagonal().toDenseMatrix();
  set(1, "inverse", (FtF - inv_target).cwiseAbs().maxCoeff() / (mu / m[3]));

  const Eigen::Matrix4d Gram = E.transpose() * E;
  double col_norm = 0.0, col_cross = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double target = mu * (1.0 / m[j] - 1.0 / mtot);
    col_norm = std::max(col_norm, std::abs(Gram(j, j) - target) / target);
    for (int i = 0; i < 4; ++i) {
      if (i == j) continue;
      col_cross = std::max(col_cross, std::abs(Gram(i, j) + mu / mtot) / (mu / mtot));
    }
  }
  set(2, "column_norms", col_norm);
  set(3, "column_cross", col_cross);

  double ortho = 0.0;
  const double gram_scale = Gram.cwiseAbs().maxCoeff();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) {
        if (i == j || j == k || i == k) continue;
        ortho = std::max(ortho, std::abs(E.col(i).dot(E.col(j) - E.col(k))));
      }
    }
  }
  set(4, "orthocentric", ortho / gram_scale);

  double edges = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double target = mu * (1.0 / m[i] + 1.0 / m[j]);
      edges = std::max(edges, std::abs((E.col(i) - E.col(j)).squaredNorm() - target) / target);
    }
  }
  set(5, "edges", edges);

  Eigen::Matrix3d span;
  for (int j = 0; j < 3; ++j) span.col(j) = E.col(j + 1) - E.col(0);
  set(6, "volume", std::abs(std::abs(span.determinant()) / 6.0 - 1.0 / 6.0) * 6.0);

  set(7, "m_orthogonal",
      ((E * M * E.transpose()) / mu - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());

  return rep;
}

}  // namespace fourbody
