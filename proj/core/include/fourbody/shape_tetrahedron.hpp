#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace fourbody {

using Matrix34d = Eigen::Matrix<double, 3, 4>;

struct DegenerateMasses : std::runtime_error {
  explicit DegenerateMasses(const std::string& what) : std::runtime_error(what) {}
};

// Relative gap below which two masses are treated as equal and rejected by
// the tetrahedron construction (the basis-vector formulas have poles there).
inline constexpr double kMassDegeneracyTol = 1e-9;

// Four positive masses, stored in canonical descending order together with
// the permutation that maps canonical slots back to the caller's order.
class MassQuadruple {
 public:
  // Accepts masses in any order; sorts descending (ties allowed here,
  // rejected later by the cubic/tetrahedron builders).
  static MassQuadruple fromUnordered(const std::array<double, 4>& user_masses);

  double m(int i) const { return values_[i]; }            // canonical, m(0) >= ... >= m(3)
  const Eigen::Vector4d& values() const { return values_; }
  double total() const { return values_.sum(); }

  // user index of the body sitting in canonical slot k
  int userIndex(int k) const { return perm_[k]; }
  bool isIdentityOrder() const;
  bool pairwiseDistinct(double rel_tol = kMassDegeneracyTol) const;
  void requireDistinct() const;  // throws DegenerateMasses

  // Column permutations between the caller's body order and canonical order.
  Matrix34d toCanonical(const Matrix34d& user_columns) const;
  Matrix34d toUser(const Matrix34d& canonical_columns) const;
  Eigen::Vector4d toCanonical(const Eigen::Vector4d& user) const;
  Eigen::Vector4d toUser(const Eigen::Vector4d& canonical) const;

 private:
  Eigen::Vector4d values_;
  std::array<int, 4> perm_;
};

// mu = ((m1 m2 m3 m4) / (m1+m2+m3+m4))^(1/3); defined for any positive masses.
double reduced_mass(const MassQuadruple& masses);

// Roots of the characteristic cubic
//   -x^3 m + 2 x^2 e2 - 3 x e3 + 4 e4 = 0
// (m, e2, e3, e4 the elementary symmetric functions of the masses),
// interlacing the masses: m1 > x_a > m2 > x_b > m3 > x_c > m4.
struct CubicRoots {
  double x_a, x_b, x_c;
  Eigen::Vector3d vec() const { return {x_a, x_b, x_c}; }
};

CubicRoots characteristic_cubic_roots(const MassQuadruple& masses);

// Cubic evaluated at x; exposed for oracle-style checks.
double characteristic_cubic_value(const MassQuadruple& masses, double x);

// The constant mass-dependent 3x4 matrix E whose columns are the vertices of
// the rigid orthogonal tetrahedron, plus everything computed on the way.
struct ShapeTetrahedron {
  Matrix34d E;               // rows a, b, c (canonical mass order)
  double mu = 0.0;
  CubicRoots roots{};
  Eigen::Vector4d d_vector;  // sqrt(mu/m_total) * (1,1,1,1)
  Eigen::Vector3d normalizers;  // y_a, y_b, y_c (all positive)
  MassQuadruple masses;

  Eigen::Vector3d vertex(int j) const { return E.col(j); }
};

// Builds E for pairwise-distinct masses; throws DegenerateMasses otherwise.
// Normalizer signs are chosen positive, which fixes the row sign pattern
//   a: (+,-,-,-)   b: (+,+,-,-)   c: (+,+,+,-).
ShapeTetrahedron build_shape_tetrahedron(const MassQuadruple& masses);

// Max relative residuals of the algebraic identities satisfied by E.
struct IdentityReport {
  struct Entry {
    std::string name;
    double residual = 0.0;  // relative to the identity's natural scale
    bool pass = false;
  };
  std::array<Entry, 8> entries;
  double tolerance = 1e-12;

  bool allPass() const;
  double maxResidual() const;
  const Entry& operator[](int i) const { return entries[i]; }
};

// Checks, at tolerance tol:
//   product        (1/mu) F M F^T = I_4          with F = [a; b; c; d]
//   inverse        F^T F = mu M^{-1}
//   column_norms   a_j^2+b_j^2+c_j^2 = mu (1/m_j - 1/m)
//   column_cross   a_i a_j + b_i b_j + c_i c_j = -mu/m   (i != j)
//   orthocentric   v_i . (v_j - v_k) = 0
//   edges          |v_i - v_j|^2 = mu (1/m_i + 1/m_j)
//   volume         |det[v2-v1, v3-v1, v4-v1]| / 6 = 1/6
//   m_orthogonal   E M E^T = mu I_3
IdentityReport validate_shape_identities(const ShapeTetrahedron& tet,
                                         const MassQuadruple& masses,
                                         double tol = 1e-12);

}  // namespace fourbody
