#pragma once

#include <Eigen/Dense>

#include "eqins/errors.hpp"

namespace eqins {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using RowVec2 = Eigen::Matrix<double, 1, 2>;

// Shared tolerance table. Tests and runtime checks must use these values,
// never local copies.
namespace tol {
inline constexpr double orthonormality = 1e-9;  // Rotation invariant, Frobenius
inline constexpr double skew_symmetry = 1e-9;   // vee() precondition
inline constexpr double singular_scale = 1e-12; // GL(2) determinant guard
inline constexpr double small_angle = 1e-8;     // so3_exp series switchover
inline constexpr double blowup_guard = 1e12;    // simulation divergence cutoff
inline constexpr double limit_classification = 1e-2;  // classify_limit default
}  // namespace tol

// Frobenius distance of m'm from the identity.
double orthonormality_defect(const Mat3& m);

/// A member of SO(3). Construction from a raw matrix is checked against the
/// orthonormality tolerance; operations between Rotations stay unchecked
/// since the set is closed under them.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose(), unchecked_t{}); }
  double trace() const { return m_.trace(); }

  template <typename Derived>
  auto operator*(const Eigen::MatrixBase<Derived>& rhs) const {
    return (m_ * rhs.derived()).eval();
  }
  Rotation operator*(const Rotation& o) const {
    return Rotation(m_ * o.m_, unchecked_t{});
  }

 private:
  struct unchecked_t {};
  Rotation(const Mat3& m, unchecked_t) : m_(m) {}

  friend Rotation so3_exp(const Vec3&);
  friend Rotation project_to_so3(const Mat3&);

  Mat3 m_;
};

// Skew matrix of w: hat(w) * u == w x u.
Mat3 hat(const Vec3& w);

// Inverse of hat. Throws NotSkewError when the antisymmetry defect of m
// exceeds tol::skew_symmetry.
Vec3 vee(const Mat3& m);

// Rodrigues closed form; second-order series below tol::small_angle.
Rotation so3_exp(const Vec3& w);

// Rotation angle in [0, pi] from the trace.
double rotation_angle(const Rotation& r);

// Nearest rotation in Frobenius norm (polar factor via SVD). Throws
// DegenerateMatrixError when m is singular beyond recovery.
Rotation project_to_so3(const Mat3& m);

}  // namespace eqins
