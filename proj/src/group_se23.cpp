#include "eqins/group_se23.hpp"

#include <cmath>

namespace eqins {

namespace {

// Closed-form adjugate inverse; only 2x2 inverses are ever needed.
Mat2 invert2(const Mat2& a) {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (std::abs(det) <= tol::singular_scale) {
    throw SingularScaleError("2x2 scale block is singular (|det| <= 1e-12)");
  }
  Mat2 inv;
  inv << a(1, 1), -a(0, 1),
         -a(1, 0), a(0, 0);
  return inv / det;
}

}  // namespace

ExtendedPose se23_compose(const ExtendedPose& x, const ExtendedPose& y) {
  return ExtendedPose{x.r * y.r, x.r * y.w + x.w};
}

ExtendedPose se23_inverse(const ExtendedPose& x) {
  const Rotation rt = x.r.transpose();
  return ExtendedPose{rt, -(rt * x.w)};
}

SimGroupElement sim23_compose(const SimGroupElement& z1, const SimGroupElement& z2) {
  return SimGroupElement{z1.r * z2.r, z1.r * z2.w + z1.w * z2.a, z1.a * z2.a};
}

SimGroupElement sim23_inverse(const SimGroupElement& z) {
  const Mat2 ainv = invert2(z.a);
  const Rotation rt = z.r.transpose();
  return SimGroupElement{rt, -(rt * z.w) * ainv, ainv};
}

ExtendedPose conjugate(const SimGroupElement& z, const ExtendedPose& x) {
  const Mat2 ainv = invert2(z.a);
  const Rotation rot = z.r * x.r * z.r.transpose();
  const Mat32 trans =
      z.r * x.w * ainv + (Mat3::Identity() - rot.matrix()) * (z.w * ainv);
  return ExtendedPose{rot, trans};
}

Mat5 bracket_sim_se23(const SimTangent& gamma, const ExtendedPose& x) {
  const Mat3 om = hat(gamma.omega);
  const Mat3& r = x.r.matrix();
  Mat5 out = Mat5::Zero();
  out.topLeftCorner<3, 3>() = om * r - r * om;
  out.topRightCorner<3, 2>() = om * x.w + gamma.w - r * gamma.w - x.w * gamma.s;
  return out;
}

ExtendedPose observer_error(const ExtendedPose& x, const ExtendedPose& xhat,
                            const Mat32& wz) {
  const Rotation re = x.r * xhat.r.transpose();
  const Mat32 we = (x.w - re * xhat.w) - (Mat3::Identity() - re.matrix()) * wz;
  return ExtendedPose{re, we};
}

Mat5 embed(const ExtendedPose& x) {
  Mat5 m = Mat5::Identity();
  m.topLeftCorner<3, 3>() = x.r.matrix();
  m.topRightCorner<3, 2>() = x.w;
  return m;
}

Mat5 embed(const Se23Tangent& d) {
  Mat5 m = Mat5::Zero();
  m.topLeftCorner<3, 3>() = hat(d.omega);
  m.topRightCorner<3, 2>() = d.w;
  return m;
}

Mat5 embed(const SimGroupElement& z) {
  Mat5 m = Mat5::Zero();
  m.topLeftCorner<3, 3>() = z.r.matrix();
  m.topRightCorner<3, 2>() = z.w;
  m.bottomRightCorner<2, 2>() = z.a;
  return m;
}

Mat5 embed(const SimTangent& g) {
  Mat5 m = Mat5::Zero();
  m.topLeftCorner<3, 3>() = hat(g.omega);
  m.topRightCorner<3, 2>() = g.w;
  m.bottomRightCorner<2, 2>() = g.s;
  return m;
}

ExtendedPose extended_pose_from_matrix(const Mat5& m) {
  if (m.bottomLeftCorner<2, 3>().norm() > tol::orthonormality ||
      (m.bottomRightCorner<2, 2>() - Mat2::Identity()).norm() > tol::orthonormality) {
    throw std::invalid_argument(
        "extended_pose_from_matrix: bottom block is not (0 I2)");
  }
  return ExtendedPose{Rotation(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 2>()};
}

SimGroupElement sim_group_from_matrix(const Mat5& m) {
  if (m.bottomLeftCorner<2, 3>().norm() > tol::orthonormality) {
    throw std::invalid_argument("sim_group_from_matrix: bottom-left block not zero");
  }
  const Mat2 a = m.bottomRightCorner<2, 2>();
  if (std::abs(a.determinant()) <= tol::singular_scale) {
    throw SingularScaleError("sim_group_from_matrix: singular scale block");
  }
  return SimGroupElement{Rotation(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 2>(), a};
}

}  // namespace eqins
