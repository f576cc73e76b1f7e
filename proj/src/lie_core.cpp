#include "eqins/lie_core.hpp"

#include <cmath>

namespace eqins {

double orthonormality_defect(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).norm();
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  const double defect = orthonormality_defect(m);
  if (defect > tol::orthonormality) {
    throw std::invalid_argument("Rotation: orthonormality defect " +
                                std::to_string(defect) + " exceeds tolerance");
  }
  if (m.determinant() <= 0.0) {
    throw std::invalid_argument("Rotation: determinant must be positive");
  }
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  const double defect = (m + m.transpose()).norm();
  if (defect > tol::skew_symmetry) {
    throw NotSkewError("vee: antisymmetry defect " + std::to_string(defect) +
                       " exceeds tolerance");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Rotation so3_exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  Mat3 m;
  if (theta < tol::small_angle) {
    m = Mat3::Identity() + k + 0.5 * (k * k);
  } else {
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    m = Mat3::Identity() + a * k + b * (k * k);
  }
  return Rotation(m, Rotation::unchecked_t{});
}

double rotation_angle(const Rotation& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

Rotation project_to_so3(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(2) < 0.1) {
    throw DegenerateMatrixError("project_to_so3: input is singular beyond recovery");
  }
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return Rotation(svd.matrixU() * d * svd.matrixV().transpose(),
                  Rotation::unchecked_t{});
}

}  // namespace eqins
