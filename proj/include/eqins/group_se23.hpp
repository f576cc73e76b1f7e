#pragma once

#include "eqins/lie_core.hpp"

namespace eqins {

/// Element of SE2(3): attitude plus a 3x2 translation block whose columns
/// are velocity (m/s) and position (m).
struct ExtendedPose {
  Rotation r;
  Mat32 w = Mat32::Zero();

  Vec3 velocity() const { return w.col(0); }
  Vec3 position() const { return w.col(1); }
  static ExtendedPose identity() { return ExtendedPose{}; }
};

/// Element of se2(3), e.g. the IMU input U = (omega, (a 0)).
struct Se23Tangent {
  Vec3 omega = Vec3::Zero();
  Mat32 w = Mat32::Zero();
};

/// Element of SIM2(3): rotation, 3x2 translation block, invertible 2x2 scale.
struct SimGroupElement {
  Rotation r;
  Mat32 w = Mat32::Zero();
  Mat2 a = Mat2::Identity();
  static SimGroupElement identity() { return SimGroupElement{}; }
};

/// Element of sim2(3).
struct SimTangent {
  Vec3 omega = Vec3::Zero();
  Mat32 w = Mat32::Zero();
  Mat2 s = Mat2::Zero();
};

ExtendedPose se23_compose(const ExtendedPose& x, const ExtendedPose& y);
ExtendedPose se23_inverse(const ExtendedPose& x);

// Throw SingularScaleError when a scale block is not invertible.
SimGroupElement sim23_compose(const SimGroupElement& z1, const SimGroupElement& z2);
SimGroupElement sim23_inverse(const SimGroupElement& z);

// Conjugation sigma_Z(X) = Z X Z^-1, an automorphism of SE2(3), evaluated in
// closed form. Throws SingularScaleError.
ExtendedPose conjugate(const SimGroupElement& z, const ExtendedPose& x);

// Commutator [Gamma, X] as a 5x5 value; always lies in the tangent space of
// SE2(3) at X (bottom two rows zero).
Mat5 bracket_sim_se23(const SimTangent& gamma, const ExtendedPose& x);

// Observer error Ebar for the reduced auxiliary state Z = (I3, wz, I2):
//   R_E = R Rhat', W_E = (W - R_E What) - (I3 - R_E) wz.
ExtendedPose observer_error(const ExtendedPose& x, const ExtendedPose& xhat,
                            const Mat32& wz);

// 5x5 matrix embeddings and their checked inverses (oracle conversions).
Mat5 embed(const ExtendedPose& x);
Mat5 embed(const Se23Tangent& d);
Mat5 embed(const SimGroupElement& z);
Mat5 embed(const SimTangent& g);
ExtendedPose extended_pose_from_matrix(const Mat5& m);
SimGroupElement sim_group_from_matrix(const Mat5& m);

}  // namespace eqins
