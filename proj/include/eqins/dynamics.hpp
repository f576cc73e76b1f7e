#pragma once

#include "eqins/group_se23.hpp"

namespace eqins {

/// True vehicle state: attitude, velocity, position in the inertial frame.
struct SystemState {
  Rotation r;
  Vec3 v = Vec3::Zero();
  Vec3 p = Vec3::Zero();
};

/// IMU reading: angular velocity and body-frame specific acceleration.
struct ImuInput {
  Vec3 omega = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

/// Observer gains (c, l_v, l_p). Admissibility is enforced at construction:
/// c > 0, l_p > 0 and 0 < l_v < l_p^2/4 strictly, so the closed-loop
/// eigenvalues are real, distinct and stable.
class Gains {
 public:
  Gains(double c, double lv, double lp);

  double c() const { return c_; }
  double lv() const { return lv_; }
  double lp() const { return lp_; }
  RowVec2 l() const { return (RowVec2() << lv_, lp_).finished(); }

 private:
  double c_;
  double lv_;
  double lp_;
};

/// Observer state: the estimate Xhat plus the auxiliary translation block
/// wz = (v_Z p_Z); the rest of the auxiliary SIM2(3) state stays identity.
struct ObserverState {
  ExtendedPose xhat;
  Mat32 wz = Mat32::Zero();

  Vec3 vz() const { return wz.col(0); }
  Vec3 pz() const { return wz.col(1); }
};

/// Innovation-driven correction terms (Omega_Delta, W_Delta, W_Gamma).
struct Corrections {
  Vec3 omega_d = Vec3::Zero();
  Mat32 w_d = Mat32::Zero();
  Mat32 w_g = Mat32::Zero();
  static Corrections zero() { return Corrections{}; }
};

struct SystemDerivative {
  Mat3 r_dot;
  Vec3 v_dot;
  Vec3 p_dot;
};

struct ObserverDerivative {
  Mat3 rhat_dot;
  Vec3 vhat_dot;
  Vec3 phat_dot;
  Vec3 vz_dot;
  Vec3 pz_dot;
};

struct ErrorDerivative {
  Mat3 r_dot;
  Mat32 w_dot;
};

// Nilpotent 2x2 block; right-multiplying W = (v p) by it yields (0 v), the
// coupling that feeds the velocity column into the position column.
inline Mat2 column_shift() { return (Mat2() << 0.0, 1.0, 0.0, 0.0).finished(); }

// The drift element D = (0, 0, column_shift()) of the group-affine form
// Xdot = XU + GX - [D, X].
inline SimTangent drift_element() { return SimTangent{Vec3::Zero(), Mat32::Zero(), column_shift()}; }

// Rdot = R hat(omega), vdot = R a + g, pdot = v.
SystemDerivative system_derivative(const SystemState& s, const ImuInput& u,
                                   const Vec3& gravity);

// GNSS position measurement.
Vec3 measure(const SystemState& s);

// Correction terms from the measured position y:
//   omega_d = c (phat - pz) x (y - pz),  w_d = (y - phat) L,  w_g = (y - pz) L.
Corrections correction_terms(const Vec3& y, const ObserverState& obs, const Gains& k);

// The five observer ODE lines; agrees with the Lie-group form
// Xhatdot = Xhat U + G Xhat - [D, Xhat] + Z Delta Z^-1 Xhat with the reduced Z.
ObserverDerivative observer_derivative(const ObserverState& obs, const ImuInput& u,
                                       const Corrections& corr, const Vec3& gravity);

// Error flow Ebardot = -Ebar Delta - [Gamma, Ebar] with Delta = (omega_d, w_d)
// and Gamma = (0, w_g, column_shift()); expanded:
//   Rdot_E = -R_E hat(omega_d),  Wdot_E = W_E S + R_E (w_g - w_d) - w_g.
ErrorDerivative error_derivative(const ExtendedPose& ebar, const Corrections& corr);

namespace detail {

// Raw-block right-hand sides shared by the public API and the integrator.
// Rotation blocks are plain matrices here: RK4 stage states sit slightly off
// the manifold and must not trip the Rotation invariant check.
struct RawSystem {
  Mat3 r;
  Vec3 v;
  Vec3 p;
};

struct RawObserver {
  Mat3 r;
  Vec3 v;
  Vec3 p;
  Vec3 vz;
  Vec3 pz;
};

RawSystem system_rhs(const RawSystem& s, const ImuInput& u, const Vec3& gravity);
RawObserver observer_rhs(const RawObserver& o, const ImuInput& u,
                         const Corrections& corr, const Vec3& gravity);
Corrections correction_rhs(const Vec3& y, const Vec3& phat, const Vec3& pz,
                           const Gains& k);

}  // namespace detail

}  // namespace eqins
