#include "eqins/dynamics.hpp"

namespace eqins {

Gains::Gains(double c, double lv, double lp) : c_(c), lv_(lv), lp_(lp) {
  if (!(c > 0.0)) {
    throw GainDomainError("Gains: c must be positive");
  }
  if (!(lp > 0.0)) {
    throw GainDomainError("Gains: l_p must be positive");
  }
  // Strict inequality: the repeated-eigenvalue boundary l_v = l_p^2/4 is
  // rejected so the closed-loop eigenbasis stays well defined.
  if (!(lv > 0.0) || !(lv < lp * lp / 4.0)) {
    throw GainDomainError("Gains: l_v must lie strictly in (0, l_p^2/4)");
  }
}

namespace detail {

RawSystem system_rhs(const RawSystem& s, const ImuInput& u, const Vec3& gravity) {
  return RawSystem{s.r * hat(u.omega), s.r * u.accel + gravity, s.v};
}

RawObserver observer_rhs(const RawObserver& o, const ImuInput& u,
                         const Corrections& corr, const Vec3& gravity) {
  RawObserver d;
  d.r = o.r * hat(u.omega) + hat(corr.omega_d) * o.r;
  d.v = o.r * u.accel + gravity + corr.w_d.col(0) + corr.omega_d.cross(o.v - o.vz);
  d.p = o.v + corr.w_d.col(1) + corr.omega_d.cross(o.p - o.pz);
  d.vz = gravity + corr.w_g.col(0);
  d.pz = o.vz + corr.w_g.col(1);
  return d;
}

Corrections correction_rhs(const Vec3& y, const Vec3& phat, const Vec3& pz,
                           const Gains& k) {
  Corrections corr;
  corr.omega_d = k.c() * (phat - pz).cross(y - pz);
  corr.w_d = (y - phat) * k.l();
  corr.w_g = (y - pz) * k.l();
  return corr;
}

}  // namespace detail

SystemDerivative system_derivative(const SystemState& s, const ImuInput& u,
                                   const Vec3& gravity) {
  const detail::RawSystem d =
      detail::system_rhs({s.r.matrix(), s.v, s.p}, u, gravity);
  return SystemDerivative{d.r, d.v, d.p};
}

Vec3 measure(const SystemState& s) { return s.p; }

Corrections correction_terms(const Vec3& y, const ObserverState& obs, const Gains& k) {
  return detail::correction_rhs(y, obs.xhat.position(), obs.pz(), k);
}

ObserverDerivative observer_derivative(const ObserverState& obs, const ImuInput& u,
                                       const Corrections& corr, const Vec3& gravity) {
  const detail::RawObserver d = detail::observer_rhs(
      {obs.xhat.r.matrix(), obs.xhat.velocity(), obs.xhat.position(), obs.vz(),
       obs.pz()},
      u, corr, gravity);
  return ObserverDerivative{d.r, d.v, d.p, d.vz, d.pz};
}

ErrorDerivative error_derivative(const ExtendedPose& ebar, const Corrections& corr) {
  const Mat3& re = ebar.r.matrix();
  ErrorDerivative d;
  d.r_dot = -re * hat(corr.omega_d);
  d.w_dot = ebar.w * column_shift() + re * (corr.w_g - corr.w_d) - corr.w_g;
  return d;
}

}  // namespace eqins
