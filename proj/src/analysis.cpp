#include "eqins/analysis.hpp"

#include <cmath>
#include <vector>

namespace eqins {

Mat2 closed_loop_matrix(const Gains& k) {
  Mat2 m;
  m << 0.0, -1.0,
       k.lv(), k.lp();
  return m;
}

std::pair<double, double> characteristic_roots(const Gains& k) {
  const double disc = std::sqrt(k.lp() * k.lp() - 4.0 * k.lv());
  return {(-k.lp() + disc) / 2.0, (-k.lp() - disc) / 2.0};
}

SpectralData spectral_data(const Gains& k) {
  const auto [r1, r2] = characteristic_roots(k);
  SpectralData sd;
  sd.s1 = -r2;
  sd.s2 = -r1;
  // Right eigenvector of [[0,-1],[l_v,l_p]] for eigenvalue s is (1, -s).
  const Eigen::Vector2d q1 = Eigen::Vector2d(1.0, -sd.s1).normalized();
  const Eigen::Vector2d q2 = Eigen::Vector2d(1.0, -sd.s2).normalized();
  sd.p_mat.col(0) = q1;
  sd.p_mat.col(1) = q2;
  sd.m_p = sd.p_mat.jacobiSvd().singularValues()(1);
  sd.alpha = k.c() / (2.0 * sd.s2);
  return sd;
}

double lyapunov_value(const ExtendedPose& ebar, const SpectralData& sd) {
  const double trace_term = 3.0 - ebar.r.trace();
  const double w_term = (ebar.w * sd.p_mat).squaredNorm();
  // trace_term can land a few ulp below zero at the identity; clamp
  return std::max(0.0, trace_term + sd.alpha / (2.0 * sd.m_p * sd.m_p) * w_term);
}

std::pair<double, double> trace_pairing_check(const Rotation& r, const Vec3& x,
                                              const Vec3& y) {
  const Mat3& m = r.matrix();
  const double lhs = (m * hat(x.cross(y))).trace();
  const Mat3 imr2 = Mat3::Identity() - m * m;
  const double rhs = -0.5 * (imr2 * x).dot(imr2 * (m.transpose() * y));
  return {lhs, rhs};
}

double pe_metric(std::span<const Vec3> samples, double dt, double window_t) {
  const auto n = samples.size();
  if (!(dt > 0.0) || !(window_t > dt / 2.0)) {
    throw std::invalid_argument("pe_metric: window must cover at least one sample step");
  }
  const auto m = static_cast<std::size_t>(std::llround(window_t / dt));
  if (n < m + 1) {
    throw WindowTooLongError("pe_metric: series shorter than the window");
  }
  // Gram integrand |y|^2 I - y y' per sample, then prefix sums so each
  // trapezoid window is O(1).
  std::vector<Mat3> integrand(n);
  std::vector<Mat3> prefix(n + 1);
  prefix[0] = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& y = samples[i];
    integrand[i] = y.squaredNorm() * Mat3::Identity() - y * y.transpose();
    prefix[i + 1] = prefix[i] + integrand[i];
  }
  double best = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat3> eig;
  for (std::size_t i = 0; i + m < n; ++i) {
    const Mat3 gram =
        dt * (prefix[i + m + 1] - prefix[i] - 0.5 * integrand[i] - 0.5 * integrand[i + m]);
    eig.compute(gram, Eigen::EigenvaluesOnly);
    best = std::min(best, eig.eigenvalues()(0));
  }
  return best;
}

CascadeState pe_cascade_state(const Vec3& x1, const Vec3& x2, double l1, double l2) {
  if (!(l1 > 0.0) || !(l2 > 0.0) || !(l2 < l1 * l1 / 4.0)) {
    throw GainDomainError("pe_cascade_state: need l1 > 0 and 0 < l2 < l1^2/4");
  }
  const double k = (l1 - std::sqrt(l1 * l1 - 4.0 * l2)) / 2.0;
  return CascadeState{-k * x1 + x2, k};
}

LimitClass classify_limit(const ExtendedPose& ebar, double tol) {
  if (ebar.w.norm() > tol) {
    return LimitClass::Neither;
  }
  if (rotation_angle(ebar.r) <= tol) {
    return LimitClass::Stable;
  }
  if (std::abs(ebar.r.trace() + 1.0) <= tol) {
    return LimitClass::Unstable;
  }
  return LimitClass::Neither;
}

ErrorMetrics error_metrics(const SystemState& x, const ObserverState& obs,
                           const SpectralData& sd) {
  ErrorMetrics m;
  m.attitude_err = rotation_angle(x.r * obs.xhat.r.transpose());
  m.pos_err = (x.p - obs.xhat.position()).norm();
  m.vel_err = (x.v - obs.xhat.velocity()).norm();
  Mat32 w;
  w.col(0) = x.v;
  w.col(1) = x.p;
  m.lyapunov = lyapunov_value(observer_error(ExtendedPose{x.r, w}, obs.xhat, obs.wz), sd);
  return m;
}

}  // namespace eqins
