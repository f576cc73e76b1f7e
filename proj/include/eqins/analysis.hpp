#pragma once

#include <span>
#include <utility>

#include "eqins/dynamics.hpp"

namespace eqins {

/// Spectral quantities of the closed-loop translation-error flow
/// Wdot_E = -W_E (C L - S), with C = (0 1)' and S the column shift.
struct SpectralData {
  double s1 = 0.0;  // eigenvalues of CL - S, s1 >= s2 > 0
  double s2 = 0.0;
  // Columns are unit-norm right eigenvectors of CL - S (first component
  // positive, s1 first): (CL - S) p_mat = p_mat diag(s1, s2). This is the
  // convention under which |W_E p_mat|^2 is monotone along the flow.
  Mat2 p_mat = Mat2::Identity();
  double m_p = 1.0;   // smallest singular value of p_mat
  double alpha = 0.0; // fixed at its lower bound c / (2 s2)
};

struct ErrorMetrics {
  double attitude_err = 0.0;  // rad
  double pos_err = 0.0;       // m
  double vel_err = 0.0;       // m/s
  double lyapunov = 0.0;
};

enum class LimitClass { Stable, Unstable, Neither };

// Closed-loop matrix CL - S for the given gains: [[0, -1], [l_v, l_p]].
Mat2 closed_loop_matrix(const Gains& k);

// Roots of s^2 + l_p s + l_v = 0, both strictly negative; the less negative
// root first.
std::pair<double, double> characteristic_roots(const Gains& k);

SpectralData spectral_data(const Gains& k);

// Lyapunov value tr(I3 - R_E) + alpha / (2 m_p^2) |W_E P|^2; nonnegative and
// zero only at the identity error.
double lyapunov_value(const ExtendedPose& ebar, const SpectralData& sd);

// Both sides of the trace-pairing identity
//   tr(R (x cross y)^) = -1/2 <(I - R^2) x, (I - R^2) R' y>.
std::pair<double, double> trace_pairing_check(const Rotation& r, const Vec3& x,
                                              const Vec3& y);

// Persistence-of-excitation level of a uniformly sampled signal: the minimum
// over sliding windows of the smallest eigenvalue of the windowed Gram
// integral of |y|^2 I - y y' (trapezoid quadrature). Throws WindowTooLongError
// when the series does not cover window_t.
double pe_metric(std::span<const Vec3> samples, double dt, double window_t);

struct CascadeState {
  Vec3 z = Vec3::Zero();
  double k = 0.0;
};

// Decoupling state of the excitation-cascade filter: z = -k x1 + x2 with k the
// smaller root of k^2 - l1 k + l2 = 0, so that zdot = -k z + a along
// x1dot = -l1 x1 + x2, x2dot = -l2 x1 + a. Requires l1 > 0, 0 < l2 < l1^2/4.
CascadeState pe_cascade_state(const Vec3& x1, const Vec3& x2, double l1, double l2);

// Distance-to-limit-set classification with the shared default tolerance.
LimitClass classify_limit(const ExtendedPose& ebar,
                          double tol = tol::limit_classification);

ErrorMetrics error_metrics(const SystemState& x, const ObserverState& obs,
                           const SpectralData& sd);

}  // namespace eqins
