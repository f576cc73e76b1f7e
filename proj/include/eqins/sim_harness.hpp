#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "eqins/analysis.hpp"

namespace eqins {

enum class Integrator { Euler, Rk4 };

// How RK4 turns its ambient attitude increment back into a rotation:
// projection (default, matches the Euler treatment) or an exponential-map
// reconstruction of the increment's skew part. Euler steps always project.
enum class AttitudeUpdate { Project, ExpMap };

/// Named input profile. "paper" is the reference experiment's input; the
/// constant profile holds fixed body-frame readings.
struct InputProfile {
  enum class Kind { Paper, Constant };
  Kind kind = Kind::Paper;
  Vec3 omega = Vec3::Zero();  // constant-profile parameters
  Vec3 accel = Vec3::Zero();
};

/// Pass/fail thresholds shared between the CLI summary and the test suite.
struct RunChecks {
  double lyapunov_increase_tol = 1e-4;  // per-step slack at the Euler 100 Hz setting
  double classify_tol = tol::limit_classification;
};

struct SimConfig {
  double duration = 40.0;
  double dt = 0.01;
  Integrator integrator = Integrator::Euler;
  AttitudeUpdate attitude_update = AttitudeUpdate::Project;
  Gains gains{4.0, 24.0, 20.0};
  Vec3 gravity = Vec3(0.0, 0.0, 9.81);
  SystemState initial_system{};
  ObserverState initial_observer{};
  InputProfile input_profile{};
  int measurement_decimation = 1;
  std::optional<double> noise_std{};  // additive measurement noise, m
  std::uint64_t seed = 0;
  RunChecks checks{};

  void validate() const;

  // The reference experiment: 40 s at 100 Hz Euler, gains (4, 24, 20),
  // attitude estimate initialised 0.99*pi away from the truth.
  static SimConfig paper();
};

struct TrajectoryPoint {
  double t = 0.0;
  SystemState system;
  ObserverState observer;
  ImuInput input;
  Vec3 measurement = Vec3::Zero();
  ErrorMetrics metrics;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<TrajectoryPoint> points;
};

// The reference experiment's inputs evaluated on the current true state:
// omega = e3 rad/s, accel = 2 e1 - R'(0.75 p + g).
ImuInput paper_input_profile(double t, const SystemState& s,
                             const Vec3& gravity = Vec3(0.0, 0.0, 9.81));

ImuInput evaluate_input(const InputProfile& profile, double t, const SystemState& s,
                        const Vec3& gravity);

// Advance the coupled system + observer by one step of cfg.dt starting at
// time t, using the instantaneous position measurement. Rotation blocks are
// integrated in the ambient space and re-projected onto SO(3) afterwards.
// Throws NumericalBlowupError when a state norm exceeds the guard.
std::pair<SystemState, ObserverState> step(const SimConfig& cfg, const SystemState& s,
                                           const ObserverState& obs, double t);

// Deterministic coupled run; records every step including t = 0.
Trajectory run(const SimConfig& cfg);

// CSV schema, one row per step:
//   t, R0..R8 (row-major), v0..v2, p0..p2, Rhat0..Rhat8, vhat0..vhat2,
//   phat0..phat2, vz0..vz2, pz0..pz2, att_err_rad, pos_err_m, vel_err_mps,
//   lyapunov
// printed with 17 significant digits. Throws IoError.
void write_csv(const Trajectory& traj, const std::filesystem::path& path);

struct SvgPlotOptions {
  bool log_scale_errors = false;
};

// Writes estimates.svg (true vs estimated roll/pitch/yaw, position, velocity)
// and errors.svg (attitude/position/velocity errors and the Lyapunov value)
// into dir. Throws IoError.
void write_svg_plots(const Trajectory& traj, const std::filesystem::path& dir,
                     const SvgPlotOptions& options = {});

// Intrinsic Z-Y-X (yaw-pitch-roll) angles, returned as (roll, pitch, yaw).
// Presentation helper for the estimate plots.
Vec3 euler_zyx(const Rotation& r);

}  // namespace eqins
