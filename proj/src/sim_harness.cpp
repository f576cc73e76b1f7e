#include "eqins/sim_harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "eqins/svg_plot.hpp"

namespace eqins {

namespace {

// Flat ambient-space state of the coupled system + observer. Rotation blocks
// are plain matrices so RK4 stage states may sit slightly off SO(3).
struct Ambient {
  Mat3 r;
  Vec3 v, p;
  Mat3 rh;
  Vec3 vh, ph, vz, pz;
};

Ambient operator+(const Ambient& a, const Ambient& b) {
  return {a.r + b.r,   a.v + b.v,   a.p + b.p,   a.rh + b.rh,
          a.vh + b.vh, a.ph + b.ph, a.vz + b.vz, a.pz + b.pz};
}

Ambient operator*(double s, const Ambient& a) {
  return {s * a.r,  s * a.v,  s * a.p,  s * a.rh,
          s * a.vh, s * a.ph, s * a.vz, s * a.pz};
}

Ambient to_ambient(const SystemState& s, const ObserverState& o) {
  return {s.r.matrix(), s.v,  s.p,    o.xhat.r.matrix(),
          o.xhat.velocity(), o.xhat.position(), o.vz(), o.pz()};
}

SystemState system_of(const Ambient& a) { return {Rotation(a.r), a.v, a.p}; }

ObserverState observer_of(const Ambient& a) {
  Mat32 what;
  what.col(0) = a.vh;
  what.col(1) = a.ph;
  Mat32 wz;
  wz.col(0) = a.vz;
  wz.col(1) = a.pz;
  return {ExtendedPose{Rotation(a.rh), what}, wz};
}

ImuInput input_at(const InputProfile& profile, double t, const Ambient& a,
                  const Vec3& gravity) {
  if (profile.kind == InputProfile::Kind::Constant) {
    return {profile.omega, profile.accel};
  }
  (void)t;  // the paper profile is time-invariant given the state
  return {Vec3(0.0, 0.0, 1.0),
          Vec3(2.0, 0.0, 0.0) - a.r.transpose() * (0.75 * a.p + gravity)};
}

// Coupled vector field. held_y, when present, replaces the instantaneous
// position measurement (sample-and-hold mode).
Ambient rhs(const SimConfig& cfg, double t, const Ambient& a,
            const std::optional<Vec3>& held_y) {
  const ImuInput u = input_at(cfg.input_profile, t, a, cfg.gravity);
  const Vec3 y = held_y ? *held_y : a.p;
  const Corrections corr = detail::correction_rhs(y, a.ph, a.pz, cfg.gains);
  const detail::RawSystem ds = detail::system_rhs({a.r, a.v, a.p}, u, cfg.gravity);
  const detail::RawObserver dob =
      detail::observer_rhs({a.rh, a.vh, a.ph, a.vz, a.pz}, u, corr, cfg.gravity);
  return {ds.r, ds.v, ds.p, dob.r, dob.v, dob.p, dob.vz, dob.pz};
}

// Pulls the ambient increment into the body frame and exponentiates it; an
// orthogonality-preserving alternative to projection. The skew part of
// exp(A) - I is A + A^3/6 + O(A^5), and A^3 = -|a|^2 A for skew A, so
// scaling by 1 + |a|^2/6 recovers A to fifth order.
Mat3 exp_reconstruct(const Mat3& r0, const Mat3& next_ambient) {
  const Mat3 incr = r0.transpose() * (next_ambient - r0);
  Vec3 xi(0.5 * (incr(2, 1) - incr(1, 2)), 0.5 * (incr(0, 2) - incr(2, 0)),
          0.5 * (incr(1, 0) - incr(0, 1)));
  xi *= 1.0 + xi.squaredNorm() / 6.0;
  return r0 * so3_exp(xi).matrix();
}

Ambient advance(const SimConfig& cfg, const Ambient& x, double t,
                const std::optional<Vec3>& held_y) {
  const double dt = cfg.dt;
  Ambient next = x;
  if (cfg.integrator == Integrator::Euler) {
    next = x + dt * rhs(cfg, t, x, held_y);
    next.r = project_to_so3(next.r).matrix();
    next.rh = project_to_so3(next.rh).matrix();
  } else {
    const Ambient k1 = rhs(cfg, t, x, held_y);
    const Ambient k2 = rhs(cfg, t + dt / 2, x + (dt / 2) * k1, held_y);
    const Ambient k3 = rhs(cfg, t + dt / 2, x + (dt / 2) * k2, held_y);
    const Ambient k4 = rhs(cfg, t + dt, x + dt * k3, held_y);
    next = x + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (cfg.attitude_update == AttitudeUpdate::ExpMap) {
      next.r = exp_reconstruct(x.r, next.r);
      next.rh = exp_reconstruct(x.rh, next.rh);
    } else {
      next.r = project_to_so3(next.r).matrix();
      next.rh = project_to_so3(next.rh).matrix();
    }
  }
  return next;
}

bool exceeded_guard(const Ambient& a) {
  const double g = tol::blowup_guard;
  return !(a.r.norm() < g && a.v.norm() < g && a.p.norm() < g && a.rh.norm() < g &&
           a.vh.norm() < g && a.ph.norm() < g && a.vz.norm() < g && a.pz.norm() < g);
}

}  // namespace

void SimConfig::validate() const {
  if (!(duration > 0.0)) {
    throw std::invalid_argument("SimConfig: duration must be positive");
  }
  if (!(dt > 0.0) || dt > duration) {
    throw std::invalid_argument("SimConfig: need 0 < dt <= duration");
  }
  if (measurement_decimation < 1) {
    throw std::invalid_argument("SimConfig: measurement_decimation must be >= 1");
  }
  if (noise_std && *noise_std < 0.0) {
    throw std::invalid_argument("SimConfig: noise_std must be nonnegative");
  }
}

SimConfig SimConfig::paper() {
  SimConfig cfg;
  cfg.duration = 40.0;
  cfg.dt = 0.01;
  cfg.integrator = Integrator::Euler;
  cfg.gains = Gains(4.0, 24.0, 20.0);
  cfg.gravity = Vec3(0.0, 0.0, 9.81);
  cfg.initial_system = SystemState{};
  ObserverState obs;
  Mat32 what;
  what.col(0) = Vec3(0.2, 0.4, -1.1);
  what.col(1) = Vec3(3.0, -2.0, 2.0);
  obs.xhat = ExtendedPose{so3_exp(Vec3(0.99 * M_PI, 0.0, 0.0)), what};
  obs.wz = Mat32::Zero();
  cfg.initial_observer = obs;
  cfg.input_profile = InputProfile{};
  return cfg;
}

ImuInput paper_input_profile(double t, const SystemState& s, const Vec3& gravity) {
  return input_at(InputProfile{}, t, to_ambient(s, ObserverState{}), gravity);
}

ImuInput evaluate_input(const InputProfile& profile, double t, const SystemState& s,
                        const Vec3& gravity) {
  return input_at(profile, t, to_ambient(s, ObserverState{}), gravity);
}

std::pair<SystemState, ObserverState> step(const SimConfig& cfg, const SystemState& s,
                                           const ObserverState& obs, double t) {
  const Ambient next = advance(cfg, to_ambient(s, obs), t, std::nullopt);
  if (exceeded_guard(next)) {
    throw NumericalBlowupError(static_cast<std::size_t>(std::llround(t / cfg.dt)) + 1,
                               "state norm exceeded blow-up guard");
  }
  return {system_of(next), observer_of(next)};
}

Trajectory run(const SimConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  const SpectralData sd = spectral_data(cfg.gains);
  const bool continuous = cfg.measurement_decimation == 1 && !cfg.noise_std;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.noise_std.value_or(0.0));

  Trajectory traj;
  traj.dt = cfg.dt;
  traj.points.reserve(n + 1);

  Ambient amb = to_ambient(cfg.initial_system, cfg.initial_observer);
  Vec3 held = amb.p;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (!continuous && k % static_cast<std::size_t>(cfg.measurement_decimation) == 0) {
      held = amb.p;
      if (cfg.noise_std) {
        for (int axis = 0; axis < 3; ++axis) {
          held(axis) += noise(rng);
        }
      }
    }
    TrajectoryPoint pt;
    pt.t = t;
    pt.system = system_of(amb);
    pt.observer = observer_of(amb);
    pt.input = input_at(cfg.input_profile, t, amb, cfg.gravity);
    pt.measurement = continuous ? amb.p : held;
    pt.metrics = error_metrics(pt.system, pt.observer, sd);
    traj.points.push_back(std::move(pt));
    if (k == n) {
      break;
    }
    amb = advance(cfg, amb, t, continuous ? std::nullopt : std::optional<Vec3>(held));
    if (exceeded_guard(amb)) {
      throw NumericalBlowupError(k + 1, "state norm exceeded blow-up guard");
    }
  }
  return traj;
}

namespace {

void append_num(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_mat3(std::string& out, const Mat3& m) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out += ',';
      append_num(out, m(i, j));
    }
  }
}

void append_vec3(std::string& out, const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    out += ',';
    append_num(out, v(i));
  }
}

}  // namespace

void write_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) {
    throw IoError("write_csv: cannot open " + path.string());
  }
  std::string line = "t";
  for (int i = 0; i < 9; ++i) line += ",R" + std::to_string(i);
  for (int i = 0; i < 3; ++i) line += ",v" + std::to_string(i);
  for (int i = 0; i < 3; ++i) line += ",p" + std::to_string(i);
  for (int i = 0; i < 9; ++i) line += ",Rhat" + std::to_string(i);
  for (int i = 0; i < 3; ++i) line += ",vhat" + std::to_string(i);
  for (int i = 0; i < 3; ++i) line += ",phat" + std::to_string(i);
  for (int i = 0; i < 3; ++i) line += ",vz" + std::to_string(i);
  for (int i = 0; i < 3; ++i) line += ",pz" + std::to_string(i);
  line += ",att_err_rad,pos_err_m,vel_err_mps,lyapunov\n";
  file << line;

  for (const TrajectoryPoint& pt : traj.points) {
    line.clear();
    append_num(line, pt.t);
    append_mat3(line, pt.system.r.matrix());
    append_vec3(line, pt.system.v);
    append_vec3(line, pt.system.p);
    append_mat3(line, pt.observer.xhat.r.matrix());
    append_vec3(line, pt.observer.xhat.velocity());
    append_vec3(line, pt.observer.xhat.position());
    append_vec3(line, pt.observer.vz());
    append_vec3(line, pt.observer.pz());
    line += ',';
    append_num(line, pt.metrics.attitude_err);
    line += ',';
    append_num(line, pt.metrics.pos_err);
    line += ',';
    append_num(line, pt.metrics.vel_err);
    line += ',';
    append_num(line, pt.metrics.lyapunov);
    line += '\n';
    file << line;
  }
  if (!file) {
    throw IoError("write_csv: write failed for " + path.string());
  }
}

Vec3 euler_zyx(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double pitch = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
  const double roll = std::atan2(m(2, 1), m(2, 2));
  const double yaw = std::atan2(m(1, 0), m(0, 0));
  return Vec3(roll, pitch, yaw);
}

void write_svg_plots(const Trajectory& traj, const std::filesystem::path& dir,
                     const SvgPlotOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("write_svg_plots: cannot create " + dir.string());
  }

  const std::size_t n = traj.points.size();
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = traj.points[k].t;

  const char* kTrueColor = "#1f77b4";
  const char* kEstColor = "#d62728";

  auto series_pair = [&](auto&& true_fn, auto&& est_fn) {
    svg::Series truth{"true", kTrueColor, t, {}};
    svg::Series est{"estimate", kEstColor, t, {}};
    truth.y.resize(n);
    est.y.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      truth.y[k] = true_fn(traj.points[k]);
      est.y[k] = est_fn(traj.points[k]);
    }
    return std::vector<svg::Series>{std::move(truth), std::move(est)};
  };

  std::vector<svg::Panel> estimates;
  const char* angle_names[3] = {"roll", "pitch", "yaw"};
  for (int i = 0; i < 3; ++i) {
    estimates.push_back(svg::Panel{
        std::string(angle_names[i]), "t [s]", "angle [rad]", false,
        series_pair([i](const TrajectoryPoint& p) { return euler_zyx(p.system.r)(i); },
                    [i](const TrajectoryPoint& p) { return euler_zyx(p.observer.xhat.r)(i); })});
  }
  const char* axis_names[3] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    estimates.push_back(svg::Panel{
        std::string("p_") + axis_names[i], "t [s]", "position [m]", false,
        series_pair([i](const TrajectoryPoint& p) { return p.system.p(i); },
                    [i](const TrajectoryPoint& p) { return p.observer.xhat.position()(i); })});
  }
  for (int i = 0; i < 3; ++i) {
    estimates.push_back(svg::Panel{
        std::string("v_") + axis_names[i], "t [s]", "velocity [m/s]", false,
        series_pair([i](const TrajectoryPoint& p) { return p.system.v(i); },
                    [i](const TrajectoryPoint& p) { return p.observer.xhat.velocity()(i); })});
  }
  svg::write_panel_grid(dir / "estimates.svg", estimates, 3);

  auto metric_series = [&](const char* label, auto&& fn) {
    svg::Series s{label, "#2ca02c", t, {}};
    s.y.resize(n);
    for (std::size_t k = 0; k < n; ++k) s.y[k] = fn(traj.points[k]);
    return std::vector<svg::Series>{std::move(s)};
  };
  const bool logy = options.log_scale_errors;
  std::vector<svg::Panel> errors;
  errors.push_back(svg::Panel{"attitude error", "t [s]", "angle [rad]", logy,
                              metric_series("attitude", [](const TrajectoryPoint& p) {
                                return p.metrics.attitude_err;
                              })});
  errors.push_back(svg::Panel{"position error", "t [s]", "error [m]", logy,
                              metric_series("position", [](const TrajectoryPoint& p) {
                                return p.metrics.pos_err;
                              })});
  errors.push_back(svg::Panel{"velocity error", "t [s]", "error [m/s]", logy,
                              metric_series("velocity", [](const TrajectoryPoint& p) {
                                return p.metrics.vel_err;
                              })});
  errors.push_back(svg::Panel{"Lyapunov value", "t [s]", "L", logy,
                              metric_series("lyapunov", [](const TrajectoryPoint& p) {
                                return p.metrics.lyapunov;
                              })});
  svg::write_panel_grid(dir / "errors.svg", errors, 2);
}

}  // namespace eqins
