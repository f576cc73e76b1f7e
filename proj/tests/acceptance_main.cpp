// Acceptance suite for the observer artifact. Each numbered criterion prints
// one [PASS]/[FAIL] line; the process exits nonzero when any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eqins/config_io.hpp"
#include "eqins/sim_harness.hpp"
#include "test_support.hpp"

using namespace eqins;
using namespace eqins::testing;

namespace {

namespace fs = std::filesystem;

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.c_str());
  if (!pass) {
    ++g_failures;
  }
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Mat32 wbar_of(const TrajectoryPoint& pt) {
  Mat32 w;
  w.col(0) = pt.system.v;
  w.col(1) = pt.system.p;
  return observer_error(ExtendedPose{pt.system.r, w}, pt.observer.xhat, pt.observer.wz).w;
}

ExtendedPose ebar_of(const TrajectoryPoint& pt) {
  Mat32 w;
  w.col(0) = pt.system.v;
  w.col(1) = pt.system.p;
  return observer_error(ExtendedPose{pt.system.r, w}, pt.observer.xhat, pt.observer.wz);
}

// ---- criterion 1: Lie identity suite ---------------------------------------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(42);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = random_vec3(rng, 5.0);
    const Vec3 b = random_vec3(rng, 5.0);
    const Mat3 ax = hat(a);
    const Mat3 bx = hat(b);
    worst = std::max(worst, (ax * b + bx * a).cwiseAbs().maxCoeff());
    worst = std::max(worst, (ax.transpose() + ax).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (ax * bx - (b * a.transpose() - a.dot(b) * Mat3::Identity()))
                         .cwiseAbs()
                         .maxCoeff());
    worst = std::max(
        worst,
        (hat(a.cross(b)) - (b * a.transpose() - a * b.transpose())).cwiseAbs().maxCoeff());
    worst = std::max(worst, (vee(ax) - a).cwiseAbs().maxCoeff());
    worst = std::max(worst, (hat(vee(ax)) - ax).cwiseAbs().maxCoeff());
    const Mat3 r = so3_exp(a).matrix();
    worst = std::max(worst,
                     (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(r.determinant() - 1.0));
  }
  const double elapsed = seconds_since(t0);
  report(1, "Lie identity suite",
         worst <= 1e-10 && elapsed < 1.0,
         "max error " + fmt("%.3e", worst) + ", " + fmt("%.3f", elapsed) + " s");
}

// ---- criterion 2: automorphism suite ---------------------------------------

void criterion_2() {
  std::mt19937 rng(43);
  double worst = 0.0;
  bool closure = true;
  for (int i = 0; i < 1000; ++i) {
    const SimGroupElement z = random_sim(rng);
    const ExtendedPose x = random_pose(rng);
    const ExtendedPose y = random_pose(rng);

    worst = std::max(worst, max_abs(embed(conjugate(z, ExtendedPose::identity())) -
                                    Mat5::Identity()));
    const Mat5 mult = embed(conjugate(z, se23_compose(x, y))) -
                      embed(conjugate(z, x)) * embed(conjugate(z, y));
    worst = std::max(worst, max_abs(mult));
    const Mat5 oracle = embed(z) * embed(x) * embed(z).inverse();
    worst = std::max(worst, max_abs(embed(conjugate(z, x)) - oracle));

    try {
      const ExtendedPose out = conjugate(z, x);  // Rotation ctor revalidates
      closure = closure && orthonormality_defect(out.r.matrix()) <= tol::orthonormality;
    } catch (const std::exception&) {
      closure = false;
    }
  }
  report(2, "automorphism suite", worst <= 1e-10 && closure,
         "max error " + fmt("%.3e", worst) + (closure ? ", closure holds" : ", closure broken"));
}

// ---- criterion 3: error synchrony under zero corrections -------------------

void criterion_3() {
  const double drift = zero_correction_drift(10.0, 1e-3);
  report(3, "error synchrony with zero corrections", drift <= 1e-6,
         "max Frobenius drift " + fmt("%.3e", drift) + " over 10 s");
}

// ---- criterion 4: linear translation-error block ---------------------------

void criterion_4(const Trajectory& rk4_run, const Gains& gains, double s2) {
  const Mat32 we0 = wbar_of(rk4_run.points.front());
  double worst = 0.0;
  std::vector<double> ts, lognorms;
  for (const TrajectoryPoint& pt : rk4_run.points) {
    if (pt.t > 5.0 + 1e-12) {
      break;
    }
    const Mat32 we = wbar_of(pt);
    worst = std::max(
        worst, (we - we0 * expm_neg_closed_loop(gains, pt.t)).cwiseAbs().maxCoeff());
    if (pt.t >= 2.0) {
      ts.push_back(pt.t);
      lognorms.push_back(std::log(we.norm()));
    }
  }
  // least-squares slope of log |W_E| over [2, 5] s
  double mt = 0.0, ml = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += lognorms[i];
  }
  mt /= static_cast<double>(ts.size());
  ml /= static_cast<double>(ts.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (lognorms[i] - ml);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  const double rate = -num / den;
  const double rel = std::abs(rate - s2) / s2;
  report(4, "linear translation-error block", worst <= 1e-5 && rel <= 0.10,
         "max dev vs matrix exponential " + fmt("%.3e", worst) + ", fitted rate " +
             fmt("%.6f", rate) + " vs s2 " + fmt("%.6f", s2));
}

// ---- criterion 5: Lyapunov monotonicity ------------------------------------

void criterion_5(const Trajectory& rk4_run, const Trajectory& euler_run,
                 double runs_elapsed) {
  double worst_rk4 = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < rk4_run.points.size(); ++k) {
    worst_rk4 = std::max(worst_rk4, rk4_run.points[k + 1].metrics.lyapunov -
                                        rk4_run.points[k].metrics.lyapunov);
  }
  double worst_euler = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < euler_run.points.size(); ++k) {
    worst_euler = std::max(worst_euler, euler_run.points[k + 1].metrics.lyapunov -
                                            euler_run.points[k].metrics.lyapunov);
  }
  report(5, "Lyapunov monotonicity",
         worst_rk4 <= 1e-9 && worst_euler <= 1e-4 && runs_elapsed < 10.0,
         "max per-step increment: rk4 " + fmt("%.3e", worst_rk4) + ", euler " +
             fmt("%.3e", worst_euler) + ", runs took " + fmt("%.2f", runs_elapsed) + " s");
}

// ---- criterion 6: reference experiment reproduction ------------------------

// Frozen thresholds: 1.5x the final errors of an RK4 dt = 1e-4 reference run
// of the same configuration (computed once; see the README reproduction note).
constexpr double kAttitudeThreshold = 1.5 * 2.804943478e-04;
constexpr double kPositionThreshold = 1.5 * 5.506167224e-05;
constexpr double kVelocityThreshold = 1.5 * 1.143188340e-03;

void criterion_6(const Trajectory& euler_run) {
  const ErrorMetrics first = euler_run.points.front().metrics;
  const ErrorMetrics last = euler_run.points.back().metrics;
  const bool starts_far = std::abs(first.attitude_err - 0.99 * M_PI) < 1e-9 &&
                          std::abs(first.pos_err - std::sqrt(17.0)) < 1e-12;
  const LimitClass limit = classify_limit(ebar_of(euler_run.points.back()));
  const bool pass = starts_far && last.attitude_err <= kAttitudeThreshold &&
                    last.pos_err <= kPositionThreshold &&
                    last.vel_err <= kVelocityThreshold && limit == LimitClass::Stable;
  report(6, "reference experiment reproduction", pass,
         "final attitude " + fmt("%.3e", last.attitude_err) + " <= " +
             fmt("%.3e", kAttitudeThreshold) + ", position " + fmt("%.3e", last.pos_err) +
             " <= " + fmt("%.3e", kPositionThreshold) + ", velocity " +
             fmt("%.3e", last.vel_err) + " <= " + fmt("%.3e", kVelocityThreshold) +
             (limit == LimitClass::Stable ? ", Stable" : ", NOT stable"));
}

// ---- criterion 7: unstable set ----------------------------------------------

void criterion_7() {
  Mat3 q = Mat3::Identity();
  q(1, 1) = -1.0;
  q(2, 2) = -1.0;

  SimConfig hold = SimConfig::paper();
  hold.integrator = Integrator::Rk4;
  hold.dt = 1e-3;
  hold.duration = 5.0;
  hold.initial_observer = ObserverState{};
  hold.initial_observer.xhat.r = Rotation(q);  // R_E(0) = Q, W_E(0) = 0
  const Trajectory ht = run(hold);
  double worst = 0.0;
  for (const TrajectoryPoint& pt : ht.points) {
    const ExtendedPose e = ebar_of(pt);
    worst = std::max(worst, std::abs(e.r.trace() + 1.0));
    worst = std::max(worst, e.w.norm());
  }

  SimConfig esc = hold;
  esc.duration = 60.0;
  const Mat3 re0 = q * so3_exp(1e-3 * Vec3::UnitX()).matrix();
  esc.initial_observer.xhat.r = Rotation(Mat3(re0.transpose()));
  const Trajectory et = run(esc);
  const LimitClass limit = classify_limit(ebar_of(et.points.back()));
  const double final_angle = rotation_angle(ebar_of(et.points.back()).r);

  report(7, "unstable set hold and escape", worst <= 1e-6 && limit == LimitClass::Stable,
         "max distance to the unstable set " + fmt("%.3e", worst) +
             " over 5 s; perturbed run angle " + fmt("%.3e", final_angle) +
             " at 60 s" + (limit == LimitClass::Stable ? " (Stable)" : " (NOT stable)"));
}

// ---- criterion 8: trace pairing and excitation cascade ----------------------

void criterion_8(const Trajectory& euler_run, const Gains& gains) {
  // The pairing identity holds on the y = Rx / x = R'y pairings (the forms
  // the stability argument uses); unrelated (x, y) only agree after
  // symmetrization, so the random triples are drawn on those pairings.
  std::mt19937 rng(44);
  double worst_pairing = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Rotation r = random_rotation(rng);
    const Vec3 x = random_vec3(rng, 3.0);
    const auto [l1, r1] = trace_pairing_check(r, x, r * x);
    const auto [l2, r2] = trace_pairing_check(r, r.transpose() * x, x);
    worst_pairing = std::max({worst_pairing, std::abs(l1 - r1), std::abs(l2 - r2)});
  }

  const std::size_t n = euler_run.points.size();
  std::vector<Vec3> ra(n), x1(n), x2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const TrajectoryPoint& pt = euler_run.points[k];
    ra[k] = pt.system.r.matrix() * pt.input.accel;
    x1[k] = pt.system.p - pt.observer.pz();
    x2[k] = pt.system.v - pt.observer.vz();
  }
  const double window = 2.0 * M_PI;
  const double pe_ra = pe_metric(ra, euler_run.dt, window);
  const double pe_x1 = pe_metric(x1, euler_run.dt, window);

  // z-state residual zdot + k z - a by central differences along the run
  double k_gain = 0.0;
  std::vector<Vec3> zs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const CascadeState cs = pe_cascade_state(x1[k], x2[k], gains.lp(), gains.lv());
    zs[k] = cs.z;
    k_gain = cs.k;
  }
  double rms = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Vec3 zdot = (zs[k + 1] - zs[k - 1]) / (2.0 * euler_run.dt);
    rms += (zdot + k_gain * zs[k] - ra[k]).squaredNorm();
  }
  rms = std::sqrt(rms / static_cast<double>(n - 2));
  const double rms_bound = 10.0 * euler_run.dt;

  report(8, "trace pairing and excitation cascade",
         worst_pairing <= 1e-10 && pe_ra > 0.0 && pe_x1 > 0.0 && rms <= rms_bound,
         "trace pairing " + fmt("%.3e", worst_pairing) + ", pe(Ra) " + fmt("%.4f", pe_ra) +
             ", pe(p - p_Z) " + fmt("%.4f", pe_x1) + ", cascade residual RMS " +
             fmt("%.4f", rms) + " <= " + fmt("%.2f", rms_bound));
}

// ---- criterion 9: determinism and CSV format --------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion_9(const char* argv0) {
  // EQUIVARIANT_INS_CLI wins; otherwise look next to this binary's build tree
  std::string cli_storage;
  if (const char* env = std::getenv("EQUIVARIANT_INS_CLI")) {
    cli_storage = env;
  } else {
    const fs::path guess =
        fs::path(argv0).parent_path() / ".." / "tools" / "equivariant-ins";
    std::error_code ec;
    if (fs::exists(guess, ec)) {
      cli_storage = guess.string();
    }
  }
  if (cli_storage.empty()) {
    report(9, "determinism and format", false,
           "CLI binary not found (set EQUIVARIANT_INS_CLI)");
    return;
  }
  const char* cli = cli_storage.c_str();
  const fs::path base = fs::temp_directory_path() / "eqins_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  int codes[2] = {-1, -1};
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = base / ("run" + std::to_string(i));
    const std::string cmd = std::string("\"") + cli + "\" reproduce-paper --out " +
                            dir.string() + " > " + (base / "stdout.txt").string() +
                            " 2> " + (base / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    codes[i] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  const std::string a = slurp(base / "run0" / "trajectory.csv");
  const std::string b = slurp(base / "run1" / "trajectory.csv");
  const std::size_t lines = static_cast<std::size_t>(std::count(a.begin(), a.end(), '\n'));
  const bool identical = !a.empty() && a == b;
  const std::size_t data_rows = lines == 0 ? 0 : lines - 1;
  report(9, "determinism and format",
         codes[0] == 0 && codes[1] == 0 && identical && data_rows == 4001,
         std::string(identical ? "byte-identical CSVs" : "CSVs differ") + ", " +
             std::to_string(data_rows) + " data rows, exit codes " +
             std::to_string(codes[0]) + "/" + std::to_string(codes[1]));
}

}  // namespace

int main(int argc, char** argv) {
  (void)argc;
  const Gains gains(4.0, 24.0, 20.0);
  const SpectralData sd = spectral_data(gains);

  criterion_1();
  criterion_2();
  criterion_3();

  const auto runs_t0 = std::chrono::steady_clock::now();
  SimConfig rk4_cfg = SimConfig::paper();
  rk4_cfg.integrator = Integrator::Rk4;
  rk4_cfg.dt = 1e-3;
  const Trajectory rk4_run = run(rk4_cfg);
  const Trajectory euler_run = run(SimConfig::paper());
  const double runs_elapsed = seconds_since(runs_t0);

  criterion_4(rk4_run, gains, sd.s2);
  criterion_5(rk4_run, euler_run, runs_elapsed);
  criterion_6(euler_run);
  criterion_7();
  criterion_8(euler_run, gains);
  criterion_9(argv[0]);

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
