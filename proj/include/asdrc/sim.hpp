#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "asdrc/error.hpp"
#include "asdrc/linalg.hpp"
#include "asdrc/rc_design.hpp"

namespace asdrc::sim {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Single-link arm with an elastic joint. State is link angle, link rate,
// rotor angle, rotor rate. p injects the output so that A = A0 + p c^T is
// Hurwitz; the nonlinearity becomes phi(y) = phi0(y) - p y.
struct PlantParams {
  double J_l = 2.0;
  double J_m = 0.5;
  double K = 0.05;
  double M = 0.5;
  double g = 9.8;
  double l = 0.5;
  double F_l = 0.2;
  double F_m = 0.2;
  Vec4 p{-2.10, -1.295, -9.36, 3.044};
  Vec4 x0{0.05, 0.0, 0.05, 0.0};
};

// Validated plant with its matrices precomputed. Construction throws
// InvalidArgument for non-positive inertias, non-finite values or a
// non-Hurwitz A.
class Plant {
 public:
  explicit Plant(const PlantParams& params);

  const PlantParams& params() const noexcept { return params_; }
  const Mat4& A0() const noexcept { return a0_; }
  const Mat4& A() const noexcept { return a_; }
  static Vec4 b() noexcept { return Vec4(0.0, 0.0, 0.0, 1.0); }
  static Vec4 c() noexcept { return Vec4(1.0, 0.0, 0.0, 0.0); }
  // M g l / J_l
  double gravity_gain() const noexcept { return gravity_; }

  Vec4 phi0(double y) const noexcept;
  Vec4 phi(double y) const noexcept;

  // (A, b, c) as a dynamic-size model for discretization.
  linalg::ContinuousStateSpace linear_model() const;

 private:
  PlantParams params_;
  Mat4 a0_;
  Mat4 a_;
  double gravity_ = 0.0;
};

// Reference and disturbances, all periodic with the true period
// T_nominal (1 + alpha).
struct SignalSpec {
  double r_amp = 0.05;
  double r_offset = 0.1;
  double d1_amp = 0.04;
  double d2_amp = 0.02;
  double T_nominal = 20.0 * std::numbers::pi / 3.0;
  double alpha = 0.0;

  void validate() const;
  double period() const noexcept { return T_nominal * (1.0 + alpha); }
  double omega() const noexcept { return 2.0 * std::numbers::pi / period(); }

  double r(double t) const noexcept;
  double r_dot(double t) const noexcept;
  double r_ddot(double t) const noexcept;
  double d1(double t) const noexcept;
  double d2(double t) const noexcept;
  // (0, d1, 0, d2)
  Vec4 d(double t) const noexcept;
};

struct SimConfig {
  PlantParams plant;
  SignalSpec signals;
  rc::RcDesign design;
  rc::Admission admission = rc::Admission::RequireCertified;
  double Ts = 0.1;
  double h_int = 1e-3;   // RK4 step
  double T_ss = 0.01;    // sensor / observer update step
  int horizon_periods = 30;
  int bound_window_periods = 5;
  // When false the repetitive controller is bypassed and u_p = e_p.
  bool rc_enabled = true;

  // Throws InvalidArgument unless h_int <= T_ss <= Ts with integer ratios.
  void validate() const;
};

class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

// One entry per control tick.
struct SimResult {
  std::vector<double> t;
  std::vector<Vec4> x;
  std::vector<double> y;
  std::vector<double> r;
  std::vector<double> e;  // y - r
  std::vector<double> u;
  std::vector<double> up;
  std::vector<double> us;
  std::vector<double> yp_hat;
  std::vector<Vec4> xs_hat;
  double ultimate_bound = 0.0;  // max |y - r| over the trailing window
  std::size_t window_begin = 0;  // first tick inside the window

  std::size_t size() const noexcept { return t.size(); }
};

// A0 x + b u + phi0(c^T x) + d(t)
Vec4 plant_deriv(const Vec4& x, double u, double t, const Plant& plant, const SignalSpec& signals) noexcept;

// A xs + b us + phi(y) - phi(r)
Vec4 observer_deriv(const Vec4& xs_hat, double y, double r, double u_s, const Plant& plant) noexcept;

// Advances the observer over [t0, t0 + h] with RK4 substeps of h_int,
// reading the measurement y(t) at every stage. u_s is held.
Vec4 observer_step(const Vec4& xs_hat, const std::function<double(double)>& y, double t0, double u_s,
                   const Plant& plant, const SignalSpec& signals, double h, double h_int);

// Backstepping stabilizer of the secondary loop, evaluated at the
// reference r and its first two derivatives.
double backstepping_us(const Vec4& x_s, double r, double r_dot, double r_ddot, const PlantParams& params) noexcept;

// Sampled-data closed loop: plant and observer integrated by RK4, control
// held over each Ts, u = u_p + u_s. Throws SimulationError when the state
// norm exceeds 1e6 and InvalidArgument for an inadmissible design.
SimResult simulate(const SimConfig& config);

struct DecompositionReport {
  double decomposition_error = 0.0;  // max ||x - (x_p + x_s)||
  double observer_error = 0.0;       // max ||xs_hat - x_s||
};

// Integrates the original, primary and secondary systems next to the
// observer with identical inputs and reports the largest mismatches.
DecompositionReport decomposition_check(const SimConfig& config);

struct OrderCheck {
  double h = 0.0;
  double error_h = 0.0;       // max sampled-state error at step h
  double error_half = 0.0;    // same at h/2
  double ratio = 0.0;         // error_h / error_half, about 16 for RK4
};

// Global error of the closed-loop trajectory against a run at h/16 over
// the given number of periods. The sensor step is set to Ts so that every
// step size divides it.
OrderCheck rk4_order_check(const SimConfig& config, double h, int periods);

struct IssReport {
  double epsilon = 0.0;
  double sup_norm = 0.0;    // sup ||x_s||
  double final_norm = 0.0;  // ||x_s|| at the horizon
};

// Secondary closed loop driven by a constant primary tracking error
// epsilon, with u_s sampled at Ts.
IssReport secondary_iss_check(const SimConfig& config, double epsilon);

struct SweepRow {
  double alpha = 0.0;
  std::vector<double> bounds;       // NaN where the cell failed
  std::vector<std::string> errors;  // empty where the cell succeeded
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

// Runs simulate for every (alpha, weights) cell on up to `workers` threads.
// Rows follow the order of alphas; columns the order of weight_variants.
SweepResult sweep_alpha(const SimConfig& base, std::span<const double> alphas,
                        std::span<const std::vector<double>> weight_variants, int workers = 1);

// Header t,x1,x2,x3,x4,y,r,e,u,up,us,yp_hat,xs_hat1..4; %.17g values.
void write_sim_csv(std::ostream& os, const SimResult& result);
// Header alpha,bound_w1,bound_w2,... ; failed cells print nan.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace asdrc::sim
