#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "asdrc/sim.hpp"

namespace asdrc::sim {

Plant::Plant(const PlantParams& params) : params_(params) {
  const double scalars[] = {params.J_l, params.J_m, params.K, params.M, params.g, params.l, params.F_l, params.F_m};
  for (double v : scalars)
    if (!std::isfinite(v)) throw InvalidArgument("plant parameters must be finite");
  if (!params.p.allFinite() || !params.x0.allFinite()) throw InvalidArgument("plant vectors must be finite");
  if (params.J_l <= 0.0 || params.J_m <= 0.0) throw InvalidArgument("inertias must be positive");

  const double kl = params.K / params.J_l;
  const double km = params.K / params.J_m;
  a0_ << 0.0, 1.0, 0.0, 0.0,
         -kl, -params.F_l / params.J_l, kl, 0.0,
         0.0, 0.0, 0.0, 1.0,
         km, 0.0, -km, -params.F_m / params.J_m;
  a_ = a0_ + params.p * c().transpose();
  gravity_ = params.M * params.g * params.l / params.J_l;

  const Eigen::EigenSolver<Mat4> es(a_, false);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) worst = std::max(worst, es.eigenvalues()[i].real());
  if (!(worst < 0.0))
    throw InvalidArgument("A0 + p c^T is not Hurwitz (largest real part " + std::to_string(worst) + ")");
}

Vec4 Plant::phi0(double y) const noexcept { return Vec4(0.0, -gravity_ * std::sin(y), 0.0, 0.0); }

Vec4 Plant::phi(double y) const noexcept { return phi0(y) - params_.p * y; }

linalg::ContinuousStateSpace Plant::linear_model() const {
  linalg::ContinuousStateSpace sys;
  sys.A = a_;
  sys.b = b();
  sys.c = c();
  return sys;
}

void SignalSpec::validate() const {
  const double vals[] = {r_amp, r_offset, d1_amp, d2_amp, T_nominal, alpha};
  for (double v : vals)
    if (!std::isfinite(v)) throw InvalidArgument("signal parameters must be finite");
  if (T_nominal <= 0.0) throw InvalidArgument("T_nominal must be positive");
  if (1.0 + alpha <= 0.0) throw InvalidArgument("1 + alpha must be positive");
}

double SignalSpec::r(double t) const noexcept { return r_amp * std::sin(omega() * t) + r_offset; }

double SignalSpec::r_dot(double t) const noexcept {
  const double w = omega();
  return r_amp * w * std::cos(w * t);
}

double SignalSpec::r_ddot(double t) const noexcept {
  const double w = omega();
  return -r_amp * w * w * std::sin(w * t);
}

double SignalSpec::d1(double t) const noexcept { return d1_amp * std::sin(omega() * t); }

double SignalSpec::d2(double t) const noexcept {
  const double wt = omega() * t;
  return d2_amp * std::cos(wt) * std::sin(wt);
}

Vec4 SignalSpec::d(double t) const noexcept { return Vec4(0.0, d1(t), 0.0, d2(t)); }

Vec4 plant_deriv(const Vec4& x, double u, double t, const Plant& plant, const SignalSpec& signals) noexcept {
  return plant.A0() * x + Plant::b() * u + plant.phi0(x(0)) + signals.d(t);
}

Vec4 observer_deriv(const Vec4& xs_hat, double y, double r, double u_s, const Plant& plant) noexcept {
  return plant.A() * xs_hat + Plant::b() * u_s + plant.phi(y) - plant.phi(r);
}

Vec4 observer_step(const Vec4& xs_hat, const std::function<double(double)>& y, double t0, double u_s,
                   const Plant& plant, const SignalSpec& signals, double h, double h_int) {
  if (!xs_hat.allFinite() || !std::isfinite(u_s)) throw InvalidArgument("observer state must be finite");
  if (!(h_int > 0.0) || !(h >= h_int)) throw InvalidArgument("observer step must satisfy h >= h_int > 0");
  const double ratio = h / h_int;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
    throw InvalidArgument("observer step must be an integer multiple of h_int");

  const auto f = [&](const Vec4& s, double t) { return observer_deriv(s, y(t), signals.r(t), u_s, plant); };
  Vec4 s = xs_hat;
  for (long i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * h_int;
    const Vec4 k1 = f(s, t);
    const Vec4 k2 = f(s + 0.5 * h_int * k1, t + 0.5 * h_int);
    const Vec4 k3 = f(s + 0.5 * h_int * k2, t + 0.5 * h_int);
    const Vec4 k4 = f(s + h_int * k3, t + h_int);
    s += (h_int / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!s.allFinite()) throw InvalidArgument("observer state became non-finite");
  return s;
}

double backstepping_us(const Vec4& xs, double r, double rd, double rdd, const PlantParams& pp) noexcept {
  const double g = pp.M * pp.g * pp.l / pp.J_l;
  const double fl = pp.F_l / pp.J_l;
  const double kl = pp.K / pp.J_l;
  const double km = pp.K / pp.J_m;
  const double th = xs(0) + r;
  const double w = xs(1) + rd;

  const double eta3 = -fl * xs(1) - kl * (xs(0) - xs(2)) - g * (std::sin(th) - std::sin(r));
  const double eta4 = -fl * eta3 - kl * (xs(1) - xs(3)) - g * (w * std::cos(th) - rd * std::cos(r));
  const double v = -7.5 * xs(0) - 19.0 * xs(1) - 17.0 * eta3 - 7.0 * eta4;
  const double mu1 = -eta3 + km * xs(0) - km * xs(2) - pp.F_m / pp.J_m * xs(3);
  const double mu2 = fl * eta4 + g * (eta3 + rdd) * std::cos(th) -
                     g * (w * w * std::sin(th) + rdd * std::cos(r) - rd * rd * std::sin(r));
  return mu1 + (pp.J_l / pp.K) * (v + mu2);
}

}  // namespace asdrc::sim
