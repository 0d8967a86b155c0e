#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "asdrc/rc_runtime.hpp"
#include "asdrc/sim.hpp"

namespace asdrc::sim {

namespace {

constexpr double kBlowUp = 1e6;

long integer_ratio(double num, double den, const char* what) {
  const double q = num / den;
  const long n = std::lround(q);
  if (n < 1 || std::abs(q - static_cast<double>(n)) > 1e-9 * q)
    throw InvalidArgument(std::string(what) + " must be a positive integer");
  return n;
}

// Joint state: plant x, observer xs_hat, and for the decomposition check the
// primary x_p and secondary x_s integrated from their own equations.
using Joint = Eigen::Matrix<double, 16, 1>;

struct Held {
  double up = 0.0;
  double us = 0.0;
};

Joint joint_deriv(const Joint& z, double t, const Held& in, const Plant& plant, const SignalSpec& sig,
                  bool decompose) {
  const double r = sig.r(t);
  Joint dz;
  const Vec4 x = z.segment<4>(0);
  dz.segment<4>(0) = plant_deriv(x, in.up + in.us, t, plant, sig);
  dz.segment<4>(4) = observer_deriv(z.segment<4>(4), x(0), r, in.us, plant);
  if (decompose) {
    const Vec4 xp = z.segment<4>(8);
    const Vec4 xs = z.segment<4>(12);
    dz.segment<4>(8) = plant.A() * xp + Plant::b() * in.up + plant.phi(r) + sig.d(t);
    const double ep = xp(0) - r;
    dz.segment<4>(12) = plant.A() * xs + Plant::b() * in.us + plant.phi(r + xs(0) + ep) - plant.phi(r);
  } else {
    dz.segment<8>(8).setZero();
  }
  return dz;
}

struct Trace {
  SimResult result;
  DecompositionReport report;
};

Trace run(const SimConfig& cfg, bool decompose) {
  cfg.validate();
  const Plant plant(cfg.plant);
  const SignalSpec& sig = cfg.signals;

  std::optional<rc::RepetitiveController> controller;
  if (cfg.rc_enabled) controller.emplace(cfg.design, cfg.admission);

  const long per_tick = integer_ratio(cfg.Ts, cfg.h_int, "Ts / h_int");
  const double horizon = cfg.horizon_periods * sig.period();
  const long ticks = static_cast<long>(std::floor(horizon / cfg.Ts + 1e-9));
  const double h = cfg.h_int;

  Trace out;
  SimResult& res = out.result;
  const auto n = static_cast<std::size_t>(ticks);
  for (auto* v : {&res.t, &res.y, &res.r, &res.e, &res.u, &res.up, &res.us, &res.yp_hat}) v->reserve(n);
  res.x.reserve(n);
  res.xs_hat.reserve(n);

  Joint z = Joint::Zero();
  z.segment<4>(0) = cfg.plant.x0;
  z.segment<4>(8) = cfg.plant.x0;

  for (long k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * cfg.Ts;
    const Vec4 x = z.segment<4>(0);
    const Vec4 xs_hat = z.segment<4>(4);
    if (!x.allFinite() || x.norm() > kBlowUp) {
      std::ostringstream msg;
      msg << "state norm exceeded " << kBlowUp << " at t = " << t << " s";
      throw SimulationError(msg.str(), t);
    }

    const double y = x(0);
    const double r = sig.r(t);
    const double yp_hat = y - xs_hat(0);
    const double ep = r - yp_hat;
    Held in;
    in.up = controller ? controller->step(ep) : ep;
    in.us = backstepping_us(xs_hat, r, sig.r_dot(t), sig.r_ddot(t), cfg.plant);

    res.t.push_back(t);
    res.x.push_back(x);
    res.y.push_back(y);
    res.r.push_back(r);
    res.e.push_back(y - r);
    res.u.push_back(in.up + in.us);
    res.up.push_back(in.up);
    res.us.push_back(in.us);
    res.yp_hat.push_back(yp_hat);
    res.xs_hat.push_back(xs_hat);
    if (decompose) {
      const Vec4 xp = z.segment<4>(8);
      const Vec4 xs = z.segment<4>(12);
      out.report.decomposition_error = std::max(out.report.decomposition_error, (x - xp - xs).norm());
      out.report.observer_error = std::max(out.report.observer_error, (xs_hat - xs).norm());
    }

    // The observer reads y at every RK4 stage, i.e. the measurement is
    // continuous at the integrator resolution; stepping it in blocks of
    // T_ss would produce the same arithmetic.
    for (long i = 0; i < per_tick; ++i) {
      const double ti = t + static_cast<double>(i) * h;
      const Joint k1 = joint_deriv(z, ti, in, plant, sig, decompose);
      const Joint k2 = joint_deriv(z + 0.5 * h * k1, ti + 0.5 * h, in, plant, sig, decompose);
      const Joint k3 = joint_deriv(z + 0.5 * h * k2, ti + 0.5 * h, in, plant, sig, decompose);
      const Joint k4 = joint_deriv(z + h * k3, ti + h, in, plant, sig, decompose);
      z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }

  const double window_start = static_cast<double>(ticks) * cfg.Ts - cfg.bound_window_periods * sig.period();
  res.window_begin = res.size();
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (res.t[i] < window_start) continue;
    if (res.window_begin == res.size()) res.window_begin = i;
    res.ultimate_bound = std::max(res.ultimate_bound, std::abs(res.e[i]));
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  signals.validate();
  const double steps[] = {Ts, h_int, T_ss};
  for (double v : steps)
    if (!std::isfinite(v) || v <= 0.0) throw InvalidArgument("Ts, h_int and T_ss must be positive");
  if (h_int > T_ss || T_ss > Ts) throw InvalidArgument("require h_int <= T_ss <= Ts");
  integer_ratio(Ts, h_int, "Ts / h_int");
  integer_ratio(T_ss, h_int, "T_ss / h_int");
  if (horizon_periods < 1) throw InvalidArgument("horizon_periods must be at least 1");
  if (bound_window_periods < 1 || bound_window_periods > horizon_periods)
    throw InvalidArgument("bound_window_periods must lie in [1, horizon_periods]");
}

SimResult simulate(const SimConfig& config) { return run(config, false).result; }

DecompositionReport decomposition_check(const SimConfig& config) { return run(config, true).report; }

OrderCheck rk4_order_check(const SimConfig& config, double h, int periods) {
  SimConfig cfg = config;
  cfg.horizon_periods = periods;
  cfg.bound_window_periods = 1;
  cfg.T_ss = cfg.Ts;
  const auto trajectory = [&](double step) {
    cfg.h_int = step;
    return simulate(cfg).x;
  };
  const auto coarse = trajectory(h);
  const auto half = trajectory(h / 2.0);
  const auto ref = trajectory(h / 16.0);
  OrderCheck oc;
  oc.h = h;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    oc.error_h = std::max(oc.error_h, (coarse[k] - ref[k]).norm());
    oc.error_half = std::max(oc.error_half, (half[k] - ref[k]).norm());
  }
  oc.ratio = oc.error_h / oc.error_half;
  return oc;
}

IssReport secondary_iss_check(const SimConfig& config, double epsilon) {
  config.validate();
  const Plant plant(config.plant);
  const SignalSpec& sig = config.signals;
  const long per_tick = integer_ratio(config.Ts, config.h_int, "Ts / h_int");
  const long ticks = static_cast<long>(std::floor(config.horizon_periods * sig.period() / config.Ts + 1e-9));
  const double h = config.h_int;

  const auto f = [&](const Vec4& xs, double t, double us) {
    const double r = sig.r(t);
    return Vec4(plant.A() * xs + Plant::b() * us + plant.phi(r + xs(0) + epsilon) - plant.phi(r));
  };

  IssReport rep;
  rep.epsilon = epsilon;
  Vec4 xs = Vec4::Zero();
  for (long k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * config.Ts;
    if (!xs.allFinite() || xs.norm() > kBlowUp) throw SimulationError("secondary loop diverged", t);
    const double us = backstepping_us(xs, sig.r(t), sig.r_dot(t), sig.r_ddot(t), config.plant);
    for (long i = 0; i < per_tick; ++i) {
      const double ti = t + static_cast<double>(i) * h;
      const Vec4 k1 = f(xs, ti, us);
      const Vec4 k2 = f(xs + 0.5 * h * k1, ti + 0.5 * h, us);
      const Vec4 k3 = f(xs + 0.5 * h * k2, ti + 0.5 * h, us);
      const Vec4 k4 = f(xs + h * k3, ti + h, us);
      xs += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      rep.sup_norm = std::max(rep.sup_norm, xs.norm());
    }
  }
  rep.final_norm = xs.norm();
  return rep;
}

}  // namespace asdrc::sim
