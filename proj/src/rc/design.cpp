#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "asdrc/rc_design.hpp"

namespace asdrc::rc {
namespace {

// Q W z^-N (1 - T L) at z = e^{i theta}; z^-N and z^a are formed exactly on the circle.
Complex loop_gain(const RcDesign& d, double theta) {
  const Complex z = std::polar(1.0, theta);
  const Complex lz = std::polar(1.0, d.advance * theta) * d.L_causal(z);
  const Complex one_minus_tl = 1.0 - d.T(z) * lz;
  const Complex block = std::polar(1.0, -d.N * theta);
  Complex w = 0.0;
  for (auto it = d.W.weights().rbegin(); it != d.W.weights().rend(); ++it) w = w * block + *it;
  return d.Q(z) * w * block * one_minus_tl;
}

void check_preconditions(const RcDesign& d) {
  if (!poly::is_schur_stable(d.plant.den()))
    throw StabilityConditionError(UnstableFactor::Plant, "P(z) has poles on or outside the unit circle");
  if (!poly::is_schur_stable(d.T.den()))
    throw StabilityConditionError(UnstableFactor::Sensitivity,
                                  "1/(1+P(z)) has poles on or outside the unit circle");
  if (!poly::is_schur_stable(d.L_causal.den()))
    throw StabilityConditionError(UnstableFactor::Filter, "L(z) has poles on or outside the unit circle");
}

}  // namespace

ZpetcFilter zpetc(const RationalFunction& t, double threshold) {
  if (!t.is_proper()) throw InvalidArgument("zpetc: T(z) must be proper");
  if (t.num().is_zero()) throw InvalidArgument("zpetc: T(z) is identically zero");
  if (!poly::is_schur_stable(t.den()))
    throw StabilityConditionError(UnstableFactor::Sensitivity, "zpetc: T(z) has unstable poles");

  ZpetcFilter out;
  out.split = poly::split_zeros(t, threshold);
  const Polynomial& stable = out.split.stable_factor;
  const Polynomial& unstable = out.split.unstable_factor;
  const int n = t.den().degree();
  const int s = stable.is_zero() ? 0 : stable.degree();
  const int u = unstable.degree();

  const double u_at_one = unstable(1.0);
  if (u_at_one == 0.0) throw InvalidArgument("zpetc: uncancelable zero at z = 1");

  // T_n^-(z): reflect the unstable factor, z^u U(1/z).
  const Polynomial reflected = unstable.reversed();
  out.advance = u;
  const Polynomial num = t.den() * reflected;
  const Polynomial den =
      stable * Polynomial::monomial(n - s + u, u_at_one * u_at_one * out.split.gain);
  out.causal = RationalFunction(num, den);
  return out;
}

Complex RcDesign::Q(Complex z) const noexcept {
  const Complex zi = 1.0 / z;
  Complex acc = 0.0;
  for (auto it = q_taps.rbegin(); it != q_taps.rend(); ++it) acc = acc * zi + *it;
  return acc;
}

Complex RcDesign::L(Complex z) const noexcept { return std::pow(z, advance) * L_causal(z); }

RcDesign synthesize(const RationalFunction& plant, const DesignInputs& inputs) {
  if (inputs.q_taps.empty()) throw InvalidArgument("Q needs at least one tap");
  for (double q : inputs.q_taps)
    if (!std::isfinite(q)) throw InvalidArgument("Q tap is not finite");
  if (inputs.grid_size < 8) throw InvalidArgument("grid_size must be >= 8");
  if (!plant.is_proper()) throw InvalidArgument("P(z) must be proper");

  RcDesign d;
  d.N = inputs.N;
  d.q_taps = inputs.q_taps;
  d.W = WeightFunction::make(inputs.weights, inputs.N);
  d.plant = plant;
  d.T = poly::ratfn_feedback(plant);
  d.grid_size = inputs.grid_size;
  if (!poly::is_schur_stable(plant.den()))
    throw StabilityConditionError(UnstableFactor::Plant, "P(z) has poles on or outside the unit circle");

  ZpetcFilter f = zpetc(d.T, inputs.split_threshold);
  d.L_causal = std::move(f.causal);
  d.advance = f.advance;
  d.split = std::move(f.split);
  if (d.advance > d.N)
    throw InvalidArgument("L(z) advance exceeds the internal-model delay N");

  const MarginReport m = stability_margin(d, d.grid_size);
  d.margin = m.margin;
  d.worst_theta = m.worst_theta;
  return d;
}

RcDesign with_weights(const RcDesign& design, std::vector<double> weights) {
  RcDesign d = design;
  d.W = WeightFunction::make(std::move(weights), design.N);
  const MarginReport m = stability_margin(d, d.grid_size);
  d.margin = m.margin;
  d.worst_theta = m.worst_theta;
  return d;
}

MarginReport stability_margin(const RcDesign& design, int grid_size) {
  if (grid_size < 1) throw InvalidArgument("grid_size must be positive");
  check_preconditions(design);
  MarginReport r;
  for (int k = 0; k < grid_size; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / grid_size;
    const double mag = std::abs(loop_gain(design, theta));
    if (mag > r.margin) {
      r.margin = mag;
      r.worst_theta = theta > std::numbers::pi ? theta - 2.0 * std::numbers::pi : theta;
    }
  }
  return r;
}

int unstable_mode_count(const RcDesign& design) {
  check_preconditions(design);
  // h(z) = 1 - QWz^-N(1-TL) has all poles inside the circle and h(inf) = 1,
  // so the zeros outside equal minus the winding number of h(e^{i theta}).
  int grid = 1 << 14;
  const int needed = 64 * (design.N + design.W.span() + static_cast<int>(design.q_taps.size()));
  while (grid < needed) grid <<= 1;
  for (; grid <= (1 << 24); grid <<= 1) {
    double total = 0.0;
    bool resolved = true;
    Complex prev = 1.0 - loop_gain(design, 0.0);
    const Complex first = prev;
    for (int k = 1; k <= grid; ++k) {
      const Complex cur = k == grid ? first : 1.0 - loop_gain(design, 2.0 * std::numbers::pi * k / grid);
      const double step = std::arg(cur / prev);
      if (std::abs(step) > std::numbers::pi / 4) {
        resolved = false;
        break;
      }
      total += step;
      prev = cur;
    }
    if (resolved) return -static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
  }
  throw ConvergenceError("winding number did not resolve; a loop pole lies on the unit circle", 0.0);
}

void require_admissible(const RcDesign& design, Admission admission) {
  if (admission == Admission::AllowUncertified) return;
  if (!design.certified())
    throw InvalidArgument("design is not certified stable: small-gain margin " +
                          std::to_string(design.margin) + " >= 1");
}

SensitivityCurve sensitivity_curve(const RcDesign& design, std::span<const double> omegas, double Ts,
                                   Admission admission) {
  if (!(Ts > 0.0)) throw InvalidArgument("sensitivity_curve: Ts must be positive");
  require_admissible(design, admission);
  SensitivityCurve c;
  c.omegas.assign(omegas.begin(), omegas.end());
  c.magnitudes.reserve(omegas.size());
  for (double w : omegas) {
    const double theta = w * Ts;
    const Complex z = std::polar(1.0, theta);
    const Complex block = std::polar(1.0, -design.N * theta);
    Complex wz = 0.0;
    for (auto it = design.W.weights().rbegin(); it != design.W.weights().rend(); ++it)
      wz = wz * block + *it;
    const Complex qwz = design.Q(z) * wz * block;
    const Complex lz = std::polar(1.0, design.advance * theta) * design.L_causal(z);
    const Complex denom = (1.0 + design.plant(z)) * (1.0 - qwz * (1.0 - design.T(z) * lz));
    const double mag = std::abs(1.0 - qwz) / std::abs(denom);
    c.magnitudes.push_back(std::isfinite(mag) ? mag : std::numeric_limits<double>::infinity());
  }
  return c;
}

void write_sensitivity_csv(std::ostream& os, const SensitivityCurve& curve) {
  os << "omega_rad_s,magnitude\n";
  char buf[64];
  for (std::size_t i = 0; i < curve.omegas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.omegas[i], curve.magnitudes[i]);
    os << buf;
  }
}

}  // namespace asdrc::rc
