#include <algorithm>
#include <cmath>
#include <limits>

#include "asdrc/poly.hpp"

namespace asdrc::poly {

RationalFunction::RationalFunction(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw InvalidArgument("rational function with zero denominator");
  const double lead = den.leading();
  num_ = num * (1.0 / lead);
  den_ = den.monic();
}

RationalFunction RationalFunction::constant(double k) {
  return {Polynomial::constant(k), Polynomial::constant(1.0)};
}

RationalFunction RationalFunction::delay(int k) {
  if (k < 0) throw InvalidArgument("delay must be nonnegative");
  return {Polynomial::constant(1.0), Polynomial::monomial(k)};
}

int RationalFunction::relative_degree() const noexcept {
  if (num_.is_zero()) return 0;
  return den_.degree() - num_.degree();
}

Complex RationalFunction::operator()(Complex z) const noexcept { return num_(z) / den_(z); }

double RationalFunction::operator()(double z) const noexcept { return num_(z) / den_(z); }

RationalFunction cancel_common_roots(const RationalFunction& r, double tolerance) {
  if (r.num().is_zero()) return RationalFunction::constant(0.0);
  if (r.num().degree() < 1 || r.den().degree() < 1) return r;

  std::vector<Complex> zn = roots(r.num());
  std::vector<Complex> zd = roots(r.den());
  bool cancelled = false;
  for (auto it = zn.begin(); it != zn.end();) {
    auto match = std::find_if(zd.begin(), zd.end(),
                              [&](Complex d) { return std::abs(d - *it) <= tolerance; });
    // Complex roots cancel together with their conjugate so factors stay real.
    if (match != zd.end() && (it->imag() == 0.0) == (match->imag() == 0.0)) {
      zd.erase(match);
      it = zn.erase(it);
      cancelled = true;
    } else {
      ++it;
    }
  }
  if (!cancelled) return r;
  return {Polynomial::from_roots(zn) * r.num().leading(), Polynomial::from_roots(zd)};
}

RationalFunction ratfn_add(const RationalFunction& a, const RationalFunction& b) {
  RationalFunction sum(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
  return cancel_common_roots(sum);
}

RationalFunction ratfn_mul(const RationalFunction& a, const RationalFunction& b) {
  RationalFunction prod(a.num() * b.num(), a.den() * b.den());
  return cancel_common_roots(prod);
}

RationalFunction ratfn_feedback(const RationalFunction& p) {
  Polynomial closed = p.den() + p.num();
  if (closed.is_zero()) throw InvalidArgument("feedback closure has a zero denominator");
  return cancel_common_roots(RationalFunction(p.num(), closed));
}

ZeroSplit split_zeros(const Polynomial& p, double threshold) {
  if (p.is_zero()) throw InvalidArgument("cannot split the zero polynomial");
  ZeroSplit out;
  out.gain = p.leading();
  if (p.degree() == 0) {
    out.stable_factor = Polynomial::constant(1.0);
    out.unstable_factor = Polynomial::constant(1.0);
    return out;
  }
  std::vector<Complex> stable;
  std::vector<Complex> unstable;
  for (const Complex& z : roots(p)) (std::abs(z) < threshold ? stable : unstable).push_back(z);
  out.stable_factor = Polynomial::from_roots(stable);
  out.unstable_factor = Polynomial::from_roots(unstable);
  return out;
}

ZeroSplit split_zeros(const RationalFunction& r, double threshold) {
  ZeroSplit out = split_zeros(r.num(), threshold);
  out.advance_deficit = r.relative_degree();
  return out;
}

std::vector<FrequencyPoint> freq_response(const RationalFunction& r, std::span<const double> omegas,
                                          double Ts) {
  if (!(Ts > 0.0)) throw InvalidArgument("sampling period must be positive");
  std::vector<FrequencyPoint> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    const Complex z = std::polar(1.0, w * Ts);
    const Complex d = r.den()(z);
    FrequencyPoint pt;
    if (std::abs(d) <= std::numeric_limits<double>::min()) {
      pt.at_pole = true;
      pt.value = {std::numeric_limits<double>::infinity(), 0.0};
    } else {
      pt.value = r.num()(z) / d;
      pt.at_pole = !std::isfinite(std::abs(pt.value));
    }
    out.push_back(pt);
  }
  return out;
}

bool is_schur_stable(const Polynomial& p) {
  if (p.is_zero()) throw InvalidArgument("stability of the zero polynomial is undefined");
  if (p.degree() == 0) return true;
  const auto zs = roots(p);
  return std::all_of(zs.begin(), zs.end(), [](Complex z) { return std::abs(z) < kSchurBoundary; });
}

}  // namespace asdrc::poly
