#include <algorithm>
#include <cmath>

#include "asdrc/rc_runtime.hpp"

namespace asdrc::rc {

DirectForm2T::DirectForm2T(std::vector<double> b, std::vector<double> a) : b_(std::move(b)), a_(std::move(a)) {
  if (a_.empty() || a_[0] == 0.0) throw InvalidArgument("DirectForm2T: a[0] must be nonzero");
  const std::size_t len = std::max(a_.size(), b_.size());
  a_.resize(len, 0.0);
  b_.resize(len, 0.0);
  const double a0 = a_[0];
  for (double& v : a_) v /= a0;
  for (double& v : b_) v /= a0;
  state_.assign(len - 1, 0.0);
}

DirectForm2T DirectForm2T::from_rational(const RationalFunction& r) {
  if (!r.is_proper()) throw InvalidArgument("DirectForm2T: rational function is not proper");
  const int d = r.den().degree();
  std::vector<double> b(static_cast<std::size_t>(d) + 1);
  std::vector<double> a(static_cast<std::size_t>(d) + 1);
  for (int j = 0; j <= d; ++j) {
    b[static_cast<std::size_t>(j)] = r.num()[d - j];
    a[static_cast<std::size_t>(j)] = r.den()[d - j];
  }
  return {std::move(b), std::move(a)};
}

double DirectForm2T::step(double x) noexcept {
  if (state_.empty()) return b_[0] * x;
  const double y = b_[0] * x + state_[0];
  const std::size_t n = state_.size();
  for (std::size_t i = 0; i + 1 < n; ++i) state_[i] = b_[i + 1] * x - a_[i + 1] * y + state_[i + 1];
  state_[n - 1] = b_[n] * x - a_[n] * y;
  return y;
}

void DirectForm2T::reset() noexcept { std::fill(state_.begin(), state_.end(), 0.0); }

RepetitiveController::RepetitiveController(RcDesign design, Admission admission)
    : design_(std::move(design)) {
  require_admissible(design_, admission);
  if (design_.advance > design_.N) throw InvalidArgument("L(z) advance exceeds N");
  l_filter_ = DirectForm2T::from_rational(design_.L_causal);
  const std::size_t cap = static_cast<std::size_t>(design_.W.blocks()) * design_.N +
                          static_cast<std::size_t>(design_.advance) + l_filter_.order() +
                          design_.q_taps.size();
  ring_.assign(cap, 0.0);
  fir_line_.assign(design_.q_taps.size(), 0.0);
}

double RepetitiveController::ring_at(std::int64_t index) const noexcept {
  if (index < 0) return 0.0;
  return ring_[static_cast<std::size_t>(index) % ring_.size()];
}

double RepetitiveController::step(double e) {
  if (!std::isfinite(e)) throw InvalidArgument("repetitive controller input is not finite");
  const auto k = static_cast<std::int64_t>(k_);
  const auto& w = design_.W.weights();
  const std::int64_t n = design_.N;

  // m(k) = sum_i w_i q(k - iN)
  double m = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) m += w[i] * ring_at(k - static_cast<std::int64_t>(i + 1) * n);

  std::rotate(fir_line_.rbegin(), fir_line_.rbegin() + 1, fir_line_.rend());
  fir_line_[0] = e + m;
  double q = 0.0;
  for (std::size_t j = 0; j < fir_line_.size(); ++j) q += design_.q_taps[j] * fir_line_[j];
  ring_[static_cast<std::size_t>(k_ % ring_.size())] = q;

  // z^a m(k) = m(k + a), available because a <= N.
  double ahead = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    ahead += w[i] * ring_at(k + design_.advance - static_cast<std::int64_t>(i + 1) * n);

  ++k_;
  return e + l_filter_.step(ahead);
}

void RepetitiveController::reset() noexcept {
  std::fill(ring_.begin(), ring_.end(), 0.0);
  std::fill(fir_line_.begin(), fir_line_.end(), 0.0);
  l_filter_.reset();
  k_ = 0;
}

}  // namespace asdrc::rc
