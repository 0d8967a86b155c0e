#pragma once

#include <cstdint>
#include <vector>

#include "asdrc/rc_design.hpp"

namespace asdrc::rc {

// IIR filter in direct-form II transposed layout. Coefficients are in
// ascending powers of z^-1 with a[0] normalized to 1.
class DirectForm2T {
 public:
  DirectForm2T() = default;
  DirectForm2T(std::vector<double> b, std::vector<double> a);
  // Causal realization of a proper rational function in positive powers of z.
  static DirectForm2T from_rational(const RationalFunction& r);

  double step(double x) noexcept;
  void reset() noexcept;
  std::size_t order() const noexcept { return state_.size(); }

 private:
  std::vector<double> b_;
  std::vector<double> a_;
  std::vector<double> state_;
};

// Streaming u_p = (1 + L Q W z^-N / (1 - Q W z^-N)) e_p.
//
// Realized as the internal-model recursion m = Q W z^-N (e_p + m) on a ring
// buffer of Q-filtered samples, followed by u_p = e_p + L_causal (z^a m). The
// advance a of L is absorbed by reading the ring buffer a samples early, which
// requires a <= N. All registers start at zero.
class RepetitiveController {
 public:
  explicit RepetitiveController(RcDesign design, Admission admission = Admission::RequireCertified);

  double step(double e);
  void reset() noexcept;

  const RcDesign& design() const noexcept { return design_; }
  std::size_t capacity() const noexcept { return ring_.size(); }
  std::uint64_t samples() const noexcept { return k_; }

 private:
  double ring_at(std::int64_t index) const noexcept;

  RcDesign design_;
  std::vector<double> ring_;      // Q-filtered internal-model input, indexed by sample
  std::vector<double> fir_line_;  // recent e_p + m for the Q filter, newest first
  DirectForm2T l_filter_;
  std::uint64_t k_ = 0;
};

}  // namespace asdrc::rc
