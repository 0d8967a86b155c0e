#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "asdrc/poly.hpp"

namespace asdrc::rc {

using poly::Complex;
using poly::Polynomial;
using poly::RationalFunction;

// Samples per nominal period, rounded half away from zero.
int compute_N(double period, double Ts);

class WeightSumError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// W(z) = sum_i w_i z^-((i-1)N), kept as weights plus block delay.
class WeightFunction {
 public:
  // Throws WeightSumError unless the weights sum to 1 within 1e-12.
  static WeightFunction make(std::vector<double> weights, int N);

  const std::vector<double>& weights() const noexcept { return weights_; }
  int block_delay() const noexcept { return n_; }
  int blocks() const noexcept { return static_cast<int>(weights_.size()); }
  // Largest delay in samples, (p-1)N.
  int span() const noexcept { return (blocks() - 1) * n_; }

  Complex operator()(Complex z) const noexcept;
  // Coefficients in ascending powers of z^-1.
  Polynomial expand() const;

 private:
  WeightFunction(std::vector<double> w, int n) : weights_(std::move(w)), n_(n) {}
  std::vector<double> weights_;
  int n_ = 1;
};

// Zero-phase-error tracking filter L(z) = z^advance * causal(z).
struct ZpetcFilter {
  RationalFunction causal;
  int advance = 0;
  poly::ZeroSplit split;  // of the numerator of T
};

ZpetcFilter zpetc(const RationalFunction& t, double threshold = poly::kCancelableThreshold);

struct RcDesign {
  int N = 1;
  std::vector<double> q_taps;  // Q(z) = sum_j q_j z^-j
  WeightFunction W = WeightFunction::make({1.0}, 1);
  RationalFunction plant;      // P(z)
  RationalFunction T;          // P/(1+P)
  RationalFunction L_causal;
  int advance = 0;
  poly::ZeroSplit split;
  double margin = 0.0;         // max |Q W z^-N (1 - T L)| on the unit circle grid
  double worst_theta = 0.0;    // omega*Ts where the max occurs
  int grid_size = 8192;

  Complex Q(Complex z) const noexcept;
  Complex L(Complex z) const noexcept;
  bool certified() const noexcept { return margin < 1.0; }
};

struct DesignInputs {
  std::vector<double> q_taps = {0.5, 0.2, 0.2, 0.1};
  std::vector<double> weights = {1.0};
  int N = 209;
  int grid_size = 8192;
  double split_threshold = poly::kCancelableThreshold;
};

// Which factor of the small-gain precondition failed.
enum class UnstableFactor { Plant, Sensitivity, Filter };

class StabilityConditionError : public Error {
 public:
  StabilityConditionError(UnstableFactor factor, const std::string& what)
      : Error(what), factor_(factor) {}
  UnstableFactor factor() const noexcept { return factor_; }

 private:
  UnstableFactor factor_;
};

// Builds T, L and evaluates the margin. Throws StabilityConditionError when
// P, 1/(1+P) or L is not stable.
RcDesign synthesize(const RationalFunction& plant, const DesignInputs& inputs);

// Same design with a different weight function; margin recomputed.
RcDesign with_weights(const RcDesign& design, std::vector<double> weights);

struct MarginReport {
  double margin = 0.0;
  double worst_theta = 0.0;
};

// Checks the stability precondition, then the max of |Q W z^-N (1 - T L)|
// over grid_size uniform points of the unit circle.
MarginReport stability_margin(const RcDesign& design, int grid_size = 8192);

// Exact count of internal-model loop poles outside the unit circle, by the
// argument principle applied to 1 - Q W z^-N (1 - T L). Zero means the loop
// is stable even when the small-gain margin is not below 1.
int unstable_mode_count(const RcDesign& design);

// Gate for consumers that require a certified design.
enum class Admission { RequireCertified, AllowUncertified };

void require_admissible(const RcDesign& design, Admission admission);

struct SensitivityCurve {
  std::vector<double> omegas;      // rad/s
  std::vector<double> magnitudes;  // +inf where the evaluation hit a pole
};

// |1/(1+P)| |1 - QWz^-N| / |1 - QWz^-N (1 - TL)| at e^{i w Ts}.
SensitivityCurve sensitivity_curve(const RcDesign& design, std::span<const double> omegas,
                                   double Ts,
                                   Admission admission = Admission::RequireCertified);

// Header "omega_rad_s,magnitude", %.17g values.
void write_sensitivity_csv(std::ostream& os, const SensitivityCurve& curve);

}  // namespace asdrc::rc
