#include <cmath>
#include <numeric>
#include <string>

#include "asdrc/rc_design.hpp"

namespace asdrc::rc {

int compute_N(double period, double Ts) {
  if (!(period > 0.0) || !(Ts > 0.0) || !std::isfinite(period) || !std::isfinite(Ts))
    throw InvalidArgument("compute_N: period and Ts must be positive");
  const double n = std::round(period / Ts);  // halves go away from zero
  if (n < 1.0) throw InvalidArgument("compute_N: period shorter than half a sample");
  if (n > 1e9) throw InvalidArgument("compute_N: period/Ts too large");
  return static_cast<int>(n);
}

WeightFunction WeightFunction::make(std::vector<double> weights, int N) {
  if (weights.empty()) throw WeightSumError("weight function needs at least one weight");
  if (N < 1) throw InvalidArgument("weight function block delay N must be >= 1");
  for (double w : weights)
    if (!std::isfinite(w)) throw InvalidArgument("weight function has non-finite weight");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12)
    throw WeightSumError("weights must sum to 1 (got " + std::to_string(sum) + ")");
  return WeightFunction(std::move(weights), N);
}

Complex WeightFunction::operator()(Complex z) const noexcept {
  // Horner in z^-N.
  const Complex block = std::pow(z, -n_);
  Complex acc = 0.0;
  for (auto it = weights_.rbegin(); it != weights_.rend(); ++it) acc = acc * block + *it;
  return acc;
}

Polynomial WeightFunction::expand() const {
  std::vector<double> c(static_cast<std::size_t>(span()) + 1, 0.0);
  for (std::size_t i = 0; i < weights_.size(); ++i) c[i * static_cast<std::size_t>(n_)] = weights_[i];
  return Polynomial(std::move(c));
}

}  // namespace asdrc::rc
