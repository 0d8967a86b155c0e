#pragma once

// Shared test data: the single-link elastic-joint arm, linearized part only,
// assembled from its physical constants independently of the sim module.

#include <random>

#include "asdrc/linalg.hpp"
#include "asdrc/rc_design.hpp"

namespace asdrc::testing {

inline linalg::ContinuousStateSpace robot_arm_lti() {
  const double Jl = 2.0, Jm = 0.5, K = 0.05, Fl = 0.2, Fm = 0.2;
  linalg::Matrix A(4, 4);
  A << 0, 1, 0, 0,  //
      -K / Jl, -Fl / Jl, K / Jl, 0,  //
      0, 0, 0, 1,  //
      K / Jm, 0, -K / Jm, -Fm / Jm;
  const double p[4] = {-2.10, -1.295, -9.36, 3.044};
  for (int i = 0; i < 4; ++i) A(i, 0) += p[i];
  linalg::ContinuousStateSpace sys;
  sys.A = A;
  sys.b = linalg::Vector::Unit(4, 3);
  sys.c = linalg::Vector::Unit(4, 0);
  return sys;
}

inline poly::RationalFunction robot_arm_plant() {
  return linalg::ss_to_tf(linalg::zoh_discretize(robot_arm_lti(), 0.1));
}

inline rc::RcDesign robot_arm_design(std::vector<double> weights) {
  rc::DesignInputs in;
  in.weights = std::move(weights);
  return rc::synthesize(robot_arm_plant(), in);
}

// Regression values frozen from the first verified runs. Margins come from
// an independent double-precision reference of max |Q W z^-N (1 - T L)| on
// 8192 points; bounds are max |y - r| over the last 5 of 30 periods at
// alpha = 0 with the default simulation settings.
constexpr double kMarginTraditional = 0.69387483653938;
constexpr double kMarginHigherOrder = 2.0811656580169777;
constexpr double kBoundTraditionalAlpha0 = 0.00051097483648300523;
constexpr double kBoundHigherOrderAlpha0 = 0.0037078659364029876;

// Relative closeness for printed 4-significant-figure values.
inline bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

}  // namespace asdrc::testing
