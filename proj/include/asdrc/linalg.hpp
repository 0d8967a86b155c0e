#pragma once

#include <Eigen/Dense>

#include "asdrc/poly.hpp"

namespace asdrc::linalg {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// x' = A x + b u, y = c^T x
struct ContinuousStateSpace {
  Matrix A;
  Vector b;
  Vector c;

  // Checks A square, b and c of matching dimension, n >= 1.
  void validate() const;
  Eigen::Index order() const noexcept { return A.rows(); }
};

// x(k+1) = F x(k) + g u(k), y = c^T x, with g = H b the zero-order-hold input map.
struct DiscreteStateSpace {
  Matrix F;
  Vector g;
  Vector c;
  double Ts = 0.0;

  void validate() const;
  Eigen::Index order() const noexcept { return F.rows(); }
};

// e^M by scaling and squaring with a diagonal Pade approximant (degree 3..13
// picked from the 1-norm, Higham 2005 thresholds).
Matrix mat_exp(const Matrix& m);

// Exact ZOH discretization: [F g; 0 1] = exp([A b; 0 0] Ts).
DiscreteStateSpace zoh_discretize(const ContinuousStateSpace& sys, double Ts);

// Monic characteristic polynomial det(zI - F), ascending coefficients.
poly::Polynomial characteristic_polynomial(const Matrix& f);

// c^T (zI - F)^-1 g by the Leverrier-Faddeev recursion.
poly::RationalFunction ss_to_tf(const DiscreteStateSpace& sys);

}  // namespace asdrc::linalg
