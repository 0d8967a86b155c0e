#include <string>

#include "asdrc/linalg.hpp"

namespace asdrc::linalg {
namespace {

void check_dims(const Matrix& a, const Vector& b, const Vector& c, const char* what) {
  if (a.rows() < 1 || a.rows() != a.cols())
    throw InvalidArgument(std::string(what) + ": state matrix must be square with n >= 1");
  if (b.size() != a.rows() || c.size() != a.rows())
    throw InvalidArgument(std::string(what) + ": input/output vectors must have dimension n");
  if (!a.allFinite() || !b.allFinite() || !c.allFinite())
    throw InvalidArgument(std::string(what) + ": non-finite entries");
}

// Leverrier-Faddeev: adj(zI - F) = sum_k M_k z^(n-k), det(zI - F) = sum_j a_j z^j.
struct Faddeev {
  std::vector<Matrix> adjugate_terms;  // M_1 .. M_n
  std::vector<double> char_coeffs;     // ascending, monic
};

Faddeev faddeev(const Matrix& f) {
  const Eigen::Index n = f.rows();
  Faddeev out;
  out.char_coeffs.assign(static_cast<std::size_t>(n) + 1, 0.0);
  out.char_coeffs[static_cast<std::size_t>(n)] = 1.0;
  const Matrix ident = Matrix::Identity(n, n);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = f * m + out.char_coeffs[static_cast<std::size_t>(n - k + 1)] * ident;
    out.adjugate_terms.push_back(m);
    out.char_coeffs[static_cast<std::size_t>(n - k)] = -(f * m).trace() / static_cast<double>(k);
  }
  return out;
}

}  // namespace

void ContinuousStateSpace::validate() const { check_dims(A, b, c, "continuous state space"); }

void DiscreteStateSpace::validate() const {
  check_dims(F, g, c, "discrete state space");
  if (!(Ts > 0.0)) throw InvalidArgument("discrete state space: Ts must be positive");
}

DiscreteStateSpace zoh_discretize(const ContinuousStateSpace& sys, double Ts) {
  sys.validate();
  if (!(Ts > 0.0) || !std::isfinite(Ts)) throw InvalidArgument("zoh_discretize: Ts must be positive");
  const Eigen::Index n = sys.order();
  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = sys.A * Ts;
  aug.topRightCorner(n, 1) = sys.b * Ts;
  const Matrix e = mat_exp(aug);
  DiscreteStateSpace out;
  out.F = e.topLeftCorner(n, n);
  out.g = e.topRightCorner(n, 1);
  out.c = sys.c;
  out.Ts = Ts;
  return out;
}

poly::Polynomial characteristic_polynomial(const Matrix& f) {
  if (f.rows() != f.cols() || f.rows() < 1)
    throw InvalidArgument("characteristic_polynomial requires a square matrix");
  return poly::Polynomial(faddeev(f).char_coeffs);
}

poly::RationalFunction ss_to_tf(const DiscreteStateSpace& sys) {
  sys.validate();
  const Eigen::Index n = sys.order();
  const Faddeev fd = faddeev(sys.F);
  std::vector<double> num(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index k = 1; k <= n; ++k)
    num[static_cast<std::size_t>(n - k)] =
        sys.c.dot(fd.adjugate_terms[static_cast<std::size_t>(k - 1)] * sys.g);
  return {poly::Polynomial(std::move(num)), poly::Polynomial(fd.char_coeffs)};
}

}  // namespace asdrc::linalg
