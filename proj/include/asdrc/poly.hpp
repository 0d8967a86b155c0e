#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "asdrc/error.hpp"

namespace asdrc::poly {

using Complex = std::complex<double>;

// Real polynomial in z, coefficients stored in ascending powers.
// The highest stored coefficient is nonzero unless the polynomial is zero,
// in which case the coefficient list is empty.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> ascending);
  explicit Polynomial(std::vector<double> ascending);

  static Polynomial constant(double c);
  static Polynomial monomial(int power, double c = 1.0);
  // Monic polynomial with the given roots. Complex roots must come in
  // conjugate pairs; the imaginary residue of the product is discarded.
  static Polynomial from_roots(std::span<const Complex> roots);

  // Degree of the zero polynomial is reported as 0; use is_zero() to tell.
  int degree() const noexcept;
  bool is_zero() const noexcept { return coeffs_.empty(); }
  double leading() const noexcept;
  double operator[](int power) const noexcept;
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  double operator()(double z) const noexcept;
  Complex operator()(Complex z) const noexcept;

  // z^deg * p(1/z): coefficient order reversed.
  Polynomial reversed() const;
  Polynomial derivative() const;
  Polynomial monic() const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim();
  std::vector<double> coeffs_;
};

struct RootOptions {
  double tolerance = 1e-12;
  int max_iterations = 500;
};

// All complex roots by Aberth-Ehrlich simultaneous iteration. Conjugate pairs
// are returned adjacent (positive imaginary part first), real roots have an
// exactly zero imaginary part, and the result is sorted by real part.
// Throws ConvergenceError if the iteration stalls.
std::vector<Complex> roots(const Polynomial& p, const RootOptions& options = {});

// Rational function num/den in positive powers of z, den monic.
class RationalFunction {
 public:
  RationalFunction() : RationalFunction(Polynomial::constant(0.0), Polynomial::constant(1.0)) {}
  RationalFunction(Polynomial num, Polynomial den);

  static RationalFunction constant(double k);
  // z^-k
  static RationalFunction delay(int k);

  const Polynomial& num() const noexcept { return num_; }
  const Polynomial& den() const noexcept { return den_; }
  // deg den - deg num (the zero function reports 0).
  int relative_degree() const noexcept;
  bool is_proper() const noexcept { return relative_degree() >= 0; }

  Complex operator()(Complex z) const noexcept;
  double operator()(double z) const noexcept;

 private:
  Polynomial num_;
  Polynomial den_;
};

RationalFunction ratfn_add(const RationalFunction& a, const RationalFunction& b);
RationalFunction ratfn_mul(const RationalFunction& a, const RationalFunction& b);
// Unity negative feedback closure P/(1+P) = num/(den+num).
RationalFunction ratfn_feedback(const RationalFunction& p);

// Removes factors whose roots in num and den coincide within `tolerance`.
// Coefficients are left untouched when nothing cancels.
RationalFunction cancel_common_roots(const RationalFunction& r, double tolerance = 1e-9);

inline constexpr double kCancelableThreshold = 1.0 - 1e-6;
inline constexpr double kSchurBoundary = 1.0 - 1e-9;

struct ZeroSplit {
  Polynomial stable_factor;    // monic, roots with |z| < threshold
  Polynomial unstable_factor;  // monic, roots with |z| >= threshold
  double gain = 0.0;           // leading coefficient of the input
  int advance_deficit = 0;     // relative degree n_T when split from a rational function
};

ZeroSplit split_zeros(const Polynomial& p, double threshold = kCancelableThreshold);
// Splits the numerator and records the relative degree.
ZeroSplit split_zeros(const RationalFunction& r, double threshold = kCancelableThreshold);

struct FrequencyPoint {
  Complex value;
  bool at_pole = false;  // evaluation hit (or overflowed near) a pole
};

// r(e^{i w Ts}) for every w.
std::vector<FrequencyPoint> freq_response(const RationalFunction& r, std::span<const double> omegas,
                                          double Ts);

// True iff every root has modulus below 1 - 1e-9. Constants are stable.
bool is_schur_stable(const Polynomial& p);

}  // namespace asdrc::poly
