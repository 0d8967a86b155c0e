#include <algorithm>
#include <cmath>

#include "asdrc/poly.hpp"

namespace asdrc::poly {

Polynomial::Polynomial(std::initializer_list<double> ascending) : coeffs_(ascending) { trim(); }

Polynomial::Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending)) { trim(); }

void Polynomial::trim() {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw InvalidArgument("polynomial coefficient is not finite");
  }
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial Polynomial::constant(double c) { return Polynomial(std::vector<double>{c}); }

Polynomial Polynomial::monomial(int power, double c) {
  if (power < 0) throw InvalidArgument("monomial power must be nonnegative");
  std::vector<double> v(static_cast<std::size_t>(power) + 1, 0.0);
  v.back() = c;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots) {
  std::vector<Complex> acc{1.0};
  for (const Complex& r : roots) {
    std::vector<Complex> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] -= r * acc[i];
    }
    acc = std::move(next);
  }
  std::vector<double> out(acc.size());
  std::transform(acc.begin(), acc.end(), out.begin(), [](Complex c) { return c.real(); });
  return Polynomial(std::move(out));
}

int Polynomial::degree() const noexcept {
  return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1;
}

double Polynomial::leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

double Polynomial::operator[](int power) const noexcept {
  if (power < 0 || power >= static_cast<int>(coeffs_.size())) return 0.0;
  return coeffs_[static_cast<std::size_t>(power)];
}

double Polynomial::operator()(double z) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Complex Polynomial::operator()(Complex z) const noexcept {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::reversed() const {
  std::vector<double> v(coeffs_.rbegin(), coeffs_.rend());
  return Polynomial(std::move(v));
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<double> v(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) v[i - 1] = static_cast<double>(i) * coeffs_[i];
  return Polynomial(std::move(v));
}

Polynomial Polynomial::monic() const {
  if (is_zero()) throw InvalidArgument("zero polynomial has no monic form");
  Polynomial out = *this;
  const double lead = leading();
  for (double& c : out.coeffs_) c /= lead;
  out.coeffs_.back() = 1.0;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
  for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<double> v(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(v));
}

}  // namespace asdrc::poly
