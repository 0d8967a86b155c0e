#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "asdrc/poly.hpp"

namespace asdrc::poly {
namespace {

// |p(z)| relative to the evaluation scale sum |a_k| |z|^k, i.e. the backward error.
double relative_residual(const std::vector<double>& a, Complex z) {
  Complex value = 0.0;
  double scale = 0.0;
  const double r = std::abs(z);
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    value = value * z + *it;
    scale = scale * r + std::abs(*it);
  }
  return scale == 0.0 ? 0.0 : std::abs(value) / scale;
}

// p(z) and p'(z) together by Horner.
void eval_with_derivative(const std::vector<double>& a, Complex z, Complex& p, Complex& dp) {
  p = 0.0;
  dp = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
}

// Enforces exact conjugate symmetry and real roots for a real polynomial.
std::vector<Complex> pair_conjugates(std::vector<Complex> zs) {
  std::vector<Complex> reals;
  std::vector<Complex> upper;
  std::vector<Complex> lower;
  for (const Complex& z : zs) {
    const double tol = 1e-10 * std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= tol)
      reals.emplace_back(z.real(), 0.0);
    else if (z.imag() > 0)
      upper.push_back(z);
    else
      lower.push_back(z);
  }
  // Unmatched halves (odd counts) are near-real roots that missed the tolerance.
  while (upper.size() > lower.size()) {
    auto it = std::min_element(upper.begin(), upper.end(),
                               [](Complex a, Complex b) { return a.imag() < b.imag(); });
    reals.emplace_back(it->real(), 0.0);
    upper.erase(it);
  }
  while (lower.size() > upper.size()) {
    auto it = std::max_element(lower.begin(), lower.end(),
                               [](Complex a, Complex b) { return a.imag() < b.imag(); });
    reals.emplace_back(it->real(), 0.0);
    lower.erase(it);
  }

  std::vector<Complex> out = reals;
  for (const Complex& u : upper) {
    auto best = std::min_element(lower.begin(), lower.end(), [&](Complex a, Complex b) {
      return std::abs(a - std::conj(u)) < std::abs(b - std::conj(u));
    });
    const Complex mean = 0.5 * (u + std::conj(*best));
    lower.erase(best);
    out.push_back(mean);
    out.push_back(std::conj(mean));
  }
  std::stable_sort(out.begin(), out.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() > b.imag();
  });
  return out;
}

}  // namespace

std::vector<Complex> roots(const Polynomial& p, const RootOptions& options) {
  if (p.is_zero()) throw InvalidArgument("roots of the zero polynomial are undefined");
  if (p.degree() < 1) throw InvalidArgument("roots requires degree >= 1");

  std::vector<Complex> found;
  std::vector<double> a = p.coeffs();
  // Exact roots at the origin.
  std::size_t lead_zeros = 0;
  while (lead_zeros < a.size() && a[lead_zeros] == 0.0) ++lead_zeros;
  found.assign(lead_zeros, Complex{0.0, 0.0});
  a.erase(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(lead_zeros));
  const double lead = a.back();
  for (double& c : a) c /= lead;

  const int n = static_cast<int>(a.size()) - 1;
  if (n == 1) {
    found.emplace_back(-a[0], 0.0);
    return pair_conjugates(std::move(found));
  }
  if (n >= 2) {
    // Start on a circle of radius |a0|^(1/n), rotated off the real axis.
    const double radius = std::pow(std::abs(a[0]), 1.0 / n);
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / n + 0.4;
      z[static_cast<std::size_t>(k)] = std::polar(radius, angle);
    }

    // Iterate to a backward error near machine precision; a looser stop lets two
    // approximations settle on one member of a tight cluster.
    const double polish = 4.0 * n * std::numeric_limits<double>::epsilon();
    std::vector<bool> done(z.size(), false);
    bool converged = false;
    for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
      converged = true;
      for (std::size_t i = 0; i < z.size(); ++i) {
        if (done[i]) continue;
        Complex pv;
        Complex dpv;
        eval_with_derivative(a, z[i], pv, dpv);
        if (pv == 0.0) {
          done[i] = true;
          continue;
        }
        const Complex ratio = pv / dpv;
        Complex repulsion = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j)
          if (j != i) repulsion += 1.0 / (z[i] - z[j]);
        const Complex step = ratio / (1.0 - ratio * repulsion);
        if (std::isfinite(step.real()) && std::isfinite(step.imag())) z[i] -= step;
        const bool tiny_step = std::abs(step) <= 4.0 * 2.2e-16 * std::abs(z[i]);
        if (relative_residual(a, z[i]) <= polish || tiny_step)
          done[i] = true;
        else
          converged = false;
      }
    }
    double worst = 0.0;
    for (const Complex& zi : z) worst = std::max(worst, relative_residual(a, zi));
    if (!converged && worst > options.tolerance) {
      throw ConvergenceError("Aberth iteration did not converge, worst residual " +
                                 std::to_string(worst),
                             worst);
    }
    found.insert(found.end(), z.begin(), z.end());
  }
  return pair_conjugates(std::move(found));
}

}  // namespace asdrc::poly
