#include <array>
#include <cmath>

#include "asdrc/linalg.hpp"

namespace asdrc::linalg {
namespace {

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Max 1-norm for which the degree-m approximant is accurate to unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

template <std::size_t K>
Matrix pade_low(const Matrix& a, const std::array<double, K>& b) {
  const Eigen::Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix odd = b[1] * ident;
  Matrix even = b[0] * ident;
  Matrix power = ident;
  for (std::size_t k = 2; k < K; k += 2) {
    power = power * a2;
    even += b[k] * power;
    if (k + 1 < K) odd += b[k + 1] * power;
  }
  const Matrix u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

Matrix pade13(const Matrix& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                        b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                   b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix mat_exp(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("mat_exp requires a square matrix");
  if (!m.allFinite()) throw InvalidArgument("mat_exp input has non-finite entries");
  if (m.rows() == 0) return m;

  const double norm = norm1(m);
  if (norm <= kTheta3) return pade_low(m, kPade3);
  if (norm <= kTheta5) return pade_low(m, kPade5);
  if (norm <= kTheta7) return pade_low(m, kPade7);
  if (norm <= kTheta9) return pade_low(m, kPade9);

  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  Matrix r = pade13(m * std::ldexp(1.0, -s));
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

}  // namespace asdrc::linalg
