#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "asdrc/rc_design.hpp"
#include "fixtures.hpp"

namespace {

namespace rc = asdrc::rc;
namespace poly = asdrc::poly;
using poly::Complex;
using poly::Polynomial;
using poly::RationalFunction;

constexpr double kTs = 0.1;
constexpr int kN = 209;

using asdrc::testing::kMarginHigherOrder;
using asdrc::testing::kMarginTraditional;

// The reflected-zero product z^-1 (1 + c z^-1)(1 + c z) / (1 + c)^2, built
// from the plant's uncancelable zero -c without going through zpetc().
Complex closed_form_tl(double c, Complex z) {
  return (1.0 / z) * (1.0 + c / z) * (1.0 + c * z) / ((1.0 + c) * (1.0 + c));
}

double unstable_zero_magnitude() {
  const auto p = asdrc::testing::robot_arm_plant();
  double c = 0.0;
  for (const Complex& z : poly::roots(p.num()))
    if (std::abs(z) > 1.0) c = -z.real();
  return c;
}

Complex q_design(Complex z) { return 0.5 + 0.2 / z + 0.2 / (z * z) + 0.1 / (z * z * z); }

Complex w_eval(const std::vector<double>& w, Complex z) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * std::pow(z, -static_cast<int>(i) * kN);
  return acc;
}

double oracle_margin(const std::vector<double>& w, int grid) {
  const double c = unstable_zero_magnitude();
  double worst = 0.0;
  for (int k = 0; k < grid; ++k) {
    const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * k / grid);
    worst = std::max(worst, std::abs(q_design(z) * w_eval(w, z) * std::pow(z, -kN) * (1.0 - closed_form_tl(c, z))));
  }
  return worst;
}

double oracle_sensitivity(const std::vector<double>& w, double omega) {
  const auto p = asdrc::testing::robot_arm_plant();
  const double c = unstable_zero_magnitude();
  const Complex z = std::polar(1.0, omega * kTs);
  const Complex pz = p.num()(z) / p.den()(z);
  const Complex x = q_design(z) * w_eval(w, z) * std::pow(z, -kN);
  return std::abs(1.0 / (1.0 + pz) * (1.0 - x) / (1.0 - x * (1.0 - closed_form_tl(c, z))));
}

TEST(ComputeN, Rounding) {
  EXPECT_EQ(rc::compute_N(20.0 * std::numbers::pi / 3.0, 0.1), 209);
  EXPECT_EQ(rc::compute_N(1.0, 0.5), 2);
  EXPECT_EQ(rc::compute_N(1.04, 0.1), 10);
  EXPECT_EQ(rc::compute_N(0.25, 0.1), 3);  // 2.5 rounds away from zero
  EXPECT_THROW(rc::compute_N(0.01, 0.1), asdrc::InvalidArgument);
  EXPECT_THROW(rc::compute_N(-1.0, 0.1), asdrc::InvalidArgument);
}

TEST(WeightFunction, Examples) {
  const auto w1 = rc::WeightFunction::make({1.0}, kN);
  EXPECT_EQ(w1(std::polar(1.0, 0.3)), Complex(1.0, 0.0));

  const auto w2 = rc::WeightFunction::make({2.0, -1.0}, kN);
  const Complex z = std::polar(1.0, 0.0123);
  EXPECT_LT(std::abs(w2(z) - (2.0 - std::pow(z, -kN))), 1e-12);
  EXPECT_EQ(w2.expand().degree(), kN);
  EXPECT_EQ(w2.expand()[kN], -1.0);
  EXPECT_NEAR(w2(Complex{1.0, 0.0}).real(), 1.0, 1e-15);

  EXPECT_THROW(rc::WeightFunction::make({0.5, 0.4}, kN), rc::WeightSumError);
  EXPECT_THROW(rc::WeightFunction::make({}, kN), rc::WeightSumError);
}

TEST(WeightFunctionProperty, RejectsEverySumOffOne) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> w(1 + trial % 4);
    double sum = 0.0;
    for (double& v : w) sum += (v = u(rng));
    if (std::abs(sum - 1.0) <= 1e-12) continue;
    EXPECT_THROW(rc::WeightFunction::make(w, 5), rc::WeightSumError);
    w.back() += 1.0 - sum;
    EXPECT_NO_THROW(rc::WeightFunction::make(w, 5));
  }
}

TEST(Zpetc, MinimumPhaseGivesExactInverse) {
  // P = (z - 0.5)/(z - 0.2): T has relative degree 0 and a stable zero.
  const RationalFunction p{Polynomial{-0.5, 1.0}, Polynomial{-0.2, 1.0}};
  const auto t = poly::ratfn_feedback(p);
  const auto f = rc::zpetc(t);
  EXPECT_EQ(f.advance, 0);
  for (double th = 0.0; th < 6.3; th += 0.1) {
    const Complex z = std::polar(1.0, th);
    EXPECT_LT(std::abs(t(z) * f.causal(z) - 1.0), 1e-12);
  }
}

TEST(Zpetc, RobotArmProductMatchesReflectedForm) {
  const auto d = asdrc::testing::robot_arm_design({1.0});
  const double c = unstable_zero_magnitude();
  EXPECT_NEAR(c, 9.399, 1e-3);
  EXPECT_EQ(d.advance, 1);
  EXPECT_TRUE(d.L_causal.is_proper());
  for (int k = 0; k < 512; ++k) {
    const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * k / 512);
    const Complex tl = d.T(z) * d.L(z);
    EXPECT_LT(std::abs(tl - closed_form_tl(c, z)), 1e-9);
  }
  // Exact product: cancellation leaves an FIR in z^-1 with three taps.
  const auto prod = poly::ratfn_mul(d.T, poly::ratfn_mul(d.L_causal, RationalFunction{Polynomial::monomial(1), Polynomial{1.0}}));
  EXPECT_EQ(prod.den(), Polynomial::monomial(2));
  ASSERT_EQ(prod.num().degree(), 2);
  const double scale = (1.0 + c) * (1.0 + c);
  EXPECT_NEAR(prod.num()[2], c / scale, 1e-9);
  EXPECT_NEAR(prod.num()[1], (1.0 + c * c) / scale, 1e-9);
  EXPECT_NEAR(prod.num()[0], c / scale, 1e-9);
}

TEST(Zpetc, UnityDcGainAndZeroPhase) {
  const auto d = asdrc::testing::robot_arm_design({1.0});
  EXPECT_NEAR((d.T(Complex{1.0, 0.0}) * d.L(Complex{1.0, 0.0})).real(), 1.0, 1e-10);
  const int n_t = d.split.advance_deficit;
  EXPECT_EQ(n_t, 1);
  for (int k = 1; k < 4096; ++k) {
    const double th = std::numbers::pi * k / 4096;
    const Complex z = std::polar(1.0, th);
    const Complex v = std::pow(z, n_t) * d.T(z) * d.L(z);
    EXPECT_LT(std::abs(std::arg(v)), 1e-9) << th;
  }
}

TEST(Zpetc, RejectsUnstableT) {
  const RationalFunction t{Polynomial{1.0}, Polynomial{-1.5, 1.0}};
  EXPECT_THROW(rc::zpetc(t), rc::StabilityConditionError);
}

TEST(Zpetc, AllZerosUncancelable) {
  // T = 0.5 (z + 2) / (z^2): every zero outside, stable factor is 1.
  const RationalFunction t{Polynomial{1.0, 0.5}, Polynomial{0.0, 0.0, 1.0}};
  const auto f = rc::zpetc(t);
  EXPECT_EQ(f.split.stable_factor, Polynomial{1.0});
  EXPECT_NEAR((t(Complex{1.0, 0.0}) * f.causal(Complex{1.0, 0.0})).real(), 1.0, 1e-14);
}

TEST(StabilityMargin, IdealDesignIsZero) {
  const RationalFunction p{Polynomial{-0.5, 1.0}, Polynomial{-0.2, 1.0}};
  rc::DesignInputs in;
  in.q_taps = {1.0};
  in.N = 10;
  const auto d = rc::synthesize(p, in);
  EXPECT_LT(d.margin, 1e-12);
  EXPECT_EQ(rc::unstable_mode_count(d), 0);
}

TEST(StabilityMargin, RobotArmTraditional) {
  const auto d = asdrc::testing::robot_arm_design({1.0});
  const double oracle = oracle_margin({1.0}, 8192);
  // Frozen from an independent double-precision reference; agreement is
  // limited by the conditioning of the plant zeros.
  EXPECT_NEAR(oracle, kMarginTraditional, 1e-8);
  EXPECT_NEAR(d.margin, oracle, 1e-9);
  EXPECT_TRUE(d.certified());
  EXPECT_EQ(rc::unstable_mode_count(d), 0);
}

TEST(StabilityMargin, RobotArmHigherOrderIsNotCertified) {
  // |W(-1)| = 3 for odd N and |Q(1 - TL)| = 0.661 at the Nyquist point.
  const auto d = asdrc::testing::robot_arm_design({2.0, -1.0});
  const double oracle = oracle_margin({2.0, -1.0}, 8192);
  EXPECT_NEAR(oracle, kMarginHigherOrder, 2e-8);
  EXPECT_NEAR(d.margin, oracle, 1e-9);
  EXPECT_FALSE(d.certified());
  EXPECT_GT(rc::unstable_mode_count(d), 0);
}

TEST(StabilityMargin, RoughQViolatesAtNyquist) {
  rc::DesignInputs in;
  in.q_taps = {2.0, -1.0};
  const auto d = rc::synthesize(asdrc::testing::robot_arm_plant(), in);
  EXPECT_GT(d.margin, 1.0);
  EXPECT_NEAR(std::abs(d.worst_theta), std::numbers::pi, 1e-3);
}

TEST(StabilityMargin, GridRefinementNeverLowersMax) {
  for (const auto& w : {std::vector<double>{1.0}, std::vector<double>{2.0, -1.0}}) {
    const auto d = asdrc::testing::robot_arm_design(w);
    EXPECT_GE(rc::stability_margin(d, 8192).margin, rc::stability_margin(d, 1024).margin - 1e-6);
  }
}

TEST(StabilityMargin, ReportsUnstableFactor) {
  const RationalFunction unstable_plant{Polynomial{1.0}, Polynomial{-1.2, 1.0}};
  try {
    rc::synthesize(unstable_plant, rc::DesignInputs{});
    FAIL() << "expected StabilityConditionError";
  } catch (const rc::StabilityConditionError& e) {
    EXPECT_EQ(e.factor(), rc::UnstableFactor::Plant);
  }
  // Stable P whose unity feedback closure is unstable: P = 3/(z - 0.5).
  const RationalFunction bad_loop{Polynomial{3.0}, Polynomial{-0.5, 1.0}};
  try {
    rc::synthesize(bad_loop, rc::DesignInputs{});
    FAIL() << "expected StabilityConditionError";
  } catch (const rc::StabilityConditionError& e) {
    EXPECT_EQ(e.factor(), rc::UnstableFactor::Sensitivity);
  }
}

TEST(Sensitivity, DcNotchAndHarmonics) {
  const double w1 = 2.0 * std::numbers::pi / (kN * kTs);
  const std::vector<double> omegas = {0.0, w1, 1.01 * w1};
  const auto trad = rc::sensitivity_curve(asdrc::testing::robot_arm_design({1.0}), omegas, kTs);
  const auto high = rc::sensitivity_curve(asdrc::testing::robot_arm_design({2.0, -1.0}), omegas, kTs,
                                          rc::Admission::AllowUncertified);
  EXPECT_LT(trad.magnitudes[0], 1e-12);
  EXPECT_LT(high.magnitudes[0], 1e-12);
  for (std::size_t i = 1; i < omegas.size(); ++i) {
    EXPECT_NEAR(trad.magnitudes[i], oracle_sensitivity({1.0}, omegas[i]), 1e-9);
    EXPECT_NEAR(high.magnitudes[i], oracle_sensitivity({2.0, -1.0}, omegas[i]), 1e-9);
  }
  // Q's phase lag leaves about 2.75% at the exact harmonic for both weightings.
  EXPECT_NEAR(trad.magnitudes[1], 0.027521770633, 1e-9);
  EXPECT_LE(high.magnitudes[2], trad.magnitudes[2]);
}

TEST(Sensitivity, UncertifiedDesignNeedsOptIn) {
  const auto high = asdrc::testing::robot_arm_design({2.0, -1.0});
  const std::vector<double> omegas = {0.1};
  EXPECT_THROW(rc::sensitivity_curve(high, omegas, kTs), asdrc::InvalidArgument);
}

TEST(Sensitivity, CsvFormat) {
  rc::SensitivityCurve c{{0.0, 0.5}, {0.0, 1.0 / 3.0}};
  std::ostringstream os;
  rc::write_sensitivity_csv(os, c);
  EXPECT_EQ(os.str(), "omega_rad_s,magnitude\n0,0\n0.5,0.33333333333333331\n");
}

}  // namespace
