#include <gtest/gtest.h>

#include "elh/coefficients.hpp"

using namespace elh;

TEST(Coefficients, FromIndependentDerivesDependentValues) {
  const auto c = LeslieCoefficients::from_independent(0.3, 2.0, 1.5, 0.25, -1.2, 0.7);
  EXPECT_DOUBLE_EQ(c.lambda2, 1.25);
  EXPECT_DOUBLE_EQ(c.mu2, 0.5 * (-1.2 - 1.25));
  EXPECT_DOUBLE_EQ(c.mu3, -0.5 * (-1.2 + 1.25));
  EXPECT_DOUBLE_EQ(c.mu2 - c.mu3, c.lambda1);
  EXPECT_DOUBLE_EQ(c.mu2 + c.mu3, c.mu6 - c.mu5);
  EXPECT_TRUE(c.relations_hold(1e-15));
}

TEST(Coefficients, RelationsDetectTampering) {
  auto c = preset("damped_default");
  ASSERT_TRUE(c.relations_hold());
  c.mu2 += 1e-6;
  EXPECT_FALSE(c.relations_hold(1e-12));
  EXPECT_TRUE(c.relations_hold(1e-5));
}

TEST(Coefficients, RejectsNonPositiveRho1) {
  EXPECT_THROW(LeslieCoefficients::from_independent(0, 1, 0, 0, -1, 0.0), Error);
  EXPECT_THROW(LeslieCoefficients::from_independent(0, 1, 0, 0, -1, -2.0), Error);
  try {
    LeslieCoefficients::from_independent(0, 1, 0, 0, -1, 0.0);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("rho1"), std::string::npos);
  }
}

TEST(Coefficients, WaveMapPresetIsZeroLambda1Class) {
  // Every Leslie coefficient except mu4 vanishes, which falls in the
  // lambda1 = 0 regime.
  const auto c = preset("wave_map");
  EXPECT_EQ(c.mu1, 0.0);
  EXPECT_EQ(c.mu2, 0.0);
  EXPECT_EQ(c.mu3, 0.0);
  EXPECT_EQ(c.mu5, 0.0);
  EXPECT_EQ(c.mu6, 0.0);
  EXPECT_EQ(c.lambda1, 0.0);
  EXPECT_EQ(c.lambda2, 0.0);
  EXPECT_GT(c.mu4, 0.0);
  EXPECT_TRUE(is_zero_lambda1(classify(c)));
}

TEST(Coefficients, DampedDefaultIsStrict) {
  const auto c = preset("damped_default");
  EXPECT_EQ(c.lambda1, -1.0);
  EXPECT_EQ(c.lambda2, 0.0);
  EXPECT_TRUE(is_strict_damping(classify(c)));
}

TEST(Coefficients, ZeroLambda1DefaultSatisfiesCompensation) {
  const auto c = preset("zero_lambda1_default");
  EXPECT_EQ(c.lambda1, 0.0);
  EXPECT_DOUBLE_EQ(c.lambda2, 0.5);
  const auto k = classify(c);
  ASSERT_TRUE(is_zero_lambda1(k));
  EXPECT_DOUBLE_EQ(std::get<ZeroLambda1>(k).delta, 0.5);
}

TEST(Coefficients, UnknownPresetListsValidNames) {
  try {
    preset("nematic");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    for (auto* n : kPresetNames) EXPECT_NE(msg.find(n), std::string::npos) << n;
  }
}

TEST(Coefficients, ClassifyReportsViolatedInequality) {
  auto neg_mu1 = LeslieCoefficients::from_independent(-0.1, 1, 1, 1, -1, 1);
  auto k = classify(neg_mu1);
  ASSERT_TRUE(is_invalid(k));
  EXPECT_NE(describe(k).find("mu1"), std::string::npos);

  auto no_visc = LeslieCoefficients::from_independent(0, 0, 1, 1, -1, 1);
  EXPECT_NE(describe(classify(no_visc)).find("mu4"), std::string::npos);

  auto antidamped = LeslieCoefficients::from_independent(0, 1, 1, 1, 0.5, 1);
  EXPECT_NE(describe(classify(antidamped)).find("lambda1 < 0"), std::string::npos);

  // lambda2 = -1, lambda1 = -0.5: mu5 + mu6 + lambda2^2 / lambda1 = 1 - 2 < 0.
  auto weak = LeslieCoefficients::from_independent(0, 1, 0, 1, -0.5, 1);
  EXPECT_NE(describe(classify(weak)).find("mu5 + mu6"), std::string::npos);
}

TEST(Coefficients, ClassifyBoundaryIsInclusive) {
  // mu5 + mu6 + lambda2^2 / lambda1 = 1 + 1 / (-1) = 0.
  auto edge = LeslieCoefficients::from_independent(0, 1, 0, 1, -1, 1);
  EXPECT_TRUE(is_strict_damping(classify(edge)));
  // (1 - delta) mu4 (mu5 + mu6) = 2 lambda2^2 exactly: 0.5 * 4 * 1 = 2 * 1.
  auto z = LeslieCoefficients::from_independent(0, 4, 1, 0, 0, 1);
  EXPECT_TRUE(is_zero_lambda1(classify(z, 0.5)));
  EXPECT_TRUE(is_invalid(classify(z, 0.6)));
}

TEST(Coefficients, ZeroLambda1NeedsDeltaInOpenUnitInterval) {
  auto c = LeslieCoefficients::from_independent(0, 4, 1, 0.5, 0, 1);
  EXPECT_THROW(classify(c), Error);
  EXPECT_THROW(classify(c, 0.0), Error);
  EXPECT_THROW(classify(c, 1.0), Error);
  EXPECT_NO_THROW(classify(c, 0.25));
}

TEST(Coefficients, Lambda1ToleranceWidensZeroTest) {
  auto c = LeslieCoefficients::from_independent(0, 4, 1, 0.5, -1e-14, 1);
  c.delta = 0.5;
  EXPECT_TRUE(is_invalid(classify(c)));  // strict test: mu5 + mu6 + lambda2^2/lambda1 << 0
  EXPECT_TRUE(is_zero_lambda1(classify(c, std::nullopt, 1e-12)));
}

TEST(Coefficients, Eta0ForDampedDefault) {
  // lambda2 = 0, mu4 = 2, rho1 = 1, lambda1 = -1, C = 1:
  // min{ 1 / (3 + 1), 1/2, 1, 1 } / 2 = 1/8.
  EXPECT_DOUBLE_EQ(eta0(preset("damped_default"), 1.0), 0.125);
  // Larger C shrinks the first candidate: 1 / (3 + 4) / 2.
  EXPECT_DOUBLE_EQ(eta0(preset("damped_default"), 2.0), 1.0 / 14.0);
}

TEST(Coefficients, Eta0RejectsNonStrictSets) {
  EXPECT_THROW(eta0(preset("wave_map"), 1.0), Error);
  EXPECT_THROW(eta0(preset("damped_default"), 0.0), Error);
}
