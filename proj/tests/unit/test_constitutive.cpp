#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace elh;

namespace {

LeslieCoefficients generic_coefficients() {
  // Arbitrary signs on purpose: the algebraic identities hold for any set.
  return LeslieCoefficients::from_independent(0.7, 1.3, -0.4, 0.9, -0.6, 1.7);
}

struct PointSample {
  Vec3 d, w;
  Mat3 g;
};

PointSample draw(oracle::PointDraw& r, int dim) { return {r.vec(dim), r.vec(dim), r.mat(dim)}; }

}  // namespace

TEST(PointKernels, SpinContractsFirstIndex) {
  Mat3 gu{};
  gu[0][1] = 2.0;  // d_y u_x
  const Mat3 b = point::spin(gu, 2);
  EXPECT_DOUBLE_EQ(b[0][1], 1.0);
  EXPECT_DOUBLE_EQ(b[1][0], -1.0);
  // (Bd)_i = B_ki d_k with d = e_x picks row 0: (B_00, B_01).
  const Vec3 bd = point::spin_times(b, {1, 0, 0}, 2);
  EXPECT_DOUBLE_EQ(bd[0], 0.0);
  EXPECT_DOUBLE_EQ(bd[1], 1.0);
  const Vec3 ad = point::strain_times(point::strain(gu, 2), {1, 0, 0}, 2);
  EXPECT_DOUBLE_EQ(ad[1], 1.0);
}

TEST(PointKernels, StrainAndSpinSplitGradient) {
  oracle::PointDraw r(1);
  for (int dim : {2, 3}) {
    const Mat3 g = r.mat(dim);
    const Mat3 a = point::strain(g, dim), b = point::spin(g, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        EXPECT_DOUBLE_EQ(a[i][j] + b[i][j], g[i][j]);
        EXPECT_DOUBLE_EQ(a[i][j], a[j][i]);
        EXPECT_DOUBLE_EQ(b[i][j], -b[j][i]);
      }
  }
}

TEST(PointKernels, LeslieStressMatchesComponentFormula) {
  const auto c = generic_coefficients();
  oracle::PointDraw r(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 2 + trial % 2;
    const auto s = draw(r, dim);
    double A[3][3] = {}, B[3][3] = {};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        A[i][j] = 0.5 * (s.g[i][j] + s.g[j][i]);
        B[i][j] = 0.5 * (s.g[i][j] - s.g[j][i]);
      }
    double N[3] = {}, Ad[3] = {}, dAd = 0;
    for (int i = 0; i < dim; ++i) {
      N[i] = s.w[i];
      for (int k = 0; k < dim; ++k) {
        N[i] += B[k][i] * s.d[k];
        Ad[i] += A[i][k] * s.d[k];
      }
    }
    for (int i = 0; i < dim; ++i) dAd += s.d[i] * Ad[i];
    const Mat3 sig = point::leslie_stress(c, s.d, s.w, point::strain(s.g, dim), point::spin(s.g, dim), dim);
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) {
        const double e = c.mu1 * dAd * s.d[i] * s.d[j] + c.mu2 * s.d[j] * N[i] + c.mu3 * s.d[i] * N[j] +
                         c.mu5 * s.d[j] * Ad[i] + c.mu6 * s.d[i] * Ad[j];
        EXPECT_NEAR(sig[j][i], e, 1e-14);
      }
  }
}

TEST(PointKernels, StressPowerMinusDirectorWorkIsDissipationDensity) {
  // sigma : grad u - w . (lambda1 N + lambda2 A d) = D for arbitrary d, w, grad u.
  const auto c = generic_coefficients();
  oracle::PointDraw r(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 2;
    const auto s = draw(r, dim);
    const Mat3 a = point::strain(s.g, dim), b = point::spin(s.g, dim);
    const Mat3 sig = point::leslie_stress(c, s.d, s.w, a, b, dim);
    double power = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) power += sig[j][i] * s.g[i][j];  // sigma_ji d_j u_i
    const Vec3 bd = point::spin_times(b, s.d, dim), ad = point::strain_times(a, s.d, dim);
    double work = 0.0;
    for (int i = 0; i < dim; ++i) work += s.w[i] * (c.lambda1 * (s.w[i] + bd[i]) + c.lambda2 * ad[i]);
    EXPECT_NEAR(power - work, oracle::dissipation_density(c, s.d, s.w, s.g, dim), 1e-12);
  }
}

TEST(PointKernels, LagrangeMultiplier) {
  oracle::PointDraw r(4);
  const auto s = draw(r, 3);
  const Mat3 gd = r.mat(3);
  const Mat3 a = point::strain(s.g, 3);
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) {
    expected -= 2.5 * s.w[i] * s.w[i];
    for (int j = 0; j < 3; ++j) expected += gd[i][j] * gd[i][j] - 0.3 * s.d[i] * a[i][j] * s.d[j];
  }
  EXPECT_NEAR(point::lagrange_multiplier(2.5, 0.3, s.d, s.w, gd, a, 3), expected, 1e-13);
}

TEST(PointKernels, EricksenIsGramOfDirectorGradient) {
  Mat3 gd{};
  gd[0][0] = 1;  // d_x d_0
  gd[1][0] = 2;  // d_x d_1
  gd[1][1] = 3;  // d_y d_1
  const Mat3 e = point::ericksen(gd, 2);
  EXPECT_DOUBLE_EQ(e[0][0], 5);  // |d_x d|^2
  EXPECT_DOUBLE_EQ(e[0][1], 6);  // d_x d . d_y d
  EXPECT_DOUBLE_EQ(e[1][0], 6);
  EXPECT_DOUBLE_EQ(e[1][1], 9);
}

TEST(FieldOps, ShearFlowKinematics) {
  // u = (sin y, 0), d = e_x, w = 0: A_01 = A_10 = B_01 = cos(y)/2 and
  // N = Bd = A d = (0, cos(y)/2).
  Grid g(2, 16);
  auto u = oracle::spectral(g, 2, [](int c, const Vec3& x) { return c == 0 ? std::sin(x[1]) : 0.0; });
  auto d = oracle::spectral(g, 2, [](int c, const Vec3&) { return c == 0 ? 1.0 : 0.0; });
  SpectralField w(g, 2);
  const auto kin = kinematics(u, d, w, Dealias::two_thirds());
  const auto A = inverse(kin.A), B = inverse(kin.B), N = inverse(kin.N);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double h = 0.5 * std::cos(g.point(p)[1]);
    EXPECT_NEAR(A.at(tensor_index(2, 0, 1), p), h, 1e-14);
    EXPECT_NEAR(A.at(tensor_index(2, 1, 0), p), h, 1e-14);
    EXPECT_NEAR(B.at(tensor_index(2, 0, 1), p), h, 1e-14);
    EXPECT_NEAR(B.at(tensor_index(2, 1, 0), p), -h, 1e-14);
    EXPECT_NEAR(N.at(0, p), 0.0, 1e-14);
    EXPECT_NEAR(N.at(1, p), h, 1e-14);
  }
  const auto c = generic_coefficients();
  const auto t = inverse(kinematic_transport(kin, d, c, Dealias::two_thirds()));
  for (std::size_t p = 0; p < g.size(); ++p) {
    EXPECT_NEAR(t.at(1, p), (c.lambda1 + c.lambda2) * 0.5 * std::cos(g.point(p)[1]), 1e-14);
  }
  // gamma = -lambda2 dAd = 0 here.
  const auto gamma = inverse(lagrange_multiplier(u, d, w, c, Dealias::two_thirds()));
  EXPECT_LT(max_abs(gamma), 1e-14);
}

TEST(FieldOps, LeslieStressAgreesWithPointwiseKernelOnResolvedFields) {
  // Band-1 data and a 5-factor padded rule keep every product resolved, so
  // the field-level stress equals the kernel evaluated at the grid points.
  Grid g(2, 16);
  const auto s = oracle::random_state(g, 7, 1);
  const auto c = generic_coefficients();
  const auto st = leslie_stress(s.u, s.d, s.w, c, Dealias::padded(5));
  const auto sig = inverse(st.sigma);
  const auto gu = inverse(gradient(s.u)), d = inverse(s.d), w = inverse(s.w);
  for (std::size_t p = 0; p < g.size(); ++p) {
    Mat3 G{};
    Vec3 dv{}, wv{};
    for (int i = 0; i < 2; ++i) {
      dv[i] = d.at(i, p);
      wv[i] = w.at(i, p);
      for (int j = 0; j < 2; ++j) G[i][j] = gu.at(tensor_index(2, i, j), p);
    }
    const Mat3 e = point::leslie_stress(c, dv, wv, point::strain(G, 2), point::spin(G, 2), 2);
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) EXPECT_NEAR(sig.at(tensor_index(2, j, i), p), e[j][i], 1e-12);
  }
  const auto div_first = divergence(st.sigma, Contract::First);
  EXPECT_LT(oracle::max_abs_diff(div_first, st.div_sigma), 1e-15);
}

TEST(FieldOps, EricksenDivergenceMatchesExpandedForm) {
  // -d_j(d_i d_k d_j d_k) = -(d_i |grad d|^2 / 2 + lap d_k d_i d_k)
  Grid g(3, 16);
  const auto s = oracle::random_state(g, 9, 1);
  const auto lhs = ericksen_stress_div(s.d, Dealias::padded(2));

  const auto gd = inverse(gradient(s.d));
  const auto lap = inverse(laplacian(s.d));
  RealField half_sq(g, 1), prod(g, 3);
  for (std::size_t p = 0; p < g.size(); ++p) {
    double q = 0.0;
    for (int k = 0; k < 9; ++k) q += gd.at(k, p) * gd.at(k, p);
    half_sq.at(0, p) = 0.5 * q;
    for (int i = 0; i < 3; ++i) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += lap.at(k, p) * gd.at(tensor_index(3, k, i), p);
      prod.at(i, p) = v;
    }
  }
  const auto rhs = -1.0 * (gradient(forward(half_sq)) + forward(prod));
  EXPECT_LT(oracle::max_abs_diff(lhs, rhs), 1e-13);
}

TEST(FieldOps, StressOfWaveMapCoefficientsVanishes) {
  Grid g(2, 8);
  const auto s = oracle::random_state(g, 1, 2);
  const auto st = leslie_stress(s.u, s.d, s.w, preset("wave_map"), Dealias::two_thirds());
  EXPECT_EQ(oracle::max_abs(st.sigma), 0.0);
}

TEST(FieldOps, RejectMismatchedInputs) {
  Grid g(2, 8), h(2, 16);
  const auto c = generic_coefficients();
  SpectralField v(g, 2), s(g, 1), other(h, 2);
  EXPECT_THROW(kinematics(v, v, s, Dealias::two_thirds()), Error);
  EXPECT_THROW(kinematics(v, other, v, Dealias::two_thirds()), Error);
  EXPECT_THROW(leslie_stress(v, s, v, c, Dealias::two_thirds()), Error);
  EXPECT_THROW(lagrange_multiplier(other, v, v, c, Dealias::two_thirds()), Error);
  EXPECT_THROW(ericksen_stress_div(s, Dealias::two_thirds()), Error);
}
