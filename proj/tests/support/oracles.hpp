#pragma once

// Independent reference computations for the tests: analytic sampling, naive
// Fourier synthesis and hand-written densities.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "elh/elh.hpp"

namespace oracle {

using elh::Grid;
using elh::RealField;
using elh::SpectralField;
using elh::Vec3;

/// Samples a vector-valued function at the grid points.
inline RealField sample(const Grid& g, int ncomp, const std::function<double(int, const Vec3&)>& f) {
  RealField r(g, ncomp);
  for (int c = 0; c < ncomp; ++c)
    for (std::size_t p = 0; p < g.size(); ++p) r.at(c, p) = f(c, g.point(p));
  return r;
}

inline SpectralField spectral(const Grid& g, int ncomp,
                              const std::function<double(int, const Vec3&)>& f) {
  return elh::forward(sample(g, ncomp, f));
}

/// Direct O(N^2) synthesis sum_k c_k exp(i k.x) at one point.
inline std::complex<double> synthesize(const SpectralField& f, int c, const Vec3& x) {
  std::complex<double> s = 0.0;
  for (std::size_t p = 0; p < f.grid.size(); ++p) {
    const auto& k = f.grid.wavevector(p);
    const double phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    s += f.at(c, p) * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return s;
}

/// Plain mean-times-volume quadrature of a pointwise density.
inline double integrate(const Grid& g, const std::function<double(std::size_t)>& density) {
  double s = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) s += density(p);
  return s * g.volume() / static_cast<double>(g.size());
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

inline double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

inline double max_abs(const SpectralField& a) {
  double m = 0.0;
  for (const auto& v : a.data) m = std::max(m, std::abs(v));
  return m;
}

/// Random generic (u, d, w) with modes |k| <= band; d is not unit length.
inline elh::State random_state(const Grid& g, std::uint64_t seed, int band = 3,
                               double d_amplitude = 0.5) {
  return elh::band_limited_state(g, seed, band, d_amplitude);
}

/// Random matrix / vector entries in [-1, 1).
struct PointDraw {
  std::mt19937_64 rng;
  explicit PointDraw(std::uint64_t seed) : rng(seed) {}
  double next() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); }
  Vec3 vec(int dim) {
    Vec3 v{};
    for (int i = 0; i < dim; ++i) v[i] = next();
    return v;
  }
  elh::Mat3 mat(int dim) {
    elh::Mat3 m{};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m[i][j] = next();
    return m;
  }
};

/// Pointwise dissipation density of the basic energy law, written out
/// directly from the index conventions.
inline double dissipation_density(const elh::LeslieCoefficients& c, const Vec3& d, const Vec3& w,
                                  const elh::Mat3& G, int dim) {
  double A[3][3] = {}, B[3][3] = {};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      A[i][j] = 0.5 * (G[i][j] + G[j][i]);
      B[i][j] = 0.5 * (G[i][j] - G[j][i]);
    }
  double Ad[3] = {}, Bd[3] = {}, dAd = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) {
      Ad[i] += A[i][k] * d[k];
      Bd[i] += B[k][i] * d[k];
    }
  for (int i = 0; i < dim; ++i) dAd += d[i] * Ad[i];
  double nn = 0.0, na = 0.0, aa = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double n = w[i] + Bd[i];
    nn += n * n;
    na += n * Ad[i];
    aa += Ad[i] * Ad[i];
  }
  return c.mu1 * dAd * dAd - c.lambda1 * nn - 2.0 * c.lambda2 * na + (c.mu5 + c.mu6) * aa;
}

}  // namespace oracle
