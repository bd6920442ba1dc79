#pragma once

// Kinematic tensors, the Lagrange multiplier enforcing |d| = 1, the kinematic
// transport, the reduced Leslie stress and the Ericksen elastic stress.
//
// Index conventions (kept verbatim because the energy cancellations depend on
// them):
//   grad_u[i][j] = d_j u_i
//   A_ij = (d_j u_i + d_i u_j) / 2,  B_ij = (d_j u_i - d_i u_j) / 2
//   (Bd)_i = B_ki d_k   (contraction over the FIRST index of B)
//   (Ad)_i = A_ij d_j
//   sigma[j][i] holds the (j, i) entry of the Leslie stress, and its
//   divergence is (div sigma)_i = d_j sigma_ji.

#include <vector>

#include "coefficients.hpp"
#include "spectral.hpp"

namespace elh {

// ---------------------------------------------------------------------------
// Pointwise kernels
// ---------------------------------------------------------------------------

namespace point {

inline Mat3 strain(const Mat3& grad_u, int dim) {
  Mat3 a{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a[i][j] = 0.5 * (grad_u[i][j] + grad_u[j][i]);
  return a;
}

inline Mat3 spin(const Mat3& grad_u, int dim) {
  Mat3 b{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) b[i][j] = 0.5 * (grad_u[i][j] - grad_u[j][i]);
  return b;
}

/// (Bd)_i = B_ki d_k
inline Vec3 spin_times(const Mat3& b, const Vec3& d, int dim) {
  Vec3 r{};
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) r[i] += b[k][i] * d[k];
  return r;
}

/// (Ad)_i = A_ij d_j
inline Vec3 strain_times(const Mat3& a, const Vec3& d, int dim) {
  Vec3 r{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) r[i] += a[i][j] * d[j];
  return r;
}

inline double dot(const Vec3& a, const Vec3& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

inline double frobenius_sq(const Mat3& m, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += m[i][j] * m[i][j];
  return s;
}

/// gamma = -rho1 |w|^2 + |grad d|^2 - lambda2 d.A d
inline double lagrange_multiplier(double rho1, double lambda2, const Vec3& d, const Vec3& w,
                                  const Mat3& grad_d, const Mat3& a, int dim) {
  const Vec3 ad = strain_times(a, d, dim);
  return -rho1 * dot(w, w, dim) + frobenius_sq(grad_d, dim) - lambda2 * dot(d, ad, dim);
}

/// sigma[j][i] per the reduced Leslie stress.
inline Mat3 leslie_stress(const LeslieCoefficients& c, const Vec3& d, const Vec3& w,
                          const Mat3& a, const Mat3& b, int dim) {
  const Vec3 bd = spin_times(b, d, dim);
  const Vec3 ad = strain_times(a, d, dim);  // = d_k A_ki by symmetry
  const double dad = dot(d, ad, dim);
  Mat3 s{};
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      s[j][i] = c.mu1 * dad * d[i] * d[j] + c.mu2 * d[j] * (w[i] + bd[i]) +
                c.mu3 * d[i] * (w[j] + bd[j]) + c.mu5 * d[j] * ad[i] + c.mu6 * d[i] * ad[j];
    }
  }
  return s;
}

/// (grad d . grad d)_ij = sum_k d_i d_k d_j d_k with grad_d[k][i] = d_i d_k.
inline Mat3 ericksen(const Mat3& grad_d, int dim) {
  Mat3 e{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) e[i][j] += grad_d[k][i] * grad_d[k][j];
  return e;
}

}  // namespace point

// ---------------------------------------------------------------------------
// Physical samples shared by the field-level operations
// ---------------------------------------------------------------------------

/// Real-space samples of the fields a kernel needs, on a ProductSpace grid.
struct Samples {
  int dim = 0;
  std::size_t size = 0;
  RealField u, grad_u, d, grad_d, w, grad_w;

  Vec3 vec(const RealField& f, std::size_t p) const {
    Vec3 v{};
    for (int i = 0; i < dim; ++i) v[i] = f.at(i, p);
    return v;
  }
  Mat3 mat(const RealField& f, std::size_t p) const {
    Mat3 m{};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m[i][j] = f.at(tensor_index(dim, i, j), p);
    return m;
  }
};

struct SampleRequest {
  bool u = false, grad_u = false, d = false, grad_d = false, w = false, grad_w = false;
};

inline Samples sample(const ProductSpace& space, const SpectralField* u, const SpectralField* d,
                      const SpectralField* w, SampleRequest req) {
  Samples s;
  s.dim = space.grid().dim();
  s.size = space.physical_grid().size();
  if (req.u) s.u = space.to_physical(*u);
  if (req.grad_u) s.grad_u = space.to_physical(gradient(*u));
  if (req.d) s.d = space.to_physical(*d);
  if (req.grad_d) s.grad_d = space.to_physical(gradient(*d));
  if (req.w) s.w = space.to_physical(*w);
  if (req.grad_w) s.grad_w = space.to_physical(gradient(*w));
  return s;
}

inline void check_state_fields(const SpectralField& u, const SpectralField& d,
                               const SpectralField& w) {
  const int dim = u.grid.dim();
  if (!(u.grid == d.grid) || !(u.grid == w.grid)) {
    fail(ErrorKind::Precondition, "constitutive: fields live on different grids");
  }
  if (u.components != dim || d.components != dim || w.components != dim) {
    fail(ErrorKind::Precondition, "constitutive: u, d, w must be vector fields");
  }
}

// ---------------------------------------------------------------------------
// Field-level operations
// ---------------------------------------------------------------------------

struct KinematicTensors {
  SpectralField A;  ///< rank 2, symmetric
  SpectralField B;  ///< rank 2, skew
  SpectralField N;  ///< vector, w + Bd
};

/// A and B are linear in u and computed exactly; N needs the product Bd.
inline KinematicTensors kinematics(const SpectralField& u, const SpectralField& d,
                                   const SpectralField& w, const Dealias& rule) {
  check_state_fields(u, d, w);
  const Grid& g = u.grid;
  const int dim = g.dim();
  const SpectralField gu = gradient(u);
  KinematicTensors out{SpectralField(g, dim * dim), SpectralField(g, dim * dim), SpectralField()};
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      auto a = out.A.component(tensor_index(dim, i, j));
      auto b = out.B.component(tensor_index(dim, i, j));
      auto gij = gu.component(tensor_index(dim, i, j));
      auto gji = gu.component(tensor_index(dim, j, i));
      for (std::size_t p = 0; p < g.size(); ++p) {
        a[p] = 0.5 * (gij[p] + gji[p]);
        b[p] = 0.5 * (gij[p] - gji[p]);
      }
    }
  }
  ProductSpace space(g, rule);
  Samples s = sample(space, &u, &d, &w, {.grad_u = true, .d = true});
  RealField bd(space.physical_grid(), dim);
  for (std::size_t p = 0; p < s.size; ++p) {
    const Vec3 v = point::spin_times(point::spin(s.mat(s.grad_u, p), dim), s.vec(s.d, p), dim);
    for (int i = 0; i < dim; ++i) bd.at(i, p) = v[i];
  }
  out.N = w + space.from_physical(bd);
  return out;
}

inline SpectralField lagrange_multiplier(const SpectralField& u, const SpectralField& d,
                                         const SpectralField& w, const LeslieCoefficients& c,
                                         const Dealias& rule) {
  check_state_fields(u, d, w);
  const int dim = u.grid.dim();
  ProductSpace space(u.grid, rule);
  Samples s = sample(space, &u, &d, &w, {.grad_u = true, .d = true, .grad_d = true, .w = true});
  RealField gamma(space.physical_grid(), 1);
  for (std::size_t p = 0; p < s.size; ++p) {
    gamma.at(0, p) = point::lagrange_multiplier(c.rho1, c.lambda2, s.vec(s.d, p), s.vec(s.w, p),
                                                s.mat(s.grad_d, p),
                                                point::strain(s.mat(s.grad_u, p), dim), dim);
  }
  return space.from_physical(gamma);
}

/// g = lambda1 N + lambda2 A d
inline SpectralField kinematic_transport(const KinematicTensors& t, const SpectralField& d,
                                         const LeslieCoefficients& c, const Dealias& rule) {
  const Grid& g = d.grid;
  const int dim = g.dim();
  ProductSpace space(g, rule);
  RealField a = space.to_physical(t.A);
  RealField dd = space.to_physical(d);
  RealField ad(space.physical_grid(), dim);
  for (std::size_t p = 0; p < space.physical_grid().size(); ++p) {
    for (int i = 0; i < dim; ++i) {
      double s = 0.0;
      for (int j = 0; j < dim; ++j) s += a.at(tensor_index(dim, i, j), p) * dd.at(j, p);
      ad.at(i, p) = s;
    }
  }
  return c.lambda1 * t.N + c.lambda2 * space.from_physical(ad);
}

struct StressField {
  /// Component tensor_index(dim, j, i) holds sigma_ji.
  SpectralField sigma;
  /// (div sigma)_i = d_j sigma_ji
  SpectralField div_sigma;
};

inline StressField leslie_stress(const SpectralField& u, const SpectralField& d,
                                 const SpectralField& w, const LeslieCoefficients& c,
                                 const Dealias& rule) {
  check_state_fields(u, d, w);
  const int dim = u.grid.dim();
  ProductSpace space(u.grid, rule);
  Samples s = sample(space, &u, &d, &w, {.grad_u = true, .d = true, .w = true});
  RealField sig(space.physical_grid(), dim * dim);
  for (std::size_t p = 0; p < s.size; ++p) {
    const Mat3 gu = s.mat(s.grad_u, p);
    const Mat3 st = point::leslie_stress(c, s.vec(s.d, p), s.vec(s.w, p), point::strain(gu, dim),
                                         point::spin(gu, dim), dim);
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) sig.at(tensor_index(dim, j, i), p) = st[j][i];
  }
  StressField out;
  out.sigma = space.from_physical(sig);
  out.div_sigma = divergence(out.sigma, Contract::First);
  return out;
}

/// -div(grad d . grad d); the gradient part is removed later by the projection.
inline SpectralField ericksen_stress_div(const SpectralField& d, const Dealias& rule) {
  const Grid& g = d.grid;
  const int dim = g.dim();
  require(d.components == dim, "ericksen_stress_div: d must be a vector field");
  ProductSpace space(g, rule);
  RealField gd = space.to_physical(gradient(d));
  RealField e(space.physical_grid(), dim * dim);
  Samples tmp;
  tmp.dim = dim;
  for (std::size_t p = 0; p < space.physical_grid().size(); ++p) {
    const Mat3 m = point::ericksen(tmp.mat(gd, p), dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) e.at(tensor_index(dim, i, j), p) = m[i][j];
  }
  return -1.0 * divergence(space.from_physical(e));
}

}  // namespace elh
