#pragma once

// Fourier-multiplier operators, dealiased products and discrete Sobolev norms
// on the periodic grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fft.hpp"

namespace elh {

// ---------------------------------------------------------------------------
// Dealiasing rules
// ---------------------------------------------------------------------------

/// How nonlinear products are evaluated. TwoThirds keeps modes with
/// |k_a| <= (n-1)/3 and evaluates products on the native grid; Padded evaluates
/// on a grid enlarged so that products of up to `degree` band-limited factors
/// are alias free; None multiplies on the native grid with no truncation.
struct Dealias {
  enum class Kind { TwoThirds, Padded, None };
  Kind kind = Kind::TwoThirds;
  int degree = 2;

  static Dealias two_thirds() { return {Kind::TwoThirds, 2}; }
  static Dealias padded(int degree) { return {Kind::Padded, degree}; }
  static Dealias none() { return {Kind::None, 1}; }

  bool operator==(const Dealias&) const = default;
};

inline std::string to_string(const Dealias& d) {
  switch (d.kind) {
    case Dealias::Kind::TwoThirds: return "two_thirds";
    case Dealias::Kind::Padded: return "padded";
    case Dealias::Kind::None: return "none";
  }
  return "?";
}

/// Smallest even size m >= (degree + 1) * n / 2.
inline int padded_size(int n, int degree) {
  const int m = ((degree + 1) * n + 1) / 2;
  return m % 2 == 0 ? m : m + 1;
}

// ---------------------------------------------------------------------------
// Mode-set operations
// ---------------------------------------------------------------------------

/// Copies every mode representable on `target` (Nyquist excluded); the rest of
/// the target spectrum is zero. Used both to pad and to truncate.
inline SpectralField resample(const SpectralField& f, const Grid& target) {
  if (f.grid == target) return f;
  require(f.grid.dim() == target.dim(), "resample: dimension mismatch");
  SpectralField out(target, f.components);
  out.real_valued = f.real_valued;
  const Grid& g = f.grid;
  const int half = target.n() / 2;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (g.is_nyquist(p)) continue;
    const auto& k = g.wavevector(p);
    bool fits = true;
    for (int a = 0; a < g.dim(); ++a) fits = fits && (k[a] > -half && k[a] < half);
    if (!fits) continue;
    const std::size_t q = target.index_of(k);
    for (int c = 0; c < f.components; ++c) out.at(c, q) = f.at(c, p);
  }
  return out;
}

inline bool in_two_thirds_band(const Grid& g, std::size_t p) {
  const int kc = two_thirds_cutoff(g.n());
  const auto& k = g.wavevector(p);
  for (int a = 0; a < g.dim(); ++a) {
    if (k[a] > kc || k[a] < -kc) return false;
  }
  return true;
}

inline void apply_two_thirds(SpectralField& f) {
  const Grid& g = f.grid;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (in_two_thirds_band(g, p)) continue;
    for (int c = 0; c < f.components; ++c) f.at(c, p) = 0.0;
  }
}

/// Sharp Fourier cutoff: keeps modes with Euclidean |k| <= 1/eps.
inline SpectralField mollify(const SpectralField& f, double eps) {
  require(eps > 0.0, "mollify: eps must be > 0");
  const double radius = 1.0 / eps;
  const double r2 = radius * radius;
  SpectralField out = f;
  const Grid& g = f.grid;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (g.k2(p) <= r2) continue;
    for (int c = 0; c < f.components; ++c) out.at(c, p) = 0.0;
  }
  return out;
}

/// Largest |k|^2 carried by a field under the given rule.
inline double max_retained_k2(const Grid& g, const Dealias& rule) {
  if (rule.kind == Dealias::Kind::TwoThirds) {
    const double kc = two_thirds_cutoff(g.n());
    return g.dim() * kc * kc;
  }
  const double kc = g.n() / 2 - 1;
  return g.dim() * kc * kc;
}

// ---------------------------------------------------------------------------
// Differential operators
// ---------------------------------------------------------------------------

/// Appends one trailing derivative index: out(c, j) = d_j f_c.
inline SpectralField gradient(const SpectralField& f) {
  const Grid& g = f.grid;
  const int dim = g.dim();
  SpectralField out(g, f.components * dim);
  for (int c = 0; c < f.components; ++c) {
    auto src = f.component(c);
    for (int j = 0; j < dim; ++j) {
      auto dst = out.component(c * dim + j);
      for (std::size_t p = 0; p < g.size(); ++p) {
        dst[p] = Complex(0.0, g.wavevector(p)[j]) * src[p];
      }
    }
  }
  return out;
}

/// Single partial derivative d_axis of every component.
inline SpectralField partial(const SpectralField& f, int axis) {
  const Grid& g = f.grid;
  SpectralField out(g, f.components);
  for (int c = 0; c < f.components; ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (std::size_t p = 0; p < g.size(); ++p) {
      dst[p] = Complex(0.0, g.wavevector(p)[axis]) * src[p];
    }
  }
  return out;
}

enum class Contract { Last, First };

/// Divergence of a vector (-> scalar) or rank-2 tensor (-> vector). For
/// tensors, Contract::Last gives (div T)_i = d_j T(i, j) and Contract::First
/// gives (div T)_i = d_j T(j, i).
inline SpectralField divergence(const SpectralField& f, Contract which = Contract::Last) {
  const Grid& g = f.grid;
  const int dim = g.dim();
  if (f.components != dim && f.components != dim * dim) {
    fail(ErrorKind::Precondition, "divergence: expected a vector or rank-2 tensor field");
  }
  const int outer = f.components / dim;
  SpectralField out(g, outer);
  for (int i = 0; i < outer; ++i) {
    auto dst = out.component(i);
    for (int j = 0; j < dim; ++j) {
      const int c = (outer == 1) ? j
                    : (which == Contract::Last ? tensor_index(dim, i, j)
                                               : tensor_index(dim, j, i));
      auto src = f.component(c);
      for (std::size_t p = 0; p < g.size(); ++p) {
        dst[p] += Complex(0.0, g.wavevector(p)[j]) * src[p];
      }
    }
  }
  return out;
}

inline SpectralField laplacian(const SpectralField& f) {
  SpectralField out = f;
  const Grid& g = f.grid;
  for (int c = 0; c < f.components; ++c) {
    auto dst = out.component(c);
    for (std::size_t p = 0; p < g.size(); ++p) dst[p] *= -g.k2(p);
  }
  return out;
}

/// Orthogonal projection onto divergence-free fields; the mean is untouched.
inline SpectralField leray_project(const SpectralField& u) {
  const Grid& g = u.grid;
  const int dim = g.dim();
  if (u.components != dim) fail(ErrorKind::Precondition, "leray_project: expected a vector field");
  SpectralField out = u;
  for (std::size_t p = 1; p < g.size(); ++p) {
    const double k2 = g.k2(p);
    if (k2 == 0.0) continue;
    const auto& k = g.wavevector(p);
    Complex kdotu = 0.0;
    for (int j = 0; j < dim; ++j) kdotu += double(k[j]) * u.at(j, p);
    const Complex s = kdotu / k2;
    for (int j = 0; j < dim; ++j) out.at(j, p) -= double(k[j]) * s;
  }
  return out;
}

/// Multiplies every component by a per-mode real factor.
inline SpectralField apply_multiplier(const SpectralField& f,
                                      const std::function<double(std::size_t)>& m) {
  SpectralField out = f;
  const Grid& g = f.grid;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double s = m(p);
    for (int c = 0; c < f.components; ++c) out.at(c, p) *= s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

/// Physical-space workspace for nonlinear terms under a dealiasing rule.
class ProductSpace {
 public:
  ProductSpace(const Grid& grid, const Dealias& rule) : grid_(grid), rule_(rule) {
    physical_ = rule.kind == Dealias::Kind::Padded
                    ? Grid(grid.dim(), padded_size(grid.n(), rule.degree))
                    : grid;
  }

  const Grid& grid() const { return grid_; }
  const Grid& physical_grid() const { return physical_; }
  const Dealias& rule() const { return rule_; }

  RealField to_physical(const SpectralField& f) const {
    if (!(f.grid == grid_)) fail(ErrorKind::Precondition, "ProductSpace: grid mismatch");
    return inverse(resample(f, physical_));
  }

  SpectralField from_physical(const RealField& f) const {
    SpectralField s = resample(forward(f), grid_);
    if (rule_.kind == Dealias::Kind::TwoThirds) apply_two_thirds(s);
    return s;
  }

 private:
  Grid grid_;
  Grid physical_;
  Dealias rule_;
};

/// Pointwise product of scalar fields, computed on a grid padded for
/// `degree` factors and truncated back to the input grid.
inline SpectralField dealiased_product(std::span<const SpectralField> factors, int degree) {
  require(!factors.empty(), "dealiased_product: no factors");
  require(degree >= 2 && static_cast<std::size_t>(degree) == factors.size(),
          "dealiased_product: degree must equal the number of factors (>= 2)");
  const Grid& g = factors.front().grid;
  for (const auto& f : factors) {
    if (!(f.grid == g)) fail(ErrorKind::Precondition, "dealiased_product: incompatible grids");
    require(f.components == 1, "dealiased_product: scalar factors expected");
  }
  ProductSpace space(g, Dealias::padded(degree));
  RealField acc = space.to_physical(factors.front());
  for (std::size_t i = 1; i < factors.size(); ++i) {
    RealField next = space.to_physical(factors[i]);
    for (std::size_t p = 0; p < acc.data.size(); ++p) acc.data[p] *= next.data[p];
  }
  return space.from_physical(acc);
}

// ---------------------------------------------------------------------------
// Norms and inner products
// ---------------------------------------------------------------------------

/// L^2 inner product over the box, summed over components (Parseval).
inline double inner(const SpectralField& a, const SpectralField& b) {
  check_same_layout(a, b, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    s += a.data[i].real() * b.data[i].real() + a.data[i].imag() * b.data[i].imag();
  }
  return s * a.grid.volume();
}

inline double l2_norm_sq(const SpectralField& a) { return inner(a, a); }

/// Real-space L^2 inner product by the rectangle rule.
inline double inner(const RealField& a, const RealField& b) {
  require(a.grid == b.grid && a.components == b.components, "inner: layout mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
  return s * a.grid.volume() / static_cast<double>(a.grid.size());
}

/// Sum over modes of weight(|k|^2) * sum_c |f_c(k)|^2, times the box volume.
inline double weighted_norm_sq(const SpectralField& f, const std::function<double(double)>& weight) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    double m = 0.0;
    for (int c = 0; c < f.components; ++c) m += std::norm(f.at(c, p));
    if (m != 0.0) s += weight(g.k2(p)) * m;
  }
  return s * g.volume();
}

/// Bessel-potential Sobolev norm with weight (1 + |k|^2)^s.
inline double hs_norm(const SpectralField& f, double s) {
  require(s >= 0.0, "hs_norm: s must be >= 0");
  return std::sqrt(weighted_norm_sq(f, [s](double k2) { return std::pow(1.0 + k2, s); }));
}

/// Integer-order Sobolev norms as sums of full derivative arrays,
/// |f|^2 = sum_{k=lo}^{s} |grad^k f|^2_{L^2}; lo = 0 gives H^s and lo = 1 the
/// homogeneous part.
inline double derivative_sum_weight(double k2, int lo, int s) {
  double w = 0.0, pw = 1.0;
  for (int k = 0; k <= s; ++k) {
    if (k >= lo) w += pw;
    pw *= k2;
  }
  return w;
}

inline double sobolev_sq(const SpectralField& f, int s, int lo = 0) {
  return weighted_norm_sq(f, [=](double k2) { return derivative_sum_weight(k2, lo, s); });
}

inline double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.data) m = std::max(m, std::abs(v));
  return m;
}

inline bool all_finite(const SpectralField& f) {
  for (const auto& v : f.data) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

}  // namespace elh
