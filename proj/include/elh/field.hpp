#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "grid.hpp"

namespace elh {

using Complex = std::complex<double>;

/// Component layout used throughout: scalar fields have one component, vector
/// fields `dim`, and rank-2 tensors `dim * dim` with T(i, j) at i * dim + j.
/// Higher derivative arrays append one trailing index per derivative.
inline int tensor_index(int dim, int i, int j) { return i * dim + j; }

/// Real samples of a (possibly multi-component) field on a grid.
struct RealField {
  Grid grid;
  int components = 0;
  std::vector<double> data;

  RealField() = default;
  RealField(const Grid& g, int ncomp)
      : grid(g), components(ncomp), data(g.size() * static_cast<std::size_t>(ncomp), 0.0) {}

  std::span<double> component(int c) {
    return {data.data() + static_cast<std::size_t>(c) * grid.size(), grid.size()};
  }
  std::span<const double> component(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * grid.size(), grid.size()};
  }
  double& at(int c, std::size_t p) { return data[static_cast<std::size_t>(c) * grid.size() + p]; }
  double at(int c, std::size_t p) const {
    return data[static_cast<std::size_t>(c) * grid.size() + p];
  }
};

/// Fourier coefficients, normalized so that the zero mode is the field mean:
/// f(x) = sum_k c_k exp(i k.x).
struct SpectralField {
  Grid grid;
  int components = 0;
  std::vector<Complex> data;
  /// Set when the coefficients describe a real-valued field (Hermitian
  /// symmetric). All fields produced by the solver are real.
  bool real_valued = true;

  SpectralField() = default;
  SpectralField(const Grid& g, int ncomp)
      : grid(g), components(ncomp), data(g.size() * static_cast<std::size_t>(ncomp)) {}

  std::span<Complex> component(int c) {
    return {data.data() + static_cast<std::size_t>(c) * grid.size(), grid.size()};
  }
  std::span<const Complex> component(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * grid.size(), grid.size()};
  }
  Complex& at(int c, std::size_t p) { return data[static_cast<std::size_t>(c) * grid.size() + p]; }
  const Complex& at(int c, std::size_t p) const {
    return data[static_cast<std::size_t>(c) * grid.size() + p];
  }

  SpectralField& operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
    return *this;
  }
  SpectralField& operator*=(double s) {
    for (auto& v : data) v *= s;
    return *this;
  }
};

inline SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
inline SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
inline SpectralField operator*(double s, SpectralField a) { return a *= s; }

/// a + s * b
inline SpectralField axpy(const SpectralField& a, double s, const SpectralField& b) {
  SpectralField out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += s * b.data[i];
  return out;
}

inline void check_same_layout(const SpectralField& a, const SpectralField& b, const char* what) {
  if (!(a.grid == b.grid) || a.components != b.components) {
    fail(ErrorKind::Precondition, std::string(what) + ": grid or component mismatch");
  }
}

}  // namespace elh
