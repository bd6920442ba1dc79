#pragma once

// Periodic lattice on the 2*pi torus in two or three dimensions.
//
// Storage is row-major with axis 0 slowest, so the flat index of point
// (i0, i1[, i2]) is ((i0 * n) + i1) * n + i2. Sample i along an axis sits at
// x = 2*pi*i/n. The same layout indexes Fourier modes, where index i carries
// the integer wavenumber i for i < n/2 and i - n otherwise; index n/2 is the
// Nyquist mode and is always kept at zero.

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace elh {

class Grid {
 public:
  Grid() = default;

  Grid(int dim, int n) {
    if (dim != 2 && dim != 3) {
      fail(ErrorKind::Precondition, "grid dimension must be 2 or 3, got " + std::to_string(dim));
    }
    if (n < 2 || n % 2 != 0) {
      fail(ErrorKind::Precondition, "points per axis must be even and >= 2, got " + std::to_string(n));
    }
    tables_ = cached_tables(dim, n);
  }

  int dim() const { return tables_->dim; }
  int n() const { return tables_->n; }
  std::size_t size() const { return tables_->size; }
  bool valid() const { return static_cast<bool>(tables_); }

  /// Integer wavevector of mode `p`; unused trailing axes are zero.
  const std::array<int, 3>& wavevector(std::size_t p) const { return tables_->k[p]; }
  double k2(std::size_t p) const { return tables_->k2[p]; }
  bool is_nyquist(std::size_t p) const { return tables_->nyquist[p] != 0; }
  /// Index of the mode -k.
  std::size_t negated(std::size_t p) const { return tables_->neg[p]; }

  /// Coordinates of sample `p`.
  Vec3 point(std::size_t p) const {
    Vec3 x{0, 0, 0};
    const int n = this->n();
    for (int a = dim() - 1; a >= 0; --a) {
      x[a] = kTwoPi * static_cast<double>(p % n) / n;
      p /= n;
    }
    return x;
  }

  /// (2*pi)^dim.
  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= kTwoPi;
    return v;
  }

  double spacing() const { return kTwoPi / n(); }

  /// Flat index of the mode with the given wavevector (components taken
  /// modulo n).
  std::size_t index_of(const std::array<int, 3>& kv) const {
    const int n = this->n();
    std::size_t p = 0;
    for (int a = 0; a < dim(); ++a) {
      const int i = ((kv[a] % n) + n) % n;
      p = p * n + static_cast<std::size_t>(i);
    }
    return p;
  }

  bool operator==(const Grid& o) const {
    return tables_ == o.tables_ || (valid() && o.valid() && dim() == o.dim() && n() == o.n());
  }

 private:
  struct Tables {
    int dim = 0;
    int n = 0;
    std::size_t size = 0;
    std::vector<std::array<int, 3>> k;
    std::vector<double> k2;
    std::vector<unsigned char> nyquist;
    std::vector<std::size_t> neg;
  };

  static std::shared_ptr<const Tables> build(int dim, int n) {
    auto t = std::make_shared<Tables>();
    t->dim = dim;
    t->n = n;
    std::size_t size = 1;
    for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(n);
    t->size = size;
    t->k.resize(size);
    t->k2.resize(size);
    t->nyquist.resize(size);
    t->neg.resize(size);
    for (std::size_t p = 0; p < size; ++p) {
      std::size_t rem = p;
      std::array<int, 3> kv{0, 0, 0};
      bool nyq = false;
      std::size_t q = 0, stride = 1;
      for (int a = dim - 1; a >= 0; --a) {
        const int i = static_cast<int>(rem % n);
        rem /= n;
        kv[a] = i < n / 2 ? i : i - n;
        nyq = nyq || (i == n / 2);
        q += static_cast<std::size_t>((n - i) % n) * stride;
        stride *= static_cast<std::size_t>(n);
      }
      t->k[p] = kv;
      t->k2[p] = double(kv[0]) * kv[0] + double(kv[1]) * kv[1] + double(kv[2]) * kv[2];
      t->nyquist[p] = nyq ? 1 : 0;
      t->neg[p] = q;
    }
    return t;
  }

  static std::shared_ptr<const Tables> cached_tables(int dim, int n) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const Tables>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, n}];
    if (!slot) slot = build(dim, n);
    return slot;
  }

  std::shared_ptr<const Tables> tables_;
};

/// Largest retained wavenumber per axis under the two-thirds rule: products of
/// two retained modes alias only onto discarded modes.
inline int two_thirds_cutoff(int n) { return (n - 1) / 3; }

}  // namespace elh
