#pragma once

// Thin FFTW3 layer: cached in-place complex plans per (dim, n, direction).
// Work items (component pairs) are transformed independently, so the optional
// thread fan-out never changes results.

#include <fftw3.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>
#include <vector>

#include "field.hpp"

namespace elh {

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n, int sign) {
    const auto key = std::make_tuple(dim, n, sign);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    int dims[3] = {n, n, n};
    std::size_t size = 1;
    for (int a = 0; a < dim; ++a) size *= static_cast<std::size_t>(n);
    auto* scratch = fftw_alloc_complex(size);
    fftw_plan plan = fftw_plan_dft(dim, dims, scratch, scratch, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

/// Worker cap from ELH_THREADS (default 1).
inline int transform_threads() {
  static const int threads = [] {
    if (const char* env = std::getenv("ELH_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
    return 1;
  }();
  return threads;
}

template <class Fn>
void for_each_component(int ncomp, std::size_t points, Fn&& fn) {
  const int threads = std::min(transform_threads(), ncomp);
  // Small transforms are not worth a thread.
  if (threads <= 1 || points < (1u << 14)) {
    for (int c = 0; c < ncomp; ++c) fn(c);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int c = t; c < ncomp; c += threads) fn(c);
    });
  }
}

inline void execute(fftw_plan plan, Complex* data) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

}  // namespace detail

/// Real samples to Fourier coefficients. The zero mode equals the mean and
/// Nyquist modes are cleared. Components are transformed in pairs packed as
/// a + ib and separated through Hermitian symmetry.
inline SpectralField forward(const RealField& f) {
  const Grid& g = f.grid;
  const std::size_t size = g.size();
  SpectralField out(g, f.components);
  fftw_plan plan = detail::PlanCache::instance().get(g.dim(), g.n(), FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(size);
  const int pairs = (f.components + 1) / 2;
  detail::for_each_component(pairs, size, [&](int pr) {
    const int c0 = 2 * pr;
    const bool two = c0 + 1 < f.components;
    auto a = f.component(c0);
    std::vector<Complex> z(size);
    if (two) {
      auto b = f.component(c0 + 1);
      for (std::size_t p = 0; p < size; ++p) z[p] = Complex(a[p], b[p]);
    } else {
      for (std::size_t p = 0; p < size; ++p) z[p] = Complex(a[p], 0.0);
    }
    detail::execute(plan, z.data());
    auto da = out.component(c0);
    if (!two) {
      for (std::size_t p = 0; p < size; ++p) {
        da[p] = g.is_nyquist(p) ? Complex(0.0, 0.0) : z[p] * scale;
      }
      return;
    }
    auto db = out.component(c0 + 1);
    const double half = 0.5 * scale;
    for (std::size_t p = 0; p < size; ++p) {
      if (g.is_nyquist(p)) {
        da[p] = db[p] = Complex(0.0, 0.0);
        continue;
      }
      const Complex zp = z[p];
      const Complex zm = std::conj(z[g.negated(p)]);
      da[p] = (zp + zm) * half;
      const Complex diff = (zp - zm) * half;
      db[p] = Complex(diff.imag(), -diff.real());  // diff / i
    }
  });
  return out;
}

/// Fourier coefficients to real samples: the synthesis of the Hermitian part
/// of each component (the real part of the full synthesis).
inline RealField inverse(const SpectralField& f) {
  const Grid& g = f.grid;
  const std::size_t size = g.size();
  RealField out(g, f.components);
  fftw_plan plan = detail::PlanCache::instance().get(g.dim(), g.n(), FFTW_BACKWARD);
  const int pairs = (f.components + 1) / 2;
  detail::for_each_component(pairs, size, [&](int pr) {
    const int c0 = 2 * pr;
    const bool two = c0 + 1 < f.components;
    auto a = f.component(c0);
    std::vector<Complex> z(size);
    if (two) {
      auto b = f.component(c0 + 1);
      for (std::size_t p = 0; p < size; ++p) {
        const std::size_t q = g.negated(p);
        const Complex ha = 0.5 * (a[p] + std::conj(a[q]));
        const Complex hb = 0.5 * (b[p] + std::conj(b[q]));
        z[p] = ha + Complex(-hb.imag(), hb.real());  // ha + i hb
      }
    } else {
      std::copy(a.begin(), a.end(), z.begin());
    }
    detail::execute(plan, z.data());
    auto da = out.component(c0);
    for (std::size_t p = 0; p < size; ++p) da[p] = z[p].real();
    if (two) {
      auto db = out.component(c0 + 1);
      for (std::size_t p = 0; p < size; ++p) db[p] = z[p].imag();
    }
  });
  return out;
}

}  // namespace elh
