#pragma once

// One-dimensional derivative operators on the grid axes: finite differences
// (Fornberg weights; centred in the interior, shifted near non-periodic
// boundaries so the order is kept everywhere) and FFT differentiation on the
// periodic phi axis.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "photonloc/vec3.hpp"

namespace photonloc {

/// Fornberg's recursion: weights for the m-th derivative at z from sample
/// offsets x (in units of the spacing). Returns weights for derivative order m.
inline std::vector<double> fornberg_weights(double z, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<double>> c(x.size(), std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[static_cast<std::size_t>(i)] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      c2 *= c3;
      auto& ci = c[static_cast<std::size_t>(i)];
      auto& cj = c[static_cast<std::size_t>(j)];
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          ci[static_cast<std::size_t>(k)] =
              c1 * (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
                    c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
              c2;
        ci[0] = -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        cj[static_cast<std::size_t>(k)] =
            (c4 * cj[static_cast<std::size_t>(k)] - k * cj[static_cast<std::size_t>(k - 1)]) / c3;
      cj[0] = c4 * cj[0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = c[i][static_cast<std::size_t>(m)];
  return w;
}

/// First-derivative stencil table for an axis of n uniformly spaced samples.
class AxisStencil {
 public:
  AxisStencil(int n, double h, int order, bool periodic) : n_(n), periodic_(periodic) {
    if (order < 2 || order % 2 != 0) throw std::invalid_argument("stencil order must be even and >= 2");
    const int width = order + 1;
    const int half = order / 2;
    if (!periodic && n < width) throw std::invalid_argument("axis too short for stencil");
    first_.resize(static_cast<std::size_t>(n));
    weights_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int start = i - half;
      if (!periodic) start = std::clamp(start, 0, n - width);
      std::vector<double> offs(static_cast<std::size_t>(width));
      for (int s = 0; s < width; ++s) offs[static_cast<std::size_t>(s)] = static_cast<double>(start + s - i);
      auto w = fornberg_weights(0.0, offs, 1);
      for (auto& x : w) x /= h;
      first_[static_cast<std::size_t>(i)] = start;
      weights_[static_cast<std::size_t>(i)] = std::move(w);
    }
  }

  /// out[i*stride] = d/dx of in along the axis; `in` and `out` must not alias.
  void apply(const cplx* in, cplx* out, std::ptrdiff_t stride) const {
    for (int i = 0; i < n_; ++i) {
      const auto& w = weights_[static_cast<std::size_t>(i)];
      const int start = first_[static_cast<std::size_t>(i)];
      cplx acc{};
      for (std::size_t s = 0; s < w.size(); ++s) {
        int j = start + static_cast<int>(s);
        if (periodic_) j = ((j % n_) + n_) % n_;
        acc += w[s] * in[static_cast<std::ptrdiff_t>(j) * stride];
      }
      out[static_cast<std::ptrdiff_t>(i) * stride] = acc;
    }
  }

  int size() const { return n_; }

 private:
  int n_;
  bool periodic_;
  std::vector<int> first_;
  std::vector<std::vector<double>> weights_;
};

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Exact derivative of band-limited periodic samples; `lines` contiguous lines
/// of length n, in place. The Nyquist mode is discarded.
inline void spectral_derivative_lines(std::vector<cplx>& data, int n, std::size_t lines) {
  if (data.size() != static_cast<std::size_t>(n) * lines) throw std::invalid_argument("spectral derivative: size");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    int nn = n;
    fwd = fftw_plan_many_dft(1, &nn, static_cast<int>(lines), buf, nullptr, 1, n, buf, nullptr, 1, n,
                             FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_many_dft(1, &nn, static_cast<int>(lines), buf, nullptr, 1, n, buf, nullptr, 1, n,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  const double scale = 1.0 / n;
  for (std::size_t l = 0; l < lines; ++l) {
    cplx* line = data.data() + l * static_cast<std::size_t>(n);
    for (int q = 0; q < n; ++q) {
      int wave = q <= n / 2 ? q : q - n;
      if (2 * q == n) wave = 0;
      line[q] *= cplx(0.0, wave * scale);
    }
  }
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
}

}  // namespace photonloc
