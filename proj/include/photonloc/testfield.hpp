#pragma once

// Transverse probe fields: f_+(k,theta) e^{i nu phi} e_+ + f_-(k,theta) e^{i nu phi} e_-,
// optionally multiplied by C-infinity bump windows in k and theta.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "photonloc/field.hpp"
#include "photonloc/grid.hpp"
#include "photonloc/polarization.hpp"

namespace photonloc {

/// Bump exp(-beta s^2 / (1 - s^2)) on s in (-1, 1), zero outside; s maps
/// [lo, hi] affinely onto [-1, 1].
inline double bump(double x, double lo, double hi, double beta) {
  const double s = 2.0 * (x - lo) / (hi - lo) - 1.0;
  if (s <= -1.0 || s >= 1.0) return 0.0;
  return std::exp(-beta * s * s / (1.0 - s * s));
}

struct WindowSpec {
  bool enabled = false;
  double k_lo = 0.0, k_hi = 0.0;
  double theta_lo = 0.0, theta_hi = 0.0;
  // Larger beta flattens the edges; 8 keeps the k and theta derivatives
  // resolvable on coarse grids.
  double beta = 8.0;

  /// Window covering the grid interior, `margin` nodes in from each boundary.
  static WindowSpec inset(const SphericalGrid& g, int margin, double beta = 8.0) {
    WindowSpec w;
    w.enabled = true;
    w.k_lo = g.spec().k_min + margin * g.h_k();
    w.k_hi = g.spec().k_max - margin * g.h_k();
    w.theta_lo = g.spec().theta_cap + margin * g.h_theta();
    w.theta_hi = kPi - g.spec().theta_cap - margin * g.h_theta();
    w.beta = beta;
    return w;
  }

  void validate(const SphericalGrid& g) const {
    if (!enabled) return;
    if (!(k_hi > k_lo) || !(theta_hi > theta_lo) || !(beta > 0.0))
      throw std::invalid_argument("window: need k_lo < k_hi, theta_lo < theta_hi, beta > 0");
    const double cap = g.spec().theta_cap;
    if (theta_lo < cap || theta_hi > kPi - cap) throw std::invalid_argument("window: overlaps the polar exclusion caps");
    const double half = g.spec().stencil_order / 2;
    const double tol = 1e-12;
    if (k_lo < g.spec().k_min + half * g.h_k() - tol || k_hi > g.spec().k_max - half * g.h_k() + tol ||
        theta_lo < cap + half * g.h_theta() - tol || theta_hi > kPi - cap - half * g.h_theta() + tol)
      throw std::invalid_argument("window: support must stay stencil_order/2 nodes inside the k and theta boundaries");
  }

  double operator()(double k, double theta) const {
    if (!enabled) return 1.0;
    return bump(k, k_lo, k_hi, beta) * bump(theta, theta_lo, theta_hi, beta);
  }
};

using Profile = std::function<cplx(double k, double theta)>;

/// f_+ e^{i nu phi} e_+^(chi) + f_- e^{i nu phi} e_-^(chi), times the window.
/// Either profile may be empty (treated as zero).
inline VectorField make_test_field(const GridPtr& grid, const WindowSpec& window, const Profile& f_plus,
                                   const Profile& f_minus, int nu, const ChiConvention& chi) {
  window.validate(*grid);
  FieldInfo info;
  info.chi = chi.name();
  info.transverse = true;
  info.windowed = window.enabled;
  info.helicity = f_plus && f_minus ? HelicityContent::mixed
                  : f_plus          ? HelicityContent::plus
                  : f_minus         ? HelicityContent::minus
                                    : HelicityContent::unknown;
  return VectorField::from_function(
      grid,
      [&](const Node& nd) {
        const cplx az = std::exp(kI * static_cast<double>(nu) * nd.phi) * window(nd.k, nd.theta);
        CVec3 v{};
        if (f_plus) v = v + (az * f_plus(nd.k, nd.theta)) * helicity_basis(nd, 1, chi).v;
        if (f_minus) v = v + (az * f_minus(nd.k, nd.theta)) * helicity_basis(nd, -1, chi).v;
        return v;
      },
      info);
}

/// Deterministic uniform doubles in [0, 1) from a 64-bit Mersenne twister
/// (the raw bit stream is fixed by the standard; the conversion is explicit).
class ProbeRng {
 public:
  explicit ProbeRng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

enum class ProbeHelicity { both, plus, minus };

struct ProbeOptions {
  std::vector<int> nus{0, 1, 3};
  ProbeHelicity helicity = ProbeHelicity::both;
  WindowSpec window{};
};

/// Random smooth transverse probe: a sum over nu in `nus` and both helicities
/// of A P(k) Q(theta) e^{i nu phi} e_sigma^(chi), with complex A, quadratic P in
/// k about the band centre and Q = 1 + q1 cos(theta) + q2 cos^2(theta).
/// Reproducible from (seed, index).
inline VectorField random_probe(const GridPtr& grid, const ChiConvention& chi, std::uint64_t seed, int index,
                                const ProbeOptions& opt = {}) {
  opt.window.validate(*grid);
  ProbeRng rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index) + 1);
  struct Term {
    int nu, sigma;
    cplx amp;
    double p1, p2, q1, q2;
  };
  std::vector<Term> terms;
  for (int nu : opt.nus)
    for (int sigma : {1, -1}) {
      if ((sigma > 0 && opt.helicity == ProbeHelicity::minus) || (sigma < 0 && opt.helicity == ProbeHelicity::plus))
        continue;
      Term t{nu, sigma, {}, 0, 0, 0, 0};
      t.amp = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      t.p1 = rng.uniform(-0.5, 0.5);
      t.p2 = rng.uniform(-0.5, 0.5);
      t.q1 = rng.uniform(-0.5, 0.5);
      t.q2 = rng.uniform(-0.5, 0.5);
      terms.push_back(t);
    }
  const double kc = 0.5 * (grid->spec().k_min + grid->spec().k_max);
  FieldInfo info;
  info.chi = chi.name();
  info.transverse = true;
  info.windowed = opt.window.enabled;
  info.helicity = opt.helicity == ProbeHelicity::plus    ? HelicityContent::plus
                  : opt.helicity == ProbeHelicity::minus ? HelicityContent::minus
                                                         : HelicityContent::mixed;
  return VectorField::from_function(
      grid,
      [&](const Node& nd) {
        const double dk = nd.k - kc;
        const double w = opt.window(nd.k, nd.theta);
        const CVec3 ep = helicity_basis(nd, 1, chi).v, em = helicity_basis(nd, -1, chi).v;
        CVec3 v{};
        for (const auto& t : terms) {
          const double radial = (1.0 + t.p1 * dk + t.p2 * dk * dk) *
                                (1.0 + t.q1 * nd.cos_theta + t.q2 * nd.cos_theta * nd.cos_theta);
          const cplx c = t.amp * radial * w * std::exp(kI * static_cast<double>(t.nu) * nd.phi);
          v = v + c * (t.sigma > 0 ? ep : em);
        }
        return v;
      },
      info);
}

}  // namespace photonloc
