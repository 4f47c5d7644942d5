#pragma once

// Configuration-space synthesis of momentum-space fields by direct quadrature
// over the spherical grid, and localization metrics of radial profiles.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "photonloc/field.hpp"
#include "photonloc/verify.hpp"

namespace photonloc {

enum class MeasureKind { trivial, invariant };

inline std::string to_string(MeasureKind m) { return m == MeasureKind::trivial ? "trivial" : "invariant"; }

inline MeasureKind parse_measure(const std::string& s) {
  if (s == "trivial") return MeasureKind::trivial;
  if (s == "invariant") return MeasureKind::invariant;
  throw std::invalid_argument("measure must be trivial or invariant");
}

struct XProfile {
  std::vector<Vec3> points;
  std::vector<CVec3> values;
  std::vector<double> intensity;  // |F|^2
  MeasureKind measure = MeasureKind::trivial;
  double t = 0.0;
};

/// F(x) = sum_n w_n f(k_n) exp(i k_n . x) exp(-i k_n t), with w = k^2 sin(theta) h_k h_theta h_phi
/// (trivial measure) or k sin(theta) h_k h_theta h_phi (invariant measure).
inline XProfile synthesize(const VectorField& f, MeasureKind measure, const std::vector<Vec3>& samples, double t = 0.0) {
  if (samples.empty()) throw std::invalid_argument("synthesize: empty sample list");
  const SphericalGrid& g = *f.grid();
  std::vector<CVec3> amp(g.size());
  std::vector<Vec3> kv(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Node nd = g.node(n);
    double w = g.weight(n);
    if (measure == MeasureKind::invariant) w /= nd.k;
    amp[n] = (w * std::exp(-kI * (nd.k * t))) * f.at(n);
    kv[n] = nd.k_vec();
  }
  XProfile p;
  p.points = samples;
  p.measure = measure;
  p.t = t;
  p.values.reserve(samples.size());
  for (const Vec3& x : samples) {
    CVec3 acc{};
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double ph = dot(kv[n], x);
      const cplx e(std::cos(ph), std::sin(ph));
      acc[0] += e * amp[n][0];
      acc[1] += e * amp[n][1];
      acc[2] += e * amp[n][2];
    }
    p.values.push_back(acc);
    p.intensity.push_back(std::pow(norm(acc), 2));
  }
  return p;
}

/// n + 1 points center + r u for r in [0, r_max].
inline std::vector<Vec3> radial_sweep(const Vec3& center, const Vec3& direction, double r_max, int n) {
  if (n < 2 || !(r_max > 0.0)) throw std::invalid_argument("sweep: need n >= 2 and r_max > 0");
  const double len = norm(direction);
  if (!(len > 0.0)) throw std::invalid_argument("sweep: zero direction");
  std::vector<Vec3> v;
  for (int i = 0; i <= n; ++i) v.push_back(center + (r_max * i / n / len) * direction);
  return v;
}

/// Largest distance from the origin along e_3 (axial) or in the e_1-e_2 plane
/// (radial) at which the grid quadrature of exp(i k . x) stays free of aliasing
/// on every axis: the phase step between neighbouring nodes must stay below pi.
inline double alias_free_radius(const SphericalGrid& g, bool axial) {
  const double kmax = g.spec().k_max;
  double r = std::min(kPi / g.h_k(), kPi / (kmax * g.h_theta()));
  if (!axial) r = std::min(r, kPi / (kmax * g.h_phi()));
  return r;
}

/// n + 1 points on the straight line center + s u, s in [-half, half].
inline std::vector<Vec3> line_sweep(const Vec3& center, const Vec3& direction, double half, int n) {
  if (n < 2 || !(half > 0.0)) throw std::invalid_argument("sweep: need n >= 2 and half > 0");
  const double len = norm(direction);
  std::vector<Vec3> v;
  for (int i = 0; i <= n; ++i) v.push_back(center + ((-half + 2.0 * half * i / n) / len) * direction);
  return v;
}

struct LocalizationMetrics {
  Vec3 peak{};
  double peak_distance = 0.0;  // distance of the peak from the supplied center
  double peak_intensity = 0.0;
  double fwhm = 0.0;           // full width at half maximum of |F|^2
  double tail_exponent = 0.0;  // |F|^2 envelope ~ r^-tail_exponent in the far zone
  double tail_fraction = 0.0;  // far-zone share of the radially weighted intensity
  double far_zone_start = 0.0;
};

/// Metrics of a radial profile: samples ordered by increasing distance from
/// `center`. The far zone starts at `far_factor` x FWHM from the centre.
inline LocalizationMetrics localization_metrics(const XProfile& p, const Vec3& center, double far_factor = 3.0) {
  const std::size_t n = p.intensity.size();
  if (n < 3) throw std::invalid_argument("localization: profile too short");
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = norm(p.points[i] - center);
  const auto imax = static_cast<std::size_t>(std::max_element(p.intensity.begin(), p.intensity.end()) - p.intensity.begin());
  const double pk = p.intensity[imax];
  if (!(pk > 0.0) || imax == n - 1) throw std::runtime_error("localization: profile has no detectable peak");
  LocalizationMetrics m;
  m.peak = p.points[imax];
  m.peak_distance = r[imax];
  m.peak_intensity = pk;

  // Half-maximum crossings on either side of the peak (the inner side may be
  // the sweep origin when the peak sits there; the profile is then mirrored).
  auto crossing = [&](std::size_t from, int step) -> double {
    std::size_t i = from;
    while (true) {
      const std::size_t j = step > 0 ? i + 1 : i - 1;
      if ((step > 0 && j >= n) || (step < 0 && i == 0)) return -1.0;
      if (p.intensity[j] <= 0.5 * pk) {
        const double t = (p.intensity[i] - 0.5 * pk) / (p.intensity[i] - p.intensity[j]);
        return r[i] + t * (r[j] - r[i]);
      }
      i = j;
    }
  };
  const double outer = crossing(imax, 1);
  if (outer < 0.0) throw std::runtime_error("localization: no half-maximum crossing beyond the peak");
  const double inner = imax == 0 ? -outer : crossing(imax, -1);
  m.fwhm = inner < 0.0 && imax != 0 ? 2.0 * (outer - r[imax]) : outer - inner;
  m.far_zone_start = r[imax] + far_factor * m.fwhm;

  std::vector<double> lx, ly;
  double total = 0.0, far = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = r[i] * r[i] * p.intensity[i] / pk;
    total += w;
    if (r[i] >= m.far_zone_start) far += w;
    if (i > 0 && i + 1 < n && r[i] >= m.far_zone_start && p.intensity[i] >= p.intensity[i - 1] &&
        p.intensity[i] >= p.intensity[i + 1] && p.intensity[i] > 0.0) {
      lx.push_back(std::log(r[i]));
      ly.push_back(std::log(p.intensity[i] / pk));
    }
  }
  m.tail_fraction = total > 0.0 ? far / total : 0.0;
  if (lx.size() >= 2) m.tail_exponent = -fit_line(lx, ly).slope;
  return m;
}

}  // namespace photonloc
