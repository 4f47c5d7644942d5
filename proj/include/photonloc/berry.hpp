#pragma once

// Berry connection of the helicity basis, its curvature, loop phases,
// parallel transport and the axis-rotation quantities of twisted bases.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photonloc/gradient.hpp"
#include "photonloc/polarization.hpp"
#include "photonloc/stencil.hpp"

namespace photonloc {

struct ConnectionSample {
  double k, theta, phi;
  Vec3 a;
  std::string chi;
};

inline Node make_node(double k, double theta, double phi) {
  return Node{k, theta, phi, std::sin(theta), std::cos(theta), std::sin(phi), std::cos(phi)};
}

inline ConnectionSample connection(double k, double theta, double phi, const ChiConvention& chi) {
  if (!(k > 0.0) || !(theta > 0.0 && theta < kPi)) throw std::invalid_argument("connection: node on a pole or at k = 0");
  return {k, theta, phi, connection_vector(make_node(k, theta, phi), chi), chi.name()};
}

/// Magnitude of a^(m) along e_phi: (cos(theta) - m) / (k sin(theta)).
inline double twisted_connection_magnitude(double theta, int m, double k) {
  return (std::cos(theta) - m) / (k * std::sin(theta));
}

/// i e_sigma^* . (u . d_k) e_sigma by finite differences of the basis along the
/// straight line k + s u (stencil of the given order, step h in k units).
/// Equal to sigma (a . u) up to the stencil error.
inline cplx berry_connection_from_basis(double k, double theta, double phi, int sigma, const ChiConvention& chi,
                                        const Vec3& u, double h = 1e-3, int order = 4) {
  require_sigma(sigma);
  const Vec3 k0 = make_node(k, theta, phi).k_vec();
  const int half = order / 2;
  std::vector<double> offs;
  for (int s = -half; s <= half; ++s) offs.push_back(s);
  const auto w = fornberg_weights(0.0, offs, 1);
  CVec3 d{};
  for (std::size_t s = 0; s < offs.size(); ++s) {
    const Vec3 p = k0 + (offs[s] * h) * u;
    const double r = norm(p);
    const double th = std::acos(std::clamp(p[2] / r, -1.0, 1.0));
    const double ph = std::atan2(p[1], p[0]);
    d = d + (w[s] / h) * helicity_basis(th, ph, sigma, chi).v;
  }
  return kI * cdot(helicity_basis(theta, phi, sigma, chi).v, d);
}

inline cplx berry_connection_from_basis(double k, double theta, double phi, int sigma, const ChiConvention& chi,
                                        int axis, double h = 1e-3, int order = 4) {
  return berry_connection_from_basis(k, theta, phi, sigma, chi, unit_axis(axis), h, order);
}

struct CurvatureReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::size_t nodes = 0;
};

/// Residual of curl_k a + e_k / k^2 on the grid, with the curl taken by the
/// grid derivative operators; nodes within stencil_order/2 of a k or theta
/// boundary are skipped.
inline CurvatureReport curvature_residual(const GridPtr& grid, const ChiConvention& chi) {
  std::array<ScalarField, 3> a{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
  for (std::size_t n = 0; n < grid->size(); ++n) {
    const Vec3 v = connection_vector(grid->node(n), chi);
    for (std::size_t i = 0; i < 3; ++i) a[i][n] = v[i];
  }
  std::array<std::array<ScalarField, 3>, 3> da;  // da[i][j] = d_j a_i
  for (std::size_t i = 0; i < 3; ++i) da[i] = cartesian_gradient(a[i]);
  const int margin = grid->spec().stencil_order / 2;
  CurvatureReport r;
  double sum = 0.0;
  for (std::size_t n = 0; n < grid->size(); ++n) {
    if (!grid->interior(n, margin)) continue;
    const Node nd = grid->node(n);
    const Vec3 curl{std::real(da[2][1][n] - da[1][2][n]), std::real(da[0][2][n] - da[2][0][n]),
                    std::real(da[1][0][n] - da[0][1][n])};
    const double res = norm(curl + (1.0 / (nd.k * nd.k)) * nd.e_k());
    r.max_residual = std::max(r.max_residual, res);
    sum += res;
    ++r.nodes;
  }
  r.mean_residual = r.nodes ? sum / static_cast<double>(r.nodes) : 0.0;
  return r;
}

/// Closed path k(s), s in [0, 1], with its tangent dk/ds.
struct BerryLoop {
  std::function<Vec3(double)> point;
  std::function<Vec3(double)> tangent;
  int n_samples = 256;
  std::string descriptor;
  // Parameter values where the tangent may jump (polyline vertices).
  std::vector<double> breaks;

  static BerryLoop latitude(double k, double theta, int n_samples) {
    if (!(k > 0.0)) throw std::invalid_argument("loop: k must be positive");
    if (!(theta > 0.0 && theta < kPi)) throw std::invalid_argument("loop: latitude circle must avoid the poles");
    BerryLoop l;
    const double st = std::sin(theta), ct = std::cos(theta);
    l.point = [=](double s) {
      const double p = kTwoPi * s;
      return Vec3{k * st * std::cos(p), k * st * std::sin(p), k * ct};
    };
    l.tangent = [=](double s) {
      const double p = kTwoPi * s;
      return Vec3{-kTwoPi * k * st * std::sin(p), kTwoPi * k * st * std::cos(p), 0.0};
    };
    l.n_samples = n_samples;
    l.descriptor = "latitude";
    return l;
  }

  /// Closed polyline; the last vertex must equal the first.
  static BerryLoop polyline(std::vector<Vec3> vertices, int samples_per_segment) {
    if (vertices.size() < 3) throw std::invalid_argument("loop: polyline needs at least 3 vertices");
    const std::size_t nseg = vertices.size() - 1;
    BerryLoop l;
    auto locate = [vertices, nseg](double s, std::size_t& seg, double& u) {
      const double x = std::clamp(s, 0.0, 1.0) * static_cast<double>(nseg);
      seg = std::min(static_cast<std::size_t>(x), nseg - 1);
      u = x - static_cast<double>(seg);
    };
    l.point = [vertices, locate](double s) {
      std::size_t seg;
      double u;
      locate(s, seg, u);
      return vertices[seg] + u * (vertices[seg + 1] - vertices[seg]);
    };
    l.tangent = [vertices, locate, nseg](double s) {
      std::size_t seg;
      double u;
      locate(s, seg, u);
      return static_cast<double>(nseg) * (vertices[seg + 1] - vertices[seg]);
    };
    l.n_samples = samples_per_segment * static_cast<int>(nseg);
    for (std::size_t i = 0; i <= nseg; ++i) l.breaks.push_back(static_cast<double>(i) / static_cast<double>(nseg));
    l.descriptor = "polyline";
    return l;
  }
};

struct LoopPhase {
  double raw;
  double reduced;  // raw mod 2 pi, in [0, 2 pi)
};

inline double reduce_phase(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

/// Distance between two phases on the circle.
inline double phase_distance(double a, double b) { return std::abs(std::remainder(a - b, kTwoPi)); }

/// -closed integral of a . dk by the composite trapezoid rule (per segment for
/// polylines).
inline LoopPhase loop_phase(const BerryLoop& loop, const ChiConvention& chi) {
  if (loop.n_samples < 2) throw std::invalid_argument("loop: need at least 2 samples");
  const Vec3 p0 = loop.point(0.0), p1 = loop.point(1.0);
  if (norm(p1 - p0) > 1e-12 * std::max(1.0, norm(p0))) throw std::invalid_argument("loop: path is not closed");
  auto integrand = [&](double s) {
    const Vec3 p = loop.point(s);
    const double r = norm(p);
    const double rho = std::hypot(p[0], p[1]);
    if (r == 0.0 || rho < 1e-12 * r) throw std::invalid_argument("loop: path touches a pole or k = 0");
    const Node nd = make_node(r, std::atan2(rho, p[2]), std::atan2(p[1], p[0]));
    return dot(connection_vector(nd, chi), loop.tangent(s));
  };
  double sum = 0.0;
  if (loop.breaks.empty()) {
    // Periodic trapezoid: endpoints coincide.
    for (int i = 0; i < loop.n_samples; ++i) sum += integrand(static_cast<double>(i) / loop.n_samples);
    sum /= loop.n_samples;
  } else {
    const std::size_t nseg = loop.breaks.size() - 1;
    const int per = std::max(1, loop.n_samples / static_cast<int>(nseg));
    for (std::size_t sgi = 0; sgi < nseg; ++sgi) {
      const double a = loop.breaks[sgi], b = loop.breaks[sgi + 1];
      const double h = (b - a) / per;
      // Evaluate slightly inside the segment ends so the tangent belongs to this segment.
      const double eps = 1e-13;
      double seg = 0.5 * (integrand(a + eps) + integrand(b - eps));
      for (int i = 1; i < per; ++i) seg += integrand(a + i * h);
      sum += seg * h;
    }
  }
  const double raw = -sum;
  return {raw, reduce_phase(raw)};
}

struct TransportTerms {
  double rotation;     // (a x k) . d xi
  double translation;  // a . dk, dk = d xi x k
  double residual;     // |rotation + translation|
};

inline TransportTerms parallel_transport_check(double k, double theta, double phi, const Vec3& dxi,
                                               const ChiConvention& chi) {
  const Node nd = make_node(k, theta, phi);
  const Vec3 a = connection_vector(nd, chi);
  const Vec3 kv = nd.k_vec();
  const double rot = dot(cross(a, kv), dxi);
  const double tr = dot(a, cross(dxi, kv));
  return {rot, tr, std::abs(rot + tr)};
}

/// [integral_{theta_i}^{theta_f} (cos t - m)/(k sin t) dt] cos(phi - phi_ref)
inline double axis_rotation_delta_chi(double theta_i, double theta_f, int m, double k, double phi, double phi_ref) {
  auto on_pole = [](double t) { return !(t > 0.0 && t < kPi); };
  if (on_pole(theta_i) || on_pole(theta_f)) throw std::invalid_argument("axis rotation: interval touches a pole");
  if (!(k > 0.0)) throw std::invalid_argument("axis rotation: k must be positive");
  if (theta_i == theta_f) return 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double t) { return twisted_connection_magnitude(t, m, k); }, theta_i, theta_f, 15, 1e-14);
  return integral * std::cos(phi - phi_ref);
}

/// -sigma d theta [e_theta (d a/d theta) cos(phi - phi_ref) + e_phi (a / sin theta) sin(phi - phi_ref)]
/// with a = (cos theta - m)/(k sin theta), as written for the anomalous shift.
inline Vec3 anomalous_shift(double k, double theta, double phi, double dtheta, double phi_ref, int m, int sigma) {
  require_sigma(sigma);
  const Node nd = make_node(k, theta, phi);
  const double st = nd.sin_theta;
  const double a = twisted_connection_magnitude(theta, m, k);
  const double da = (-1.0 + m * nd.cos_theta) / (k * st * st);
  const double pre = -sigma * dtheta;
  return (pre * da * std::cos(phi - phi_ref)) * nd.e_theta() + (pre * a / st * std::sin(phi - phi_ref)) * nd.e_phi();
}

}  // namespace photonloc
