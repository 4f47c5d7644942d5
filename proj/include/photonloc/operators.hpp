#pragma once

// Generators and position operators as linear maps on vector fields.
//
// Spin:      (S_i)_{jl} = -i eps_{ijl},  so  S_i f = i e_i x f
// Helicity:  sigma f = e_k . S f = i e_k x f
// Position:  x_j f = i d_j f - i alpha (k_j/k^2) f + (1/k^2)(k x S)_j f - a_j sigma f
// Pryce:     xP_j f = i d_j f - (i/2)(k_j/k^2) f + (1/k^2)(k x S)_j f
// Rotation:  J_i f = -i eps_{iab} k_a d_b f + S_i f
// Boost:     K_i f = i k d_i f + (i/2)(k_i/k) f - i alpha (k_i/k) f + (e_k x S)_i f
// Little group: L1 = J2 + K1,  L2 = -J1 + K2

#include <array>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "photonloc/field.hpp"
#include "photonloc/gradient.hpp"
#include "photonloc/polarization.hpp"

namespace photonloc {

using Triple = std::array<VectorField, 3>;

namespace nodewise {

inline CVec3 spin(int i, const CVec3& f) { return kI * cross(to_complex(unit_axis(i)), f); }

/// Explicit matrix product sum_l (S_i)_{jl} f_l.
inline CVec3 spin_matrix(int i, const CVec3& f) {
  CVec3 out{};
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) out[static_cast<std::size_t>(j)] += -kI * static_cast<double>(levi_civita(i, j, l)) * f[static_cast<std::size_t>(l)];
  return out;
}

inline CVec3 helicity(const Node& nd, const CVec3& f) { return kI * cross(to_complex(nd.e_k()), f); }

/// (v x S)_j f = i (v f_j - e_j (v . f)), for any real vector v.
inline CVec3 v_cross_spin(int j, const Vec3& v, const CVec3& f) {
  const cplx vf = dot(to_complex(v), f);
  CVec3 out = f[static_cast<std::size_t>(j)] * to_complex(v);
  out[static_cast<std::size_t>(j)] -= vf;
  return kI * out;
}

/// (v x S)_j f = sum_{a,b} eps_{jab} v_a S_b f, evaluated with the spin matrices.
inline CVec3 v_cross_spin_matrix(int j, const Vec3& v, const CVec3& f) {
  CVec3 out{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int e = levi_civita(j, a, b);
      if (e == 0) continue;
      out = out + (static_cast<double>(e) * v[static_cast<std::size_t>(a)]) * spin_matrix(b, f);
    }
  return out;
}

/// g = a x k + e_k, so that J^(0,a)_i = g_i sigma.
inline Vec3 intrinsic_rotation_vector(const Node& nd, const ChiConvention& chi) {
  return cross(connection_vector(nd, chi), nd.k_vec()) + nd.e_k();
}

}  // namespace nodewise

/// D = R_3(phi) R_2(theta) R_3(chi). Real orthogonal; maps (e_1 + i sigma e_2)/sqrt 2
/// to the helicity vector e_sigma^(chi).
inline Mat3 rotation_D(double theta, double phi, double chi) {
  return matmul(rotation_z(phi), matmul(rotation_y(theta), rotation_z(chi)));
}

inline VectorField spin_apply(int i, const VectorField& f) {
  return map_nodes(f, [i](const Node&, const CVec3& v) { return nodewise::spin(i, v); });
}

inline VectorField helicity_apply(const VectorField& f) {
  return map_nodes(f, [](const Node& nd, const CVec3& v) { return nodewise::helicity(nd, v); });
}

inline VectorField momentum_apply(int i, const VectorField& f) {
  return multiply(f, [i](const Node& nd) { return nd.k_vec()[static_cast<std::size_t>(i)]; });
}

inline VectorField energy_apply(const VectorField& f) {
  return multiply(f, [](const Node& nd) { return nd.k; });
}

/// Multiplication by k_i / k.
inline VectorField direction_apply(int i, const VectorField& f) {
  return multiply(f, [i](const Node& nd) { return nd.e_k()[static_cast<std::size_t>(i)]; });
}

namespace detail {

inline Triple empty_triple(const VectorField& f) {
  return {VectorField(f.grid()), VectorField(f.grid()), VectorField(f.grid())};
}

/// Shared kernel of the position and Pryce operators; include_connection
/// toggles the -a_j sigma term.
inline Triple position_kernel(const VectorField& f, double alpha, const ChiConvention* chi) {
  const Triple d = cartesian_gradient(f);
  Triple out = empty_triple(f);
  const SphericalGrid& g = *f.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Node nd = g.node(n);
    const CVec3 v = f.at(n);
    const Vec3 kv = nd.k_vec();
    const double k2 = nd.k * nd.k;
    CVec3 sv{};
    Vec3 a{};
    if (chi) {
      sv = nodewise::helicity(nd, v);
      a = connection_vector(nd, *chi);
    }
    for (int j = 0; j < 3; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      CVec3 r = kI * d[uj].at(n);
      r = r - (kI * (alpha * kv[uj] / k2)) * v;
      r = r + (1.0 / k2) * nodewise::v_cross_spin(j, kv, v);
      if (chi) r = r - a[uj] * sv;
      out[uj].set(n, r);
    }
  }
  return out;
}

}  // namespace detail

/// Position operator with commuting components; returns (x_1 f, x_2 f, x_3 f).
inline Triple position_apply(const VectorField& f, double alpha, const ChiConvention& chi) {
  return detail::position_kernel(f, alpha, &chi);
}

/// Pryce operator (alpha = 1/2, no connection term).
inline Triple pryce_apply(const VectorField& f) { return detail::position_kernel(f, 0.5, nullptr); }

/// Position operator by conjugation: x_j f = k^alpha D i d_j (D^T k^-alpha f).
inline Triple position_conjugated_apply(const VectorField& f, double alpha, const ChiConvention& chi) {
  const SphericalGrid& g = *f.grid();
  std::vector<Mat3> dmat(g.size());
  VectorField body(f.grid());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Node nd = g.node(n);
    dmat[n] = rotation_D(nd.theta, nd.phi, chi.sample(nd.theta, nd.phi).value);
    body.set(n, std::pow(nd.k, -alpha) * matvec(transpose(dmat[n]), f.at(n)));
  }
  const Triple d = cartesian_gradient(body);
  Triple out = detail::empty_triple(f);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double ka = std::pow(g.node(n).k, alpha);
    for (std::size_t j = 0; j < 3; ++j) out[j].set(n, (kI * ka) * matvec(dmat[n], d[j].at(n)));
  }
  return out;
}

/// (J_1 f, J_2 f, J_3 f)
inline Triple angular_momentum_apply(const VectorField& f) {
  const Triple d = cartesian_gradient(f);
  Triple out = detail::empty_triple(f);
  const SphericalGrid& g = *f.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 kv = g.node(n).k_vec();
    const CVec3 v = f.at(n);
    const std::array<CVec3, 3> dv{d[0].at(n), d[1].at(n), d[2].at(n)};
    for (int i = 0; i < 3; ++i) {
      CVec3 r = nodewise::spin(i, v);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int e = levi_civita(i, a, b);
          if (e == 0) continue;
          r = r - (kI * (e * kv[static_cast<std::size_t>(a)])) * dv[static_cast<std::size_t>(b)];
        }
      out[static_cast<std::size_t>(i)].set(n, r);
    }
  }
  return out;
}

/// (K_1 f, K_2 f, K_3 f) in the frame fixed by alpha (alpha = 0 is the Foldy form).
inline Triple boost_apply(const VectorField& f, double alpha) {
  const Triple d = cartesian_gradient(f);
  Triple out = detail::empty_triple(f);
  const SphericalGrid& g = *f.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Node nd = g.node(n);
    const Vec3 ek = nd.e_k();
    const CVec3 v = f.at(n);
    for (int i = 0; i < 3; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      CVec3 r = (kI * nd.k) * d[ui].at(n);
      r = r + (kI * ((0.5 - alpha) * ek[ui])) * v;
      r = r + nodewise::v_cross_spin(i, ek, v);
      out[ui].set(n, r);
    }
  }
  return out;
}

/// (L_1 f, L_2 f) = ((J_2 + K_1) f, (-J_1 + K_2) f)
inline std::array<VectorField, 2> little_group_apply(const VectorField& f, double alpha) {
  const Triple j = angular_momentum_apply(f);
  const Triple k = boost_apply(f, alpha);
  return {j[1] + k[0], k[1] - j[0]};
}

/// J^(0,a)_i f = g_i sigma f with g = a x k + e_k.
inline Triple intrinsic_rotation_apply(const VectorField& f, const ChiConvention& chi) {
  Triple out = detail::empty_triple(f);
  const SphericalGrid& g = *f.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Node nd = g.node(n);
    const CVec3 sv = nodewise::helicity(nd, f.at(n));
    const Vec3 gv = nodewise::intrinsic_rotation_vector(nd, chi);
    for (std::size_t i = 0; i < 3; ++i) out[i].set(n, gv[i] * sv);
  }
  return out;
}

/// K^(0,a)_i f = k a_i sigma f.
inline Triple intrinsic_boost_apply(const VectorField& f, const ChiConvention& chi) {
  Triple out = detail::empty_triple(f);
  const SphericalGrid& g = *f.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Node nd = g.node(n);
    const CVec3 sv = nodewise::helicity(nd, f.at(n));
    const Vec3 a = connection_vector(nd, chi);
    for (std::size_t i = 0; i < 3; ++i) out[i].set(n, (nd.k * a[i]) * sv);
  }
  return out;
}

/// sigma (d_j w_i) f, with w a real vector function of the node whose
/// derivative is taken numerically on the grid.
template <class F>
VectorField derivative_intrinsic_apply(const VectorField& f, F&& w, int i, int j) {
  const GridPtr& grid = f.grid();
  ScalarField wi(grid);
  for (std::size_t n = 0; n < grid->size(); ++n) wi[n] = w(grid->node(n))[static_cast<std::size_t>(i)];
  const auto dw = cartesian_gradient(wi);
  const auto& s = dw[static_cast<std::size_t>(j)];
  VectorField out = helicity_apply(f);
  for (int c = 0; c < 3; ++c) {
    auto& comp = out.component(c);
    for (std::size_t n = 0; n < comp.size(); ++n) comp[n] *= s[n];
  }
  return out;
}

struct VelocityResult {
  Triple commutator;  // [x_j, H] f / i
  Triple direct;      // (k_j / k) f
};

inline VelocityResult velocity_apply(const VectorField& f, double alpha, const ChiConvention& chi) {
  const Triple xhf = position_apply(energy_apply(f), alpha, chi);
  const Triple xf = position_apply(f, alpha, chi);
  VelocityResult r{detail::empty_triple(f), detail::empty_triple(f)};
  for (int j = 0; j < 3; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    r.commutator[uj] = (-kI) * (xhf[uj] - energy_apply(xf[uj]));
    r.direct[uj] = direction_apply(j, f);
  }
  return r;
}

}  // namespace photonloc
