#pragma once

// Cartesian k-space derivatives by the chain rule
//   d/dk_x = sin t cos p d_k + (cos t cos p / k) d_t - (sin p / (k sin t)) d_p
//   d/dk_y = sin t sin p d_k + (cos t sin p / k) d_t + (cos p / (k sin t)) d_p
//   d/dk_z = cos t d_k       - (sin t / k) d_t

#include <array>
#include <vector>

#include "photonloc/field.hpp"
#include "photonloc/grid.hpp"
#include "photonloc/stencil.hpp"

namespace photonloc {

struct SphericalPartials {
  std::vector<cplx> d_k, d_theta, d_phi;
};

inline SphericalPartials spherical_partials(const SphericalGrid& g, const std::vector<cplx>& f) {
  if (f.size() != g.size()) throw std::invalid_argument("gradient: field does not match grid shape");
  const int nk = g.n_k(), nt = g.n_theta(), np = g.n_phi();
  const int order = g.spec().stencil_order;
  SphericalPartials p;
  p.d_k.assign(f.size(), cplx{});
  p.d_theta.assign(f.size(), cplx{});

  const AxisStencil sk(nk, g.h_k(), order, false);
  const auto stride_k = static_cast<std::ptrdiff_t>(nt) * np;
  for (int it = 0; it < nt; ++it)
    for (int ip = 0; ip < np; ++ip) {
      const std::size_t base = g.index(0, it, ip);
      sk.apply(f.data() + base, p.d_k.data() + base, stride_k);
    }

  const AxisStencil st(nt, g.h_theta(), order, false);
  for (int ik = 0; ik < nk; ++ik)
    for (int ip = 0; ip < np; ++ip) {
      const std::size_t base = g.index(ik, 0, ip);
      st.apply(f.data() + base, p.d_theta.data() + base, np);
    }

  if (g.spec().phi_derivative == PhiDerivative::spectral) {
    p.d_phi = f;
    spectral_derivative_lines(p.d_phi, np, static_cast<std::size_t>(nk) * static_cast<std::size_t>(nt));
  } else {
    p.d_phi.assign(f.size(), cplx{});
    const AxisStencil sp(np, g.h_phi(), order, true);
    for (std::size_t line = 0; line < static_cast<std::size_t>(nk) * static_cast<std::size_t>(nt); ++line) {
      const std::size_t base = line * static_cast<std::size_t>(np);
      sp.apply(f.data() + base, p.d_phi.data() + base, 1);
    }
  }
  return p;
}

/// Chain-rule coefficients c[j] = (coef of d_k, d_theta, d_phi) for d/dk_j at a node.
inline std::array<Vec3, 3> chain_rule_coefficients(const Node& nd) {
  const double st = nd.sin_theta, ct = nd.cos_theta, sp = nd.sin_phi, cp = nd.cos_phi, k = nd.k;
  return {Vec3{st * cp, ct * cp / k, -sp / (k * st)}, Vec3{st * sp, ct * sp / k, cp / (k * st)},
          Vec3{ct, -st / k, 0.0}};
}

inline std::array<std::vector<cplx>, 3> cartesian_gradient(const SphericalGrid& g, const std::vector<cplx>& f) {
  const SphericalPartials p = spherical_partials(g, f);
  std::array<std::vector<cplx>, 3> out;
  for (auto& o : out) o.resize(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) {
    const auto c = chain_rule_coefficients(g.node(n));
    for (std::size_t j = 0; j < 3; ++j) out[j][n] = c[j][0] * p.d_k[n] + c[j][1] * p.d_theta[n] + c[j][2] * p.d_phi[n];
  }
  return out;
}

inline std::array<ScalarField, 3> cartesian_gradient(const ScalarField& f) {
  auto parts = cartesian_gradient(*f.grid(), f.data());
  return {ScalarField(f.grid(), std::move(parts[0])), ScalarField(f.grid(), std::move(parts[1])),
          ScalarField(f.grid(), std::move(parts[2]))};
}

/// result[j] = d f / d k_j, a vector field for each Cartesian direction j.
inline std::array<VectorField, 3> cartesian_gradient(const VectorField& f) {
  std::array<VectorField, 3> out{VectorField(f.grid()), VectorField(f.grid()), VectorField(f.grid())};
  for (int c = 0; c < 3; ++c) {
    auto parts = cartesian_gradient(*f.grid(), f.component(c));
    for (int j = 0; j < 3; ++j) out[static_cast<std::size_t>(j)].component(c) = std::move(parts[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace photonloc
