#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "photonloc/operators.hpp"
#include "photonloc/testfield.hpp"

namespace support {

using namespace photonloc;

inline GridSpec coarse_spec() {
  GridSpec s;
  s.n_k = 13;
  s.n_theta = 25;
  s.n_phi = 24;
  return s;
}

/// Window two coarse nodes inside the boundaries; the same physical window is
/// used on refined grids so residuals are comparable.
inline WindowSpec fixed_window() { return WindowSpec::inset(*build_grid(coarse_spec()), 2); }

inline std::vector<GridPtr> grid_levels(int n = 2) {
  std::vector<GridPtr> out;
  GridSpec s = coarse_spec();
  for (int i = 0; i < n; ++i, s = s.refined()) out.push_back(build_grid(s));
  return out;
}

/// Random probe as used by the verification suites (no window).
inline VectorField probe(const GridPtr& g, const ChiConvention& chi, std::uint64_t seed = 7, int index = 0,
                         ProbeHelicity hel = ProbeHelicity::both) {
  ProbeOptions o;
  o.helicity = hel;
  return random_probe(g, chi, seed, index, o);
}

/// Random probe multiplied by fixed_window(); vanishes near every k and theta boundary.
inline VectorField windowed_probe(const GridPtr& g, const ChiConvention& chi, std::uint64_t seed = 7, int index = 0) {
  ProbeOptions o;
  o.window = fixed_window();
  return random_probe(g, chi, seed, index, o);
}

inline double rel_diff(const VectorField& a, const VectorField& b) {
  const double den = std::max(l2_norm(a), l2_norm(b));
  return den > 0.0 ? l2_norm(a - b) / den : 0.0;
}

/// Residual on each grid level, coarse to fine.
inline std::vector<double> on_levels(const std::function<double(const GridPtr&)>& r, int n = 2) {
  std::vector<double> out;
  for (const auto& g : grid_levels(n)) out.push_back(r(g));
  return out;
}

inline double observed_order(const std::vector<double>& r) { return std::log2(r[r.size() - 2] / r.back()); }

}  // namespace support
