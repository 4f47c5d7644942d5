#include <gtest/gtest.h>

#include "photonloc/polarization.hpp"
#include "photonloc/xspace.hpp"

using namespace photonloc;

namespace {

GridPtr grid(double k_min = 1.0, double k_max = 2.0, int n_k = 25) {
  GridSpec s;
  s.k_min = k_min;
  s.k_max = k_max;
  s.n_k = n_k;
  s.n_theta = 49;
  s.n_phi = 48;
  return build_grid(s);
}

VectorField eigen(const GridPtr& g, const Vec3& x, double alpha, int m = 1) {
  EigenvectorLabels lab;
  lab.x = x;
  lab.alpha = alpha;
  return position_eigenvector(g, lab, ChiConvention::twisted(m));
}

}  // namespace

TEST(Synthesize, PeaksAtEigenvectorPosition) {
  const auto g = grid();
  const Vec3 x0{0.0, 0.0, 0.5};
  const auto f = eigen(g, x0, 0.0);
  const auto pts = line_sweep(x0, {0.0, 0.0, 1.0}, 2.0, 80);
  const auto p = synthesize(f, MeasureKind::trivial, pts);
  const auto it = std::max_element(p.intensity.begin(), p.intensity.end());
  EXPECT_LT(norm(p.points[static_cast<std::size_t>(it - p.intensity.begin())] - x0), 1e-12);
}

TEST(Synthesize, ShiftTheorem) {
  const auto g = grid();
  const auto f = eigen(g, {}, 0.0);
  const Vec3 d{0.0, 0.0, 0.3};
  const auto shifted = map_nodes(f, [&](const Node& nd, const CVec3& v) { return std::exp(kI * dot(nd.k_vec(), d)) * v; });
  const auto pts = line_sweep({}, {0.0, 0.0, 1.0}, 1.0, 20);
  std::vector<Vec3> moved;
  for (const auto& x : pts) moved.push_back(x - d);
  const auto a = synthesize(shifted, MeasureKind::trivial, moved);
  const auto b = synthesize(f, MeasureKind::trivial, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(a.values[i][j] - b.values[i][j]), 0.0, 1e-12);
}

TEST(Synthesize, TimeAdvanceMultipliesByEnergyPhase) {
  const auto g = grid(1.0, 2.0, 13);
  const auto f = eigen(g, {}, 0.5);
  const auto advanced = map_nodes(f, [](const Node& nd, const CVec3& v) { return std::exp(-kI * (nd.k * 0.7)) * v; });
  const std::vector<Vec3> pts{{0.1, 0.2, 0.3}, {0.0, 0.0, 1.0}};
  const auto a = synthesize(f, MeasureKind::trivial, pts, 0.7), b = synthesize(advanced, MeasureKind::trivial, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(a.values[i][j] - b.values[i][j]), 0.0, 1e-12);
}

TEST(Synthesize, MeasureConsistency) {
  const auto g = grid(1.0, 2.0, 13);
  const auto f = eigen(g, {0.2, 0.0, 0.0}, 0.0);
  const auto over_k = map_nodes(f, [](const Node& nd, const CVec3& v) { return (1.0 / nd.k) * v; });
  const std::vector<Vec3> pts{{0.0, 0.0, 0.0}, {0.4, -0.3, 0.9}};
  const auto a = synthesize(f, MeasureKind::invariant, pts), b = synthesize(over_k, MeasureKind::trivial, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(std::abs(a.values[i][j] - b.values[i][j]), 1e-13 * (1 + norm(a.values[i])));
}

TEST(Synthesize, Linear) {
  const auto g = grid(1.0, 2.0, 13);
  const auto f = eigen(g, {}, 0.0), h = eigen(g, {0.1, 0.2, 0.0}, 0.5, -1);
  const std::vector<Vec3> pts{{0.3, 0.1, -0.2}};
  const auto s = synthesize(cplx(2.0, 1.0) * f + h, MeasureKind::trivial, pts);
  const auto a = synthesize(f, MeasureKind::trivial, pts), b = synthesize(h, MeasureKind::trivial, pts);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(std::abs(s.values[0][j] - (cplx(2.0, 1.0) * a.values[0][j] + b.values[0][j])), 0.0, 1e-12);
}

TEST(Synthesize, AxisymmetricIntensityRing) {
  const auto g = grid();
  const auto f = eigen(g, {}, 0.0, 2);
  std::vector<Vec3> ring;
  for (int i = 0; i < 8; ++i) {
    const double p = kTwoPi * i / 8;
    ring.push_back({0.4 * std::cos(p), 0.4 * std::sin(p), 0.2});
  }
  const auto prof = synthesize(f, MeasureKind::trivial, ring);
  const auto [lo, hi] = std::minmax_element(prof.intensity.begin(), prof.intensity.end());
  EXPECT_LT((*hi - *lo) / *hi, 1e-10);
}

TEST(Synthesize, RejectsEmptySamples) {
  EXPECT_THROW(synthesize(eigen(grid(1.0, 2.0, 9), {}, 0.0), MeasureKind::trivial, {}), std::invalid_argument);
  EXPECT_THROW(parse_measure("lorentz"), std::invalid_argument);
  EXPECT_EQ(parse_measure("invariant"), MeasureKind::invariant);
}

TEST(Localization, OriginEigenvectorPeaksAtCentre) {
  const auto g = grid();
  const auto p = synthesize(eigen(g, {}, 0.0), MeasureKind::trivial,
                            radial_sweep({}, {0.0, 0.0, 1.0}, 0.8 * alias_free_radius(*g, true), 120));
  const auto m = localization_metrics(p, {});
  EXPECT_EQ(m.peak_distance, 0.0);
  EXPECT_GT(m.fwhm, 0.0);
  EXPECT_GT(m.tail_fraction, 0.0);
}

TEST(Localization, FwhmHalvesWhenBandDoubles) {
  auto width = [](double kmin, double kmax) {
    GridSpec s;
    s.k_min = kmin;
    s.k_max = kmax;
    s.n_k = 25;
    s.n_theta = 49;
    s.n_phi = 48;
    const auto g = build_grid(s);
    const auto p = synthesize(eigen(g, {}, 0.0), MeasureKind::trivial,
                              radial_sweep({}, {0.0, 0.0, 1.0}, 0.8 * alias_free_radius(*g, true), 200));
    return localization_metrics(p, {}).fwhm;
  };
  EXPECT_NEAR(width(1.0, 2.0) / width(2.0, 4.0), 2.0, 0.1);
}

TEST(Localization, HalfExponentHasHeavierTails) {
  GridSpec s;
  s.k_min = 0.05;
  s.k_max = 2.0;
  s.n_k = 25;
  s.n_theta = 49;
  s.n_phi = 48;
  const auto g = build_grid(s);
  const auto pts = radial_sweep({}, {0.0, 0.0, 1.0}, 0.8 * alias_free_radius(*g, true), 200);
  const auto m0 = localization_metrics(synthesize(eigen(g, {}, 0.0), MeasureKind::trivial, pts), {});
  const auto m5 = localization_metrics(synthesize(eigen(g, {}, 0.5), MeasureKind::trivial, pts), {});
  EXPECT_GT(m5.tail_fraction, m0.tail_fraction);
}

TEST(Localization, NoPeakRejected) {
  XProfile p;
  p.points = {{0, 0, 0}, {0, 0, 1}, {0, 0, 2}};
  p.intensity = {0.0, 0.0, 0.0};
  EXPECT_THROW(localization_metrics(p, {}), std::runtime_error);
  p.intensity = {1.0, 2.0, 3.0};
  EXPECT_THROW(localization_metrics(p, {}), std::runtime_error);
}

TEST(Sweeps, AliasFreeRadius) {
  const auto g = grid();
  EXPECT_LE(alias_free_radius(*g, false), alias_free_radius(*g, true));
  EXPECT_NEAR(alias_free_radius(*g, true), std::min(kPi / g->h_k(), kPi / (2.0 * g->h_theta())), 1e-12);
  EXPECT_THROW(radial_sweep({}, {0, 0, 0}, 1.0, 4), std::invalid_argument);
  EXPECT_EQ(line_sweep({}, {1, 0, 0}, 1.0, 4).size(), 5u);
}
