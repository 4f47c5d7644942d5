#include <gtest/gtest.h>

#include <random>

#include "photonloc/operators.hpp"
#include "photonloc/polarization.hpp"

using namespace photonloc;

namespace {

GridPtr coarse() {
  GridSpec s;
  s.n_k = 9;
  s.n_theta = 11;
  s.n_phi = 12;
  return build_grid(s);
}

double max_diff(const CVec3& a, const CVec3& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < 3; ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST(Chi, TwistedRejectsNonIntegerM) {
  EXPECT_THROW(ChiConvention::twisted(0.5), std::invalid_argument);
  EXPECT_NO_THROW(ChiConvention::twisted(-2.0));
  EXPECT_EQ(ChiConvention::twisted(3).m(), 3);
}

TEST(Chi, TwistedValueAndPartials) {
  const auto chi = ChiConvention::twisted(2);
  const auto s = chi.sample(1.0, 0.7);
  EXPECT_DOUBLE_EQ(s.value, -1.4);
  EXPECT_DOUBLE_EQ(s.d_theta, 0.0);
  EXPECT_DOUBLE_EQ(s.d_phi, -2.0);
}

TEST(Chi, TabulatedPartialsAreCheckedOnConstruction) {
  auto val = [](double t, double p) { return 0.3 * std::sin(t) * std::cos(p); };
  auto dt = [](double t, double p) { return 0.3 * std::cos(t) * std::cos(p); };
  auto dp = [](double t, double p) { return -0.3 * std::sin(t) * std::sin(p); };
  EXPECT_NO_THROW(ChiConvention::tabulated("smooth", val, dt, dp));
  auto wrong = [](double, double) { return 1.0; };
  EXPECT_THROW(ChiConvention::tabulated("bad", val, wrong, dp), std::invalid_argument);
}

TEST(HelicityBasis, EquatorValue) {
  const auto e = helicity_basis(kPi / 2, 0.0, 1, ChiConvention::twisted(0));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_LT(max_diff(e.v, {cplx(0, 0), cplx(0, r), cplx(-r, 0)}), 1e-15);
}

TEST(HelicityBasis, UnitTransverseAndConjugatePairs) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> th(0.1, kPi - 0.1), ph(0.0, kTwoPi);
  const auto chi0 = ChiConvention::twisted(0);
  for (int i = 0; i < 200; ++i) {
    const double t = th(gen), p = ph(gen);
    const auto ep = helicity_basis(t, p, 1, chi0), em = helicity_basis(t, p, -1, chi0);
    EXPECT_NEAR(norm(ep.v), 1.0, 1e-14);
    EXPECT_LT(std::abs(dot(to_complex(frame_at(t, p).e_k), ep.v)), 1e-15);
    CVec3 conj{std::conj(ep.v[0]), std::conj(ep.v[1]), std::conj(ep.v[2])};
    EXPECT_LT(max_diff(conj, em.v), 1e-15);
  }
}

TEST(HelicityBasis, TwistedGainsAzimuthalPhase) {
  const auto e0 = helicity_basis(1.1, 0.4, -1, ChiConvention::twisted(0));
  const auto e2 = helicity_basis(1.1, 0.4, -1, ChiConvention::twisted(2));
  // exp(+i sigma m phi) with sigma = -1, m = 2
  const cplx ph = std::exp(kI * (-2.0 * 0.4));
  EXPECT_LT(max_diff(e2.v, ph * e0.v), 1e-15);
}

TEST(HelicityBasis, GaugeShiftMultipliesByPhase) {
  auto delta = [](double t, double p) { return 0.4 * std::cos(t) + 0.2 * std::sin(2 * p); };
  const auto chi = ChiConvention::tabulated(
      "delta", delta, [](double t, double) { return -0.4 * std::sin(t); },
      [](double, double p) { return 0.4 * std::cos(2 * p); });
  const auto zero = ChiConvention::twisted(0);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> th(0.2, kPi - 0.2), ph(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    const double t = th(gen), p = ph(gen);
    for (int s : {1, -1}) {
      const auto a = helicity_basis(t, p, s, zero), b = helicity_basis(t, p, s, chi);
      EXPECT_LT(max_diff(b.v, std::exp(-kI * (s * delta(t, p))) * a.v), 1e-14);
    }
  }
}

TEST(HelicityBasis, TransverseProjectorCompleteness) {
  const auto chi = ChiConvention::twisted(1);
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> th(0.1, kPi - 0.1), ph(0.0, kTwoPi);
  for (int n = 0; n < 200; ++n) {
    const double t = th(gen), p = ph(gen);
    const auto ep = helicity_basis(t, p, 1, chi).v, em = helicity_basis(t, p, -1, chi).v;
    const Vec3 ek = frame_at(t, p).e_k;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const cplx lhs = ep[i] * std::conj(ep[j]) + em[i] * std::conj(em[j]);
        const double rhs = (i == j ? 1.0 : 0.0) - ek[i] * ek[j];
        EXPECT_LT(std::abs(lhs - rhs), 1e-14);
      }
  }
}

TEST(HelicityBasis, EqualsRotatedCircularVector) {
  const auto chi = ChiConvention::twisted(-1);
  for (double t : {0.3, 1.2, 2.5})
    for (double p : {0.0, 1.7, 4.0})
      for (int s : {1, -1}) {
        const double c = chi.sample(t, p).value;
        const Mat3 d = rotation_D(t, p, c);
        const CVec3 circ{1.0 / std::sqrt(2.0), kI * (s / std::sqrt(2.0)), 0.0};
        EXPECT_LT(max_diff(matvec(d, circ), helicity_basis(t, p, s, chi).v), 1e-14);
      }
}

TEST(HelicityBasis, RejectsBadSigma) { EXPECT_THROW(helicity_basis(1.0, 1.0, 0, ChiConvention::twisted(0)), std::invalid_argument); }

TEST(PositionEigenvector, OriginIsTheBasisField) {
  const auto g = coarse();
  const auto chi = ChiConvention::twisted(1);
  const auto c = position_eigenvector(g, {}, chi);
  for (std::size_t n = 0; n < g->size(); ++n) EXPECT_LT(max_diff(c.at(n), helicity_basis(g->node(n), 1, chi).v), 1e-15);
}

TEST(PositionEigenvector, TranslationPhase) {
  const auto g = coarse();
  const auto chi = ChiConvention::twisted(0);
  EigenvectorLabels at0, at1;
  at1.x = {1.0, 0.0, 0.0};
  at1.phase = at0.phase = PhaseConvention::conjugate;
  const auto c0 = position_eigenvector(g, at0, chi), c1 = position_eigenvector(g, at1, chi);
  at1.phase = PhaseConvention::eigen;
  const auto e1 = position_eigenvector(g, at1, chi);
  for (std::size_t n = 0; n < g->size(); ++n) {
    const double kx = g->node(n).k_vec()[0];
    EXPECT_LT(max_diff(c1.at(n), std::exp(kI * kx) * c0.at(n)), 1e-14);
    EXPECT_LT(max_diff(e1.at(n), std::exp(-kI * kx) * c0.at(n)), 1e-14);
  }
}

TEST(PositionEigenvector, AlphaScalesByPowerOfK) {
  const auto g = coarse();
  const auto chi = ChiConvention::twisted(2);
  EigenvectorLabels a, b;
  a.x = b.x = {0.2, -0.1, 0.5};
  a.sigma = b.sigma = -1;
  b.alpha = 0.5;
  const auto fa = position_eigenvector(g, a, chi), fb = position_eigenvector(g, b, chi);
  for (std::size_t n = 0; n < g->size(); ++n)
    EXPECT_LT(max_diff(fb.at(n), std::sqrt(g->node(n).k) * fa.at(n)), 1e-14);
  EXPECT_EQ(fb.info().helicity, HelicityContent::minus);
}

TEST(BeamMode, UnitPhaseAtOrigin) {
  BeamParams p;
  p.m = 1;
  p.k_z0 = 1.5;
  for (const auto& s : beam_mode(0.1, 1.0, 4, 8, p)) {
    const double theta = std::atan2(s.k_perp, p.k_z0);
    EXPECT_LT(max_diff(s.value, helicity_basis(theta, s.psi, 1, ChiConvention::twisted(1)).v), 1e-15);
  }
}

TEST(BeamMode, PropagationPhase) {
  BeamParams p;
  p.k_z0 = 2.0;
  p.m = -1;
  p.sigma = -1;
  p.x_perp = {0.3, -0.2};
  BeamParams q = p;
  p.z = 0.4;
  q.z = 1.1;
  const auto a = beam_mode(0.2, 1.2, 3, 5, p), b = beam_mode(0.2, 1.2, 3, 5, q);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(max_diff(b[i].value, std::exp(-kI * (2.0 * 0.7)) * a[i].value), 1e-14);
}

TEST(BeamMode, DomainChecks) {
  BeamParams p;
  p.k_z0 = 0.0;
  EXPECT_THROW(beam_mode_at(0.0, 0.0, p), std::invalid_argument);
  EXPECT_THROW(beam_mode(0.0, 1.0, 3, 4, BeamParams{}), std::invalid_argument);
  const auto s = beam_mode(1e-6, 1.0, 3, 4, BeamParams{});
  for (const auto& x : s)
    for (const auto& c : x.value) EXPECT_TRUE(std::isfinite(c.real()) && std::isfinite(c.imag()));
}
