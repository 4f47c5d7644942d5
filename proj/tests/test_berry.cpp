#include <gtest/gtest.h>

#include <random>

#include "photonloc/berry.hpp"

using namespace photonloc;

TEST(Connection, EquatorTwistedOne) {
  const auto s = connection(1.0, kPi / 2, 0.0, ChiConvention::twisted(1));
  EXPECT_NEAR(s.a[0], 0.0, 1e-15);
  EXPECT_NEAR(s.a[1], -1.0, 1e-15);
  EXPECT_NEAR(s.a[2], 0.0, 1e-15);
}

TEST(Connection, UntwistedMatchesZeroTabulatedChi) {
  auto zero = [](double, double) { return 0.0; };
  const auto tab = ChiConvention::tabulated("zero", zero, zero, zero);
  const auto tw = ChiConvention::twisted(0);
  for (double t : {0.4, 1.3, 2.9}) {
    const auto a = connection(1.7, t, 0.9, tab), b = connection(1.7, t, 0.9, tw);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.a[i], b.a[i]);
  }
}

TEST(Connection, MagnitudeAndDirection) {
  const double t = kPi / 3;
  const auto s = connection(2.0, t, 0.6, ChiConvention::twisted(1));
  EXPECT_NEAR(norm(s.a), 0.5 / (2.0 * std::sin(t)), 1e-15);
  EXPECT_NEAR(dot(s.a, frame_at(t, 0.6).e_phi), -norm(s.a), 1e-15);
  EXPECT_NEAR(norm(s.a), 0.288675134594813, 1e-12);
}

TEST(Connection, TwistedIsAlongEPhi) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> th(0.1, kPi - 0.1), ph(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    const double t = th(gen), p = ph(gen);
    const auto s = connection(1.5, t, p, ChiConvention::twisted(i % 5 - 2));
    const Frame f = frame_at(t, p);
    EXPECT_NEAR(dot(s.a, f.e_k), 0.0, 1e-15);
    EXPECT_NEAR(dot(s.a, f.e_theta), 0.0, 1e-15);
  }
}

TEST(Connection, PoleRejected) { EXPECT_THROW(connection(1.0, 0.0, 0.0, ChiConvention::twisted(1)), std::invalid_argument); }

TEST(BerryConnection, MatchesBasisDerivativeAtStencilOrder) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> th(0.3, kPi - 0.3), ph(0.0, kTwoPi), kk(1.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double k = kk(gen), t = th(gen), p = ph(gen);
    const int m = trial % 5 - 2;
    const auto chi = ChiConvention::twisted(m);
    const Vec3 a = connection(k, t, p, chi).a;
    for (int s : {1, -1})
      for (int i = 0; i < 3; ++i) {
        const double expect = s * a[static_cast<std::size_t>(i)];
        const double e1 = std::abs(berry_connection_from_basis(k, t, p, s, chi, i, 2e-2) - expect);
        const double e2 = std::abs(berry_connection_from_basis(k, t, p, s, chi, i, 1e-2) - expect);
        EXPECT_LT(e2, 1e-6);
        if (e1 > 1e-10) {
          EXPECT_GT(std::log2(e1 / e2), 3.5) << e1 << " " << e2;
        }
      }
  }
}

TEST(BerryConnection, HelicitySignFlipsAndNoRadialPart) {
  const auto chi = ChiConvention::twisted(2);
  const cplx p = berry_connection_from_basis(1.4, 0.9, 2.0, 1, chi, 1);
  const cplx m = berry_connection_from_basis(1.4, 0.9, 2.0, -1, chi, 1);
  EXPECT_NEAR(std::abs(p + m), 0.0, 1e-9);
  const Vec3 ek = frame_at(0.9, 2.0).e_k;
  EXPECT_NEAR(std::abs(berry_connection_from_basis(1.4, 0.9, 2.0, 1, chi, ek)), 0.0, 1e-9);
}

TEST(Curvature, MonopoleAndConvergence) {
  // The twist adds a pure gradient to a, so both residuals converge to the same zero.
  for (int m : {0, 1, -2}) {
    std::vector<double> res;
    GridSpec s;
    s.n_k = 13;
    s.n_theta = 25;
    s.n_phi = 24;
    for (int level = 0; level < 3; ++level, s = s.refined())
      res.push_back(curvature_residual(build_grid(s), ChiConvention::twisted(m)).max_residual);
    EXPECT_GE(std::log2(res[1] / res[2]), 3.5) << "m=" << m << " " << res[0] << " " << res[1] << " " << res[2];
    EXPECT_LT(res[2], 1e-5);
  }
}

TEST(Curvature, ExpectedMagnitudeAtKTwo) {
  // The monopole field at k = 2 has magnitude 1/4.
  const Node nd = make_node(2.0, 1.0, 0.3);
  EXPECT_DOUBLE_EQ(norm((-1.0 / (nd.k * nd.k)) * nd.e_k()), 0.25);
}

TEST(LoopPhase, LatitudeCircles) {
  const auto l = BerryLoop::latitude(1.0, kPi / 2, 64);
  EXPECT_NEAR(loop_phase(l, ChiConvention::twisted(1)).raw, kTwoPi, 1e-12);
  const auto l3 = BerryLoop::latitude(1.5, kPi / 3, 64);
  const auto p1 = loop_phase(l3, ChiConvention::twisted(1));
  const auto p2 = loop_phase(l3, ChiConvention::twisted(2));
  EXPECT_NEAR(p1.raw, kPi, 1e-12);
  EXPECT_NEAR(p2.raw, 3 * kPi, 1e-12);
  EXPECT_NEAR(p2.reduced, kPi, 1e-12);
  EXPECT_LT(phase_distance(p1.reduced, p2.reduced), 1e-10);
}

TEST(LoopPhase, ReducedPhaseIndependentOfTwist) {
  const auto l = BerryLoop::latitude(1.2, 1.1, 128);
  const double ref = loop_phase(l, ChiConvention::twisted(0)).reduced;
  for (int m = -3; m <= 3; ++m) {
    const auto p = loop_phase(l, ChiConvention::twisted(m));
    EXPECT_LT(phase_distance(p.reduced, ref), 1e-10) << m;
    EXPECT_NEAR(p.raw - loop_phase(l, ChiConvention::twisted(0)).raw, kTwoPi * m, 1e-10);
  }
}

TEST(LoopPhase, ConvergedBeyondNyquist) {
  const auto chi = ChiConvention::twisted(1);
  const double a = loop_phase(BerryLoop::latitude(1.0, 0.7, 32), chi).raw;
  const double b = loop_phase(BerryLoop::latitude(1.0, 0.7, 64), chi).raw;
  EXPECT_LT(std::abs(a - b), 1e-12);
}

TEST(LoopPhase, PolylineApproximatesLatitudeCircle) {
  std::vector<Vec3> poly;
  const int n = 400;
  const double t = 1.0;
  for (int i = 0; i <= n; ++i) {
    const double p = kTwoPi * (i % n) / n;
    poly.push_back({std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)});
  }
  const auto ph = loop_phase(BerryLoop::polyline(poly, 8), ChiConvention::twisted(1));
  EXPECT_NEAR(ph.raw, kTwoPi * (1.0 - std::cos(t)), 1e-3);
}

TEST(LoopPhase, RejectsOpenPathsAndPoles) {
  EXPECT_THROW(BerryLoop::latitude(1.0, 0.0, 16), std::invalid_argument);
  const std::vector<Vec3> open{{1, 0, 0}, {0, 1, 0}, {0, 0.5, 0.5}, {0.5, 0.5, 0}};
  EXPECT_THROW(loop_phase(BerryLoop::polyline(open, 4), ChiConvention::twisted(1)), std::invalid_argument);
  const std::vector<Vec3> pole{{1, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  EXPECT_THROW(loop_phase(BerryLoop::polyline(pole, 4), ChiConvention::twisted(1)), std::invalid_argument);
}

TEST(ParallelTransport, TermsCancel) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> th(0.1, kPi - 0.1), ph(0.0, kTwoPi), kk(0.5, 3.0), d(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 dxi{d(gen), d(gen), d(gen)};
    EXPECT_LT(parallel_transport_check(kk(gen), th(gen), ph(gen), dxi, ChiConvention::twisted(i % 5 - 2)).residual, 1e-14);
  }
}

TEST(ParallelTransport, AxialRotationAndLinearity) {
  const auto chi = ChiConvention::twisted(1);
  const Node nd = make_node(1.3, 0.8, 2.2);
  const auto t = parallel_transport_check(1.3, 0.8, 2.2, 0.01 * nd.e_k(), chi);
  EXPECT_NEAR(t.rotation, 0.0, 1e-16);
  EXPECT_NEAR(t.translation, 0.0, 1e-16);
  const Vec3 dxi{0.01, -0.02, 0.03};
  const auto a = parallel_transport_check(1.3, 0.8, 2.2, dxi, chi);
  const auto b = parallel_transport_check(1.3, 0.8, 2.2, 2.0 * dxi, chi);
  EXPECT_NEAR(b.rotation, 2 * a.rotation, 1e-16);
  EXPECT_NEAR(b.translation, 2 * a.translation, 1e-16);
}

TEST(AxisRotation, ClosedFormIntegral) {
  auto anti = [](double t) { return std::log(std::sin(t)) - std::log(std::tan(t / 2)); };
  const double expect = anti(kPi / 2) - anti(kPi / 4);
  EXPECT_NEAR(expect, -0.5348, 1e-4);
  EXPECT_NEAR(axis_rotation_delta_chi(kPi / 4, kPi / 2, 1, 1.0, 0.3, 0.3), expect, 1e-13);
  EXPECT_NEAR(axis_rotation_delta_chi(kPi / 4, kPi / 2, 1, 1.0, kPi / 2 + 0.3, 0.3), 0.0, 1e-16);
  EXPECT_EQ(axis_rotation_delta_chi(1.0, 1.0, 2, 1.0, 0.0, 0.0), 0.0);
  EXPECT_THROW(axis_rotation_delta_chi(0.0, 1.0, 1, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(AnomalousShift, AlignedAzimuthGivesPolarComponentOnly) {
  const Vec3 d = anomalous_shift(1.5, 1.0, 0.7, 0.01, 0.7, 1, 1);
  const Frame f = frame_at(1.0, 0.7);
  EXPECT_NEAR(dot(d, f.e_phi), 0.0, 1e-17);
  EXPECT_GT(std::abs(dot(d, f.e_theta)), 1e-4);
}

TEST(AnomalousShift, EquatorUntwistedValue) {
  // a = cot(theta)/k has d a/d theta = -1 at the equator for k = 1.
  for (int s : {1, -1}) {
    const Vec3 d = anomalous_shift(1.0, kPi / 2, 0.4, 0.02, 0.1, 0, s);
    const Frame f = frame_at(kPi / 2, 0.4);
    EXPECT_NEAR(dot(d, f.e_theta), -s * 0.02 * (-1.0) * std::cos(0.3), 1e-15);
    EXPECT_NEAR(dot(d, f.e_phi), 0.0, 1e-15);
  }
}

TEST(AnomalousShift, ComparedWithGradientOfQuadrature) {
  // g(k) = k d/dtheta [Delta chi(theta_i, theta)] = k a(theta) cos(phi - phi_ref), differentiated
  // numerically in Cartesian k. The polar component of the printed shift equals
  // -sigma dtheta (grad g)_theta; the azimuthal component comes out with the opposite sign.
  const int m = 1, sigma = 1;
  const double k = 1.3, t = 1.1, p = 0.9, pref = 0.2, dth = 0.01, h = 1e-4;
  auto g = [&](const Vec3& q) {
    const double r = norm(q), th = std::acos(q[2] / r), ph = std::atan2(q[1], q[0]);
    const double dchi_dth = (axis_rotation_delta_chi(0.5, th + h, m, r, ph, pref) -
                             axis_rotation_delta_chi(0.5, th - h, m, r, ph, pref)) / (2 * h);
    return r * dchi_dth;
  };
  const Node nd = make_node(k, t, p);
  Vec3 grad{};
  const double e = 1e-4;
  for (std::size_t j = 0; j < 3; ++j) {
    Vec3 a = nd.k_vec(), b = nd.k_vec();
    a[j] -= e;
    b[j] += e;
    grad[j] = (g(b) - g(a)) / (2 * e);
  }
  const Vec3 shift = anomalous_shift(k, t, p, dth, pref, m, sigma);
  const Vec3 ref = (-sigma * dth) * grad;
  EXPECT_NEAR(dot(shift, nd.e_theta()), dot(ref, nd.e_theta()), 1e-8);
  EXPECT_NEAR(dot(shift, nd.e_phi()), -dot(ref, nd.e_phi()), 1e-8);
  EXPECT_GT(std::abs(dot(ref, nd.e_phi())), 1e-4);
}
