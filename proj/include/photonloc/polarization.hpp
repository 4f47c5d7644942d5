#pragma once

// Euler-angle gauge conventions, definite-helicity transverse unit vectors,
// position eigenvectors and beam-mode bases.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "photonloc/field.hpp"
#include "photonloc/grid.hpp"
#include "photonloc/stencil.hpp"
#include "photonloc/vec3.hpp"

namespace photonloc {

/// Value of chi and its angular partials at one direction.
struct ChiSample {
  double value = 0.0;
  double d_theta = 0.0;
  double d_phi = 0.0;
};

/// The gauge angle chi(theta, phi) that fixes the transverse basis. Either
/// twisted (chi = -m phi, integer m) or a tabulated smooth function with
/// user-supplied partials.
class ChiConvention {
 public:
  enum class Kind { twisted, tabulated };
  using AngleFn = std::function<double(double theta, double phi)>;

  ChiConvention() = default;

  static ChiConvention twisted(double m) {
    if (!std::isfinite(m) || m != std::round(m))
      throw std::invalid_argument("chi convention: twisted index m must be an integer");
    ChiConvention c;
    c.kind_ = Kind::twisted;
    c.m_ = static_cast<int>(m);
    c.name_ = "twisted m=" + std::to_string(c.m_);
    return c;
  }

  static ChiConvention twisted(int m) { return twisted(static_cast<double>(m)); }

  /// Tabulated chi. The partials are checked against fourth-order central
  /// differences of exp(i chi) on a fixed 12 x 12 set of directions.
  static ChiConvention tabulated(std::string name, AngleFn value, AngleFn d_theta, AngleFn d_phi,
                                 double tolerance = 1e-6) {
    if (!value || !d_theta || !d_phi) throw std::invalid_argument("chi convention: missing callable");
    ChiConvention c;
    c.kind_ = Kind::tabulated;
    c.name_ = std::move(name);
    c.fns_ = std::make_shared<const Fns>(Fns{std::move(value), std::move(d_theta), std::move(d_phi)});
    c.check_partials(tolerance);
    return c;
  }

  Kind kind() const { return kind_; }
  bool is_twisted() const { return kind_ == Kind::twisted; }
  int m() const { return m_; }
  const std::string& name() const { return name_; }

  ChiSample sample(double theta, double phi) const {
    if (kind_ == Kind::twisted) return {-m_ * phi, 0.0, static_cast<double>(-m_)};
    return {fns_->value(theta, phi), fns_->d_theta(theta, phi), fns_->d_phi(theta, phi)};
  }

  /// Cartesian k-gradient of chi: e_theta chi_theta / k + e_phi chi_phi / (k sin theta).
  Vec3 gradient(const Node& nd) const {
    const ChiSample s = sample(nd.theta, nd.phi);
    return (s.d_theta / nd.k) * nd.e_theta() + (s.d_phi / (nd.k * nd.sin_theta)) * nd.e_phi();
  }

 private:
  struct Fns {
    AngleFn value, d_theta, d_phi;
  };

  void check_partials(double tol) const {
    const double h = 1e-3;
    static constexpr double w[4] = {1.0 / 12.0, -2.0 / 3.0, 2.0 / 3.0, -1.0 / 12.0};
    static constexpr double off[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int a = 0; a < 12; ++a)
      for (int b = 0; b < 12; ++b) {
        const double th = 0.1 + (kPi - 0.2) * (a + 0.5) / 12.0;
        const double ph = kTwoPi * (b + 0.25) / 12.0;
        const cplx e0 = std::exp(kI * fns_->value(th, ph));
        cplx dt{}, dp{};
        for (int s = 0; s < 4; ++s) {
          dt += w[s] * std::exp(kI * fns_->value(th + off[s] * h, ph));
          dp += w[s] * std::exp(kI * fns_->value(th, ph + off[s] * h));
        }
        dt /= h;
        dp /= h;
        const double et = std::abs(dt - kI * fns_->d_theta(th, ph) * e0);
        const double ep = std::abs(dp - kI * fns_->d_phi(th, ph) * e0);
        if (et > tol * (1.0 + std::abs(fns_->d_theta(th, ph))) || ep > tol * (1.0 + std::abs(fns_->d_phi(th, ph))))
          throw std::invalid_argument("chi convention '" + name_ + "': partials inconsistent with values");
      }
  }

  Kind kind_ = Kind::twisted;
  int m_ = 0;
  std::string name_ = "twisted m=0";
  std::shared_ptr<const Fns> fns_;
};

struct HelicityVector {
  CVec3 v;
  int sigma;
  double theta, phi, chi;
};

inline void require_sigma(int sigma) {
  if (sigma != 1 && sigma != -1) throw std::invalid_argument("helicity must be +1 or -1");
}

/// (e_theta + i sigma e_phi) exp(-i sigma chi) / sqrt 2
inline HelicityVector helicity_basis(double theta, double phi, int sigma, const ChiConvention& chi) {
  require_sigma(sigma);
  const Frame fr = frame_at(theta, phi);
  const double c = chi.sample(theta, phi).value;
  const cplx phase = std::exp(-kI * static_cast<double>(sigma) * c) / std::sqrt(2.0);
  CVec3 v;
  for (std::size_t j = 0; j < 3; ++j) v[j] = phase * (fr.e_theta[j] + kI * static_cast<double>(sigma) * fr.e_phi[j]);
  return {v, sigma, theta, phi, c};
}

inline HelicityVector helicity_basis(const Node& nd, int sigma, const ChiConvention& chi) {
  return helicity_basis(nd.theta, nd.phi, sigma, chi);
}

/// Helicity components (e_sigma^* . f) of a vector at a node.
inline cplx helicity_component(const Node& nd, int sigma, const ChiConvention& chi, const CVec3& f) {
  return cdot(helicity_basis(nd, sigma, chi).v, f);
}

/// Berry connection a = cos(theta)/(k sin theta) e_phi + grad chi; for
/// chi = -m phi this is (cos(theta) - m)/(k sin theta) e_phi.
inline Vec3 connection_vector(const Node& nd, const ChiConvention& chi) {
  const Vec3 base = (nd.cos_theta / (nd.k * nd.sin_theta)) * nd.e_phi();
  return base + chi.gradient(nd);
}

/// Sign of the translation phase in position eigenvectors. `eigen` uses
/// exp[-i(k.x - k t)], for which the position operator has eigenvalue +x;
/// `conjugate` uses exp[+i(k.x - k t)], which yields eigenvalue -x.
enum class PhaseConvention { eigen, conjugate };

struct EigenvectorLabels {
  Vec3 x{0.0, 0.0, 0.0};
  double t = 0.0;
  int sigma = 1;
  double alpha = 0.0;
  PhaseConvention phase = PhaseConvention::eigen;
};

/// k^alpha e_sigma(k) exp[-/+ i(k.x - k t)] on every node.
inline VectorField position_eigenvector(const GridPtr& grid, const EigenvectorLabels& lab, const ChiConvention& chi) {
  require_sigma(lab.sigma);
  FieldInfo info;
  info.alpha = lab.alpha;
  info.chi = chi.name();
  info.helicity = lab.sigma > 0 ? HelicityContent::plus : HelicityContent::minus;
  info.transverse = true;
  const double s = lab.phase == PhaseConvention::eigen ? -1.0 : 1.0;
  return VectorField::from_function(
      grid,
      [&](const Node& nd) {
        const double arg = dot(nd.k_vec(), lab.x) - nd.k * lab.t;
        const cplx amp = std::pow(nd.k, lab.alpha) * std::exp(kI * (s * arg));
        return amp * helicity_basis(nd, lab.sigma, chi).v;
      },
      info);
}

/// Sample points of a beam basis: transverse wavenumber k_perp > 0 and azimuth psi.
struct BeamSample {
  double k_perp;
  double psi;
  CVec3 value;
};

struct BeamParams {
  double k_z0 = 1.0;
  int sigma = 1;
  int m = 0;
  std::array<double, 2> x_perp{0.0, 0.0};
  double z = 0.0;
  double t = 0.0;
};

/// e_sigma^(m)(k_perp, k_z0) exp[i(k_perp . x_perp - k_z0 z - omega t)],
/// omega = sqrt(k_perp^2 + k_z0^2).
inline CVec3 beam_mode_at(double k_perp, double psi, const BeamParams& p) {
  require_sigma(p.sigma);
  if (k_perp < 0.0) throw std::invalid_argument("beam mode: k_perp must be non-negative");
  if (k_perp == 0.0 && p.k_z0 == 0.0) throw std::invalid_argument("beam mode: zero frequency (k_perp = k_z0 = 0)");
  const double omega = std::hypot(k_perp, p.k_z0);
  const double theta = std::atan2(k_perp, p.k_z0);
  const double kx = k_perp * std::cos(psi), ky = k_perp * std::sin(psi);
  const double arg = kx * p.x_perp[0] + ky * p.x_perp[1] - p.k_z0 * p.z - omega * p.t;
  const auto e = helicity_basis(theta, psi, p.sigma, ChiConvention::twisted(p.m));
  return std::exp(kI * arg) * e.v;
}

/// Beam basis on a (k_perp, psi) product grid; k_perp runs over n_perp
/// points in [k_perp_min, k_perp_max] with k_perp_min > 0 so the beam axis
/// (theta = 0) is never sampled.
inline std::vector<BeamSample> beam_mode(double k_perp_min, double k_perp_max, int n_perp, int n_psi,
                                         const BeamParams& p) {
  if (!(k_perp_min > 0.0) || !(k_perp_max >= k_perp_min) || n_perp < 1 || n_psi < 1)
    throw std::invalid_argument("beam mode: need 0 < k_perp_min <= k_perp_max and positive counts");
  std::vector<BeamSample> out;
  out.reserve(static_cast<std::size_t>(n_perp) * static_cast<std::size_t>(n_psi));
  for (int a = 0; a < n_perp; ++a) {
    const double kp = n_perp == 1 ? k_perp_min : k_perp_min + (k_perp_max - k_perp_min) * a / (n_perp - 1);
    for (int b = 0; b < n_psi; ++b) {
      const double psi = kTwoPi * b / n_psi;
      out.push_back({kp, psi, beam_mode_at(kp, psi, p)});
    }
  }
  return out;
}

}  // namespace photonloc
