#pragma once

// Spherical-polar momentum grids: k uniform on [k_min, k_max], theta uniform on
// [theta_cap, pi - theta_cap], phi uniform and periodic on [0, 2 pi). Poles and
// the origin are never sampled.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "photonloc/vec3.hpp"

namespace photonloc {

enum class PhiDerivative { spectral, central };

struct GridSpec {
  double k_min = 1.0;
  double k_max = 2.0;
  int n_k = 49;
  int n_theta = 97;
  int n_phi = 96;
  double theta_cap = kPi / 4.0;
  int stencil_order = 4;
  PhiDerivative phi_derivative = PhiDerivative::spectral;

  void validate() const {
    if (!(k_min > 0.0)) throw std::invalid_argument("grid: k_min must be > 0");
    if (!(k_max > k_min)) throw std::invalid_argument("grid: k_max must exceed k_min");
    if (!(theta_cap > 0.0 && theta_cap < kPi / 2.0))
      throw std::invalid_argument("grid: theta_cap must lie in (0, pi/2)");
    if (stencil_order != 2 && stencil_order != 4 && stencil_order != 6)
      throw std::invalid_argument("grid: stencil_order must be 2, 4 or 6");
    if (n_phi < 4 || n_phi % 2 != 0) throw std::invalid_argument("grid: n_phi must be even and >= 4");
    if (n_k < stencil_order + 1 || n_theta < stencil_order + 1)
      throw std::invalid_argument("grid: n_k and n_theta must be at least stencil_order + 1");
  }

  std::size_t node_count() const {
    return static_cast<std::size_t>(n_k) * static_cast<std::size_t>(n_theta) *
           static_cast<std::size_t>(n_phi);
  }

  /// Halves every spacing: n -> 2(n-1)+1 on the closed axes, n -> 2n on phi.
  GridSpec refined() const {
    GridSpec r = *this;
    r.n_k = 2 * (n_k - 1) + 1;
    r.n_theta = 2 * (n_theta - 1) + 1;
    r.n_phi = 2 * n_phi;
    return r;
  }

  /// Key=value text, one key per line; round-trips through parse_grid_config.
  std::string to_config() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "k_min=" << k_min << "\nk_max=" << k_max << "\nn_k=" << n_k << "\nn_theta=" << n_theta
       << "\nn_phi=" << n_phi << "\ntheta_cap=" << theta_cap << "\nstencil_order=" << stencil_order
       << "\nphi_derivative=" << (phi_derivative == PhiDerivative::spectral ? "spectral" : "central")
       << "\n";
    return os.str();
  }

  bool operator==(const GridSpec&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("grid config: bad number for " + key + ": " + v);
  }
  if (pos != v.size()) throw std::invalid_argument("grid config: bad number for " + key + ": " + v);
  return d;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d)) throw std::invalid_argument("grid config: " + key + " must be an integer");
  return static_cast<int>(d);
}

}  // namespace detail

/// Parses `key=value` lines. Blank lines and `#` comments are ignored; unknown
/// keys are an error. Missing keys keep their GridSpec defaults.
inline GridSpec parse_grid_config(std::istream& in) {
  GridSpec s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("grid config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key == "k_min") s.k_min = detail::parse_double(key, val);
    else if (key == "k_max") s.k_max = detail::parse_double(key, val);
    else if (key == "n_k") s.n_k = detail::parse_int(key, val);
    else if (key == "n_theta") s.n_theta = detail::parse_int(key, val);
    else if (key == "n_phi") s.n_phi = detail::parse_int(key, val);
    else if (key == "theta_cap") s.theta_cap = detail::parse_double(key, val);
    else if (key == "stencil_order") s.stencil_order = detail::parse_int(key, val);
    else if (key == "phi_derivative") {
      if (val == "spectral") s.phi_derivative = PhiDerivative::spectral;
      else if (val == "central") s.phi_derivative = PhiDerivative::central;
      else throw std::invalid_argument("grid config: phi_derivative must be spectral or central");
    } else {
      throw std::invalid_argument("grid config: unknown key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

inline GridSpec load_grid_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grid config: " + path);
  return parse_grid_config(in);
}

/// Orthonormal right-handed triad at (theta, phi): e_k x e_theta = e_phi.
struct Frame {
  Vec3 e_k;
  Vec3 e_theta;
  Vec3 e_phi;
};

inline Frame frame_at(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  return Frame{{st * cp, st * sp, ct}, {ct * cp, ct * sp, -st}, {-sp, cp, 0.0}};
}

/// Node coordinates and cached trigonometry for one grid point.
struct Node {
  double k, theta, phi;
  double sin_theta, cos_theta, sin_phi, cos_phi;

  Vec3 k_vec() const { return {k * sin_theta * cos_phi, k * sin_theta * sin_phi, k * cos_theta}; }
  Vec3 e_k() const { return {sin_theta * cos_phi, sin_theta * sin_phi, cos_theta}; }
  Vec3 e_theta() const { return {cos_theta * cos_phi, cos_theta * sin_phi, -sin_theta}; }
  Vec3 e_phi() const { return {-sin_phi, cos_phi, 0.0}; }
};

class SphericalGrid {
 public:
  explicit SphericalGrid(const GridSpec& spec) : spec_(spec) {
    spec_.validate();
    h_k_ = (spec_.k_max - spec_.k_min) / (spec_.n_k - 1);
    h_theta_ = (kPi - 2.0 * spec_.theta_cap) / (spec_.n_theta - 1);
    h_phi_ = kTwoPi / spec_.n_phi;
    k_.resize(static_cast<std::size_t>(spec_.n_k));
    theta_.resize(static_cast<std::size_t>(spec_.n_theta));
    phi_.resize(static_cast<std::size_t>(spec_.n_phi));
    for (int i = 0; i < spec_.n_k; ++i) k_[static_cast<std::size_t>(i)] = spec_.k_min + i * h_k_;
    k_.back() = spec_.k_max;
    for (int i = 0; i < spec_.n_theta; ++i)
      theta_[static_cast<std::size_t>(i)] = spec_.theta_cap + i * h_theta_;
    theta_.back() = kPi - spec_.theta_cap;
    for (int i = 0; i < spec_.n_phi; ++i) phi_[static_cast<std::size_t>(i)] = i * h_phi_;
    sin_theta_.resize(theta_.size());
    cos_theta_.resize(theta_.size());
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      sin_theta_[i] = std::sin(theta_[i]);
      cos_theta_[i] = std::cos(theta_[i]);
    }
    sin_phi_.resize(phi_.size());
    cos_phi_.resize(phi_.size());
    for (std::size_t i = 0; i < phi_.size(); ++i) {
      sin_phi_[i] = std::sin(phi_[i]);
      cos_phi_[i] = std::cos(phi_[i]);
    }
  }

  const GridSpec& spec() const { return spec_; }
  int n_k() const { return spec_.n_k; }
  int n_theta() const { return spec_.n_theta; }
  int n_phi() const { return spec_.n_phi; }
  std::size_t size() const { return spec_.node_count(); }

  double h_k() const { return h_k_; }
  double h_theta() const { return h_theta_; }
  double h_phi() const { return h_phi_; }

  const std::vector<double>& k_axis() const { return k_; }
  const std::vector<double>& theta_axis() const { return theta_; }
  const std::vector<double>& phi_axis() const { return phi_; }

  // phi runs fastest so that periodic lines are contiguous.
  std::size_t index(int ik, int it, int ip) const {
    return (static_cast<std::size_t>(ik) * static_cast<std::size_t>(spec_.n_theta) +
            static_cast<std::size_t>(it)) *
               static_cast<std::size_t>(spec_.n_phi) +
           static_cast<std::size_t>(ip);
  }

  Node node(int ik, int it, int ip) const {
    const auto uk = static_cast<std::size_t>(ik), ut = static_cast<std::size_t>(it),
               up = static_cast<std::size_t>(ip);
    return Node{k_[uk], theta_[ut], phi_[up], sin_theta_[ut], cos_theta_[ut], sin_phi_[up], cos_phi_[up]};
  }

  Node node(std::size_t n) const {
    const auto np = static_cast<std::size_t>(spec_.n_phi), nt = static_cast<std::size_t>(spec_.n_theta);
    const auto ip = n % np;
    const auto it = (n / np) % nt;
    const auto ik = n / (np * nt);
    return node(static_cast<int>(ik), static_cast<int>(it), static_cast<int>(ip));
  }

  /// Quadrature weight k^2 sin(theta) h_k h_theta h_phi.
  double weight(std::size_t n) const {
    const Node nd = node(n);
    return nd.k * nd.k * nd.sin_theta * h_k_ * h_theta_ * h_phi_;
  }

  /// True when the node is at least `margin` nodes away from both k and theta boundaries.
  bool interior(std::size_t n, int margin) const {
    const auto np = static_cast<std::size_t>(spec_.n_phi), nt = static_cast<std::size_t>(spec_.n_theta);
    const int it = static_cast<int>((n / np) % nt);
    const int ik = static_cast<int>(n / (np * nt));
    return ik >= margin && ik < spec_.n_k - margin && it >= margin && it < spec_.n_theta - margin;
  }

 private:
  GridSpec spec_;
  double h_k_, h_theta_, h_phi_;
  std::vector<double> k_, theta_, phi_;
  std::vector<double> sin_theta_, cos_theta_, sin_phi_, cos_phi_;
};

using GridPtr = std::shared_ptr<const SphericalGrid>;

inline GridPtr build_grid(const GridSpec& spec) { return std::make_shared<const SphericalGrid>(spec); }

}  // namespace photonloc
