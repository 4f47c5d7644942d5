#pragma once

// Pass thresholds on relative residuals, keyed by identity group. Values are
// calibrated on the reference grid (configs/reference.cfg) as three times the
// residual extrapolated from a three-level convergence study, maximised over
// m in -2..2 and both alpha, rounded up to 1, 2 or 5 times a power of ten and
// floored at 1e-10 (the `convergence --calibrate` command prints fresh
// values). configs/thresholds.txt holds the same table. On coarser grids a
// derivative-bearing threshold is scaled by (h_k / h_k_ref)^stencil_order.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "photonloc/grid.hpp"

namespace photonloc {

inline constexpr const char* kDefaultThresholdTable = R"(# group  threshold
exact 1e-13
position.xx 5e-6
position.xP 5e-7
position.xH 1e-10
position.xsigma 1e-7
poincare.JJ 5e-6
poincare.JK 1e-5
poincare.KK 5e-6
poincare.JP 5e-7
poincare.KP 5e-7
poincare.KH 1e-10
poincare.JH 1e-10
little.L1L2 5e-5
little.J3L 1e-10
e2.x1x2 5e-6
e2.J3x 1e-10
pryce.xPxP 5e-5
pryce.JxP 1e-5
pryce.KxP 1e-5
rbx.Jx 1e-5
rbx.Kx 2e-5
decomp.J 5e-7
decomp.K 1e-10
decomp.JP 5e-7
velocity 1e-10
eigen 1e-6
conjugation 1e-6
)";

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Reference grid on which the table is calibrated.
inline GridSpec reference_grid_spec() { return GridSpec{}; }

class ThresholdTable {
 public:
  ThresholdTable() : ThresholdTable(std::string(kDefaultThresholdTable)) {}

  explicit ThresholdTable(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::ostringstream canon;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string key;
      double v = 0.0;
      if (!(ls >> key)) continue;
      if (!(ls >> v) || !(v > 0.0)) throw std::invalid_argument("threshold table: bad value for " + key);
      values_[key] = v;
    }
    canon << std::setprecision(17);
    for (const auto& [k, v] : values_) canon << k << ' ' << v << '\n';
    hash_ = hex64(fnv1a(canon.str()));
  }

  static ThresholdTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open threshold table: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ThresholdTable(ss.str());
  }

  bool has(const std::string& group) const { return values_.count(group) > 0; }

  double base(const std::string& group) const {
    const auto it = values_.find(group);
    if (it == values_.end()) throw std::invalid_argument("threshold table: no entry for " + group);
    return it->second;
  }

  /// Threshold for a group on a given grid; exact (derivative-free) groups are not scaled.
  double for_grid(const std::string& group, const GridSpec& grid, bool derivative) const {
    const double t = base(group);
    if (!derivative) return t;
    const GridSpec ref = reference_grid_spec();
    const double h_ref = (ref.k_max - ref.k_min) / (ref.n_k - 1);
    const double h = (grid.k_max - grid.k_min) / (grid.n_k - 1);
    const double ratio = h / h_ref;
    return ratio > 1.0 ? t * std::pow(ratio, grid.stencil_order) : t;
  }

  const std::map<std::string, double>& values() const { return values_; }
  const std::string& hash() const { return hash_; }

 private:
  std::map<std::string, double> values_;
  std::string hash_;
};

}  // namespace photonloc
