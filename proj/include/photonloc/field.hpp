#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "photonloc/grid.hpp"
#include "photonloc/vec3.hpp"

namespace photonloc {

enum class HelicityContent { unknown, plus, minus, mixed };

struct FieldInfo {
  double alpha = 0.0;
  std::string chi = "none";
  HelicityContent helicity = HelicityContent::unknown;
  bool transverse = false;
  // Set when the field is multiplied by compact windows; such fields must
  // vanish within stencil_order/2 nodes of the k and theta boundaries.
  bool windowed = false;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid) : grid_(std::move(grid)), data_(grid_->size(), cplx{}) {}
  ScalarField(GridPtr grid, std::vector<cplx> data) : grid_(std::move(grid)), data_(std::move(data)) {
    if (data_.size() != grid_->size()) throw std::invalid_argument("scalar field: size does not match grid");
  }

  template <class F>
  static ScalarField from_function(GridPtr grid, F&& f) {
    ScalarField s(grid);
    for (std::size_t n = 0; n < grid->size(); ++n) s.data_[n] = f(grid->node(n));
    return s;
  }

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  cplx& operator[](std::size_t n) { return data_[n]; }
  const cplx& operator[](std::size_t n) const { return data_[n]; }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

 private:
  GridPtr grid_;
  std::vector<cplx> data_;
};

/// Complex 3-vector (Cartesian components) per grid node, stored component-major.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(GridPtr grid, FieldInfo info = {}) : grid_(std::move(grid)), info_(std::move(info)) {
    for (auto& c : comp_) c.assign(grid_->size(), cplx{});
  }

  template <class F>
  static VectorField from_function(GridPtr grid, F&& f, FieldInfo info = {}) {
    VectorField v(grid, std::move(info));
    for (std::size_t n = 0; n < grid->size(); ++n) v.set(n, f(grid->node(n)));
    return v;
  }

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return comp_[0].size(); }
  const FieldInfo& info() const { return info_; }
  FieldInfo& info() { return info_; }

  std::vector<cplx>& component(int j) { return comp_[static_cast<std::size_t>(j)]; }
  const std::vector<cplx>& component(int j) const { return comp_[static_cast<std::size_t>(j)]; }

  CVec3 at(std::size_t n) const { return {comp_[0][n], comp_[1][n], comp_[2][n]}; }
  void set(std::size_t n, const CVec3& v) {
    comp_[0][n] = v[0];
    comp_[1][n] = v[1];
    comp_[2][n] = v[2];
  }

  bool same_shape(const VectorField& o) const { return grid_ && o.grid_ && grid_->spec() == o.grid_->spec(); }

  VectorField& operator+=(const VectorField& o) {
    require_same(o);
    for (int j = 0; j < 3; ++j) {
      auto& a = component(j);
      const auto& b = o.component(j);
      for (std::size_t n = 0; n < a.size(); ++n) a[n] += b[n];
    }
    return *this;
  }

  VectorField& operator-=(const VectorField& o) {
    require_same(o);
    for (int j = 0; j < 3; ++j) {
      auto& a = component(j);
      const auto& b = o.component(j);
      for (std::size_t n = 0; n < a.size(); ++n) a[n] -= b[n];
    }
    return *this;
  }

  VectorField& operator*=(cplx s) {
    for (auto& c : comp_)
      for (auto& x : c) x *= s;
    return *this;
  }

  /// this += s * o
  VectorField& axpy(cplx s, const VectorField& o) {
    require_same(o);
    for (int j = 0; j < 3; ++j) {
      auto& a = component(j);
      const auto& b = o.component(j);
      for (std::size_t n = 0; n < a.size(); ++n) a[n] += s * b[n];
    }
    return *this;
  }

  void require_same(const VectorField& o) const {
    if (!same_shape(o)) throw std::invalid_argument("vector field: grid mismatch");
  }

 private:
  GridPtr grid_;
  std::array<std::vector<cplx>, 3> comp_;
  FieldInfo info_;
};

inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator*(cplx s, VectorField a) { return a *= s; }

/// Nodewise map f(node, value) -> value, returning a fresh field.
template <class F>
VectorField map_nodes(const VectorField& in, F&& f) {
  VectorField out(in.grid());
  const SphericalGrid& g = *in.grid();
  for (std::size_t n = 0; n < g.size(); ++n) out.set(n, f(g.node(n), in.at(n)));
  return out;
}

/// Multiplication by a scalar function of the node.
template <class F>
VectorField multiply(const VectorField& in, F&& s) {
  return map_nodes(in, [&](const Node& nd, const CVec3& v) { return cplx(s(nd)) * v; });
}

/// Weighted L2 norm with quadrature weights k^2 sin(theta) h_k h_theta h_phi.
/// A positive `margin` restricts the sum to nodes that many steps inside the
/// k and theta boundaries.
inline double l2_norm(const VectorField& f, int margin = 0) {
  const SphericalGrid& g = *f.grid();
  double s = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (margin > 0 && !g.interior(n, margin)) continue;
    const double w = g.weight(n);
    for (int j = 0; j < 3; ++j) s += w * std::norm(f.component(j)[n]);
  }
  return std::sqrt(s);
}

inline double l2_norm_component(const VectorField& f, int j, int margin = 0) {
  const SphericalGrid& g = *f.grid();
  double s = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (margin > 0 && !g.interior(n, margin)) continue;
    s += g.weight(n) * std::norm(f.component(j)[n]);
  }
  return std::sqrt(s);
}

inline double max_abs(const VectorField& f) {
  double m = 0.0;
  for (int j = 0; j < 3; ++j)
    for (const auto& x : f.component(j)) m = std::max(m, std::abs(x));
  return m;
}

/// max over nodes of |e_k . f| / max over nodes of |f|
inline double longitudinal_fraction(const VectorField& f) {
  const SphericalGrid& g = *f.grid();
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const CVec3 v = f.at(n);
    num = std::max(num, std::abs(dot(g.node(n).e_k(), v)));
    den = std::max(den, norm(v));
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace photonloc
