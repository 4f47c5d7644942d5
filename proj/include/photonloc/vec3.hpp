#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace photonloc {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using CMat3 = std::array<std::array<cplx, 3>, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

template <class T, class U>
constexpr auto dot(const std::array<T, 3>& a, const std::array<U, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Hermitian inner product a* . b
inline cplx cdot(const CVec3& a, const CVec3& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

template <class T, class U>
constexpr auto cross(const std::array<T, 3>& a, const std::array<U, 3>& b) {
  using R = decltype(a[0] * b[0]);
  return std::array<R, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                          a[0] * b[1] - a[1] * b[0]};
}

template <class T>
constexpr std::array<T, 3> operator+(const std::array<T, 3>& a, const std::array<T, 3>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

template <class T>
constexpr std::array<T, 3> operator-(const std::array<T, 3>& a, const std::array<T, 3>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <class S, class T>
constexpr auto operator*(S s, const std::array<T, 3>& a) {
  using R = decltype(s * a[0]);
  return std::array<R, 3>{s * a[0], s * a[1], s * a[2]};
}

inline CVec3 to_complex(const Vec3& v) { return {v[0], v[1], v[2]}; }

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double norm(const CVec3& v) { return std::sqrt(std::real(cdot(v, v))); }

/// Levi-Civita symbol with eps(0,1,2) = +1.
constexpr int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0)) ? 1 : -1;
}

inline Vec3 unit_axis(int i) {
  Vec3 e{0.0, 0.0, 0.0};
  e[static_cast<std::size_t>(i)] = 1.0;
  return e;
}

template <class M, class V>
inline auto matvec(const M& m, const V& v) {
  using R = decltype(m[0][0] * v[0]);
  std::array<R, 3> out{};
  for (std::size_t r = 0; r < 3; ++r) out[r] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2];
  return out;
}

inline Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return c;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 t{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

/// Active rotation by angle about Cartesian axis 1 (index 1, "y") or 2 ("z").
inline Mat3 rotation_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return Mat3{{{c, 0.0, s}, {0.0, 1.0, 0.0}, {-s, 0.0, c}}};
}

inline Mat3 rotation_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return Mat3{{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

}  // namespace photonloc
