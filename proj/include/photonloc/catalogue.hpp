#pragma once

// Named operator handles ("x1", "J3", "sigma", ...) grouped in families.
// Families whose members share a gradient are applied jointly.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photonloc/operators.hpp"

namespace photonloc {

struct OpParams {
  double alpha = 0.0;
  ChiConvention chi{};
};

struct OperatorFamily {
  std::string name;
  std::string formula;
  std::string parameters;
  std::vector<std::string> members;
  bool derivative = false;
  // Joint families fill apply_all; the others apply one member at a time.
  std::function<std::vector<VectorField>(const VectorField&, const OpParams&)> apply_all;
  std::function<VectorField(int, const VectorField&, const OpParams&)> apply_one;

  bool joint() const { return static_cast<bool>(apply_all); }
};

namespace detail {

inline std::vector<std::string> indexed(const std::string& stem, int n = 3) {
  std::vector<std::string> v;
  for (int i = 1; i <= n; ++i) v.push_back(stem + std::to_string(i));
  return v;
}

inline std::vector<std::string> pair_indexed(const std::string& stem) {
  std::vector<std::string> v;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) v.push_back(stem + std::to_string(i) + std::to_string(j));
  return v;
}

inline std::vector<VectorField> to_vector(Triple t) { return {std::move(t[0]), std::move(t[1]), std::move(t[2])}; }

inline std::vector<OperatorFamily> build_catalogue() {
  std::vector<OperatorFamily> c;
  auto add_nodewise = [&](std::string name, std::string formula, std::string params, std::vector<std::string> members,
                          std::function<VectorField(int, const VectorField&, const OpParams&)> fn) {
    OperatorFamily f;
    f.name = std::move(name);
    f.formula = std::move(formula);
    f.parameters = std::move(params);
    f.members = std::move(members);
    f.apply_one = std::move(fn);
    c.push_back(std::move(f));
  };
  auto add_joint = [&](std::string name, std::string formula, std::string params, std::vector<std::string> members,
                       std::function<std::vector<VectorField>(const VectorField&, const OpParams&)> fn) {
    OperatorFamily f;
    f.name = std::move(name);
    f.formula = std::move(formula);
    f.parameters = std::move(params);
    f.members = std::move(members);
    f.derivative = true;
    f.apply_all = std::move(fn);
    c.push_back(std::move(f));
  };

  add_nodewise("I", "identity", "-", {"I"}, [](int, const VectorField& f, const OpParams&) { return f; });
  add_nodewise("S", "(S_i)_{jl} = -i eps_{ijl}", "i", indexed("S"),
               [](int i, const VectorField& f, const OpParams&) { return spin_apply(i, f); });
  add_nodewise("sigma", "sigma f = i e_k x f", "-", {"sigma"},
               [](int, const VectorField& f, const OpParams&) { return helicity_apply(f); });
  add_nodewise("P", "P_i f = k_i f", "i", indexed("P"),
               [](int i, const VectorField& f, const OpParams&) { return momentum_apply(i, f); });
  add_nodewise("H", "H f = k f", "-", {"H"}, [](int, const VectorField& f, const OpParams&) { return energy_apply(f); });
  add_nodewise("khat", "(k_i / k) f", "i", indexed("khat"),
               [](int i, const VectorField& f, const OpParams&) { return direction_apply(i, f); });
  add_nodewise("sk2", "sigma (k_i / k^2) f", "i", indexed("sk2_"), [](int i, const VectorField& f, const OpParams&) {
    return multiply(helicity_apply(f), [i](const Node& nd) { return nd.e_k()[static_cast<std::size_t>(i)] / nd.k; });
  });
  add_nodewise("sk3", "sigma (k_i / k^3) f", "i", indexed("sk3_"), [](int i, const VectorField& f, const OpParams&) {
    return multiply(helicity_apply(f),
                    [i](const Node& nd) { return nd.e_k()[static_cast<std::size_t>(i)] / (nd.k * nd.k); });
  });
  add_nodewise("J0", "J^(0,a)_i f = sigma (a x k + e_k)_i f", "i, chi", indexed("J0_"),
               [](int i, const VectorField& f, const OpParams& p) {
                 return intrinsic_rotation_apply(f, p.chi)[static_cast<std::size_t>(i)];
               });
  add_nodewise("K0", "K^(0,a)_i f = sigma k a_i f", "i, chi", indexed("K0_"),
               [](int i, const VectorField& f, const OpParams& p) {
                 return intrinsic_boost_apply(f, p.chi)[static_cast<std::size_t>(i)];
               });
  add_nodewise("dJ0", "sigma d_j (a x k + e_k)_i f  (member dJ0_ij)", "i, j, chi", pair_indexed("dJ0_"),
               [](int ij, const VectorField& f, const OpParams& p) {
                 return derivative_intrinsic_apply(
                     f, [&](const Node& nd) { return nodewise::intrinsic_rotation_vector(nd, p.chi); }, ij / 3, ij % 3);
               });
  add_nodewise("dK0", "sigma d_j (k a_i) f  (member dK0_ij)", "i, j, chi", pair_indexed("dK0_"),
               [](int ij, const VectorField& f, const OpParams& p) {
                 return derivative_intrinsic_apply(
                     f, [&](const Node& nd) { return nd.k * connection_vector(nd, p.chi); }, ij / 3, ij % 3);
               });

  add_joint("x", "x_j f = i d_j f - i alpha (k_j/k^2) f + (1/k^2)(k x S)_j f - a_j sigma f", "j, alpha, chi",
            indexed("x"), [](const VectorField& f, const OpParams& p) { return to_vector(position_apply(f, p.alpha, p.chi)); });
  add_joint("xc", "x_j f = k^alpha D i d_j (D^-1 k^-alpha f), D = R3(phi) R2(theta) R3(chi)", "j, alpha, chi",
            indexed("xc"),
            [](const VectorField& f, const OpParams& p) { return to_vector(position_conjugated_apply(f, p.alpha, p.chi)); });
  add_joint("xP", "xP_j f = i d_j f - (i/2)(k_j/k^2) f + (1/k^2)(k x S)_j f", "j", indexed("xP"),
            [](const VectorField& f, const OpParams&) { return to_vector(pryce_apply(f)); });
  add_joint("J", "J_i f = -i eps_{iab} k_a d_b f + S_i f", "i", indexed("J"),
            [](const VectorField& f, const OpParams&) { return to_vector(angular_momentum_apply(f)); });
  add_joint("K", "K_i f = i k d_i f + i (1/2 - alpha)(k_i/k) f + (e_k x S)_i f", "i, alpha", indexed("K"),
            [](const VectorField& f, const OpParams& p) { return to_vector(boost_apply(f, p.alpha)); });
  add_joint("L", "L1 = J2 + K1, L2 = -J1 + K2", "alpha", indexed("L", 2), [](const VectorField& f, const OpParams& p) {
    auto l = little_group_apply(f, p.alpha);
    return std::vector<VectorField>{std::move(l[0]), std::move(l[1])};
  });
  return c;
}

}  // namespace detail

inline const std::vector<OperatorFamily>& operator_catalogue() {
  static const std::vector<OperatorFamily> c = detail::build_catalogue();
  return c;
}

struct OperatorRef {
  const OperatorFamily* family;
  int member;
};

inline OperatorRef find_operator(const std::string& handle) {
  for (const auto& f : operator_catalogue())
    for (std::size_t m = 0; m < f.members.size(); ++m)
      if (f.members[m] == handle) return {&f, static_cast<int>(m)};
  throw std::invalid_argument("unknown operator handle: " + handle);
}

/// Applies a single handle; joint families compute all members and keep one.
inline VectorField apply_operator(const std::string& handle, const VectorField& f, const OpParams& p) {
  const OperatorRef r = find_operator(handle);
  if (r.family->joint()) return r.family->apply_all(f, p)[static_cast<std::size_t>(r.member)];
  return r.family->apply_one(r.member, f, p);
}

}  // namespace photonloc
