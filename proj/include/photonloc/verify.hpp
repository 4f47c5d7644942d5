#pragma once

// Commutator-residual engine: operator expressions, identity suites and
// convergence studies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "photonloc/catalogue.hpp"
#include "photonloc/testfield.hpp"
#include "photonloc/thresholds.hpp"

namespace photonloc {

// ---------------------------------------------------------------------------
// Expressions: sums of coefficient x word, a word being a composition of
// handles applied right to left.

struct Term {
  cplx coef{1.0, 0.0};
  std::vector<std::string> word;  // empty word = identity
};

struct Expr {
  std::vector<Term> terms;

  bool is_zero() const {
    return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.coef == cplx{}; });
  }
};

inline Expr op(const std::string& handle) {
  find_operator(handle);
  return Expr{{Term{{1.0, 0.0}, {handle}}}};
}
inline Expr unit() { return Expr{{Term{{1.0, 0.0}, {}}}}; }
inline Expr zero() { return Expr{}; }

inline Expr operator+(Expr a, const Expr& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}
inline Expr operator*(cplx s, Expr a) {
  for (auto& t : a.terms) t.coef *= s;
  return a;
}
inline Expr operator*(double s, Expr a) { return cplx(s, 0.0) * std::move(a); }
inline Expr operator-(Expr a, const Expr& b) { return std::move(a) + (-1.0) * b; }

/// Composition a o b.
inline Expr operator*(const Expr& a, const Expr& b) {
  Expr r;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      Term t{ta.coef * tb.coef, ta.word};
      t.word.insert(t.word.end(), tb.word.begin(), tb.word.end());
      r.terms.push_back(std::move(t));
    }
  return r;
}

inline Expr comm(const Expr& a, const Expr& b) { return a * b - b * a; }

inline bool expr_has_derivative(const Expr& e) {
  for (const auto& t : e.terms)
    for (const auto& h : t.word)
      if (find_operator(h).family->derivative) return true;
  return false;
}

/// Evaluates expressions on one probe. Applications to the probe itself are
/// kept; deeper intermediates live in a bounded FIFO cache.
class Evaluator {
 public:
  Evaluator(VectorField f, OpParams params, std::size_t transient_capacity = 24)
      : f_(std::move(f)), params_(std::move(params)), capacity_(transient_capacity) {}

  const VectorField& probe() const { return f_; }

  VectorField eval(const Expr& e) {
    VectorField out(f_.grid());
    for (const auto& t : e.terms) {
      if (t.coef == cplx{}) continue;
      out.axpy(t.coef, value(t.word, 0));
    }
    return out;
  }

 private:
  static std::string key(const std::vector<std::string>& w, std::size_t start) {
    std::string k;
    for (std::size_t i = start; i < w.size(); ++i) {
      if (!k.empty()) k += ' ';
      k += w[i];
    }
    return k;
  }

  const VectorField& value(const std::vector<std::string>& w, std::size_t start) {
    if (start == w.size()) return f_;
    const std::string k = key(w, start);
    if (auto it = cache_.find(k); it != cache_.end()) return it->second;
    const VectorField arg = value(w, start + 1);
    const std::string tail = key(w, start + 1);
    const bool persistent = start + 1 == w.size();
    const OperatorRef ref = find_operator(w[start]);
    if (ref.family->joint()) {
      auto all = ref.family->apply_all(arg, params_);
      for (std::size_t m = 0; m < all.size(); ++m) {
        const std::string mk = tail.empty() ? ref.family->members[m] : ref.family->members[m] + ' ' + tail;
        store(mk, std::move(all[m]), persistent);
      }
    } else {
      store(k, ref.family->apply_one(ref.member, arg, params_), persistent);
    }
    return cache_.at(k);
  }

  void store(const std::string& k, VectorField v, bool persistent) {
    if (cache_.count(k)) return;
    if (!persistent) {
      order_.push_back(k);
      while (order_.size() > capacity_) {
        cache_.erase(order_.front());
        order_.pop_front();
      }
    }
    cache_.emplace(k, std::move(v));
  }

  VectorField f_;
  OpParams params_;
  std::size_t capacity_;
  std::map<std::string, VectorField> cache_;
  std::deque<std::string> order_;
};

// ---------------------------------------------------------------------------
// Identities and reports.

struct IdentitySpec {
  std::string name;
  std::string formula;  // human-readable statement, reported as "paper_ref"
  std::string group;    // threshold-table key
  Expr lhs;
  Expr rhs;
};

struct ResidualReport {
  std::string identity;
  std::string formula;
  std::string group;
  std::string probe;
  double abs = 0.0;
  double rel = 0.0;
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  double probe_norm = 0.0;
  std::array<double, 3> component_abs{};
  bool derivative = true;
  double threshold = 0.0;
  bool pass = false;
  GridSpec grid;
};

namespace detail {

/// Windowed probes must vanish within stencil_order/2 nodes of the k and
/// theta boundaries.
inline void check_window_preconditions(const VectorField& f) {
  if (!f.info().windowed) return;
  const SphericalGrid& g = *f.grid();
  const int margin = g.spec().stencil_order / 2;
  const double scale = max_abs(f);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.interior(n, margin)) continue;
    if (norm(f.at(n)) > 1e-12 * scale)
      throw std::invalid_argument("windowed probe does not vanish near the grid boundary");
  }
}

}  // namespace detail

/// Evaluates (LHS - RHS) f. The relative residual divides by |f| for a zero
/// RHS and by max(|LHS f|, |RHS f|) otherwise; norms use the grid quadrature.
inline ResidualReport identity_residual(const IdentitySpec& id, Evaluator& ev, const std::string& probe_desc,
                                        const ThresholdTable& table) {
  const VectorField& f = ev.probe();
  detail::check_window_preconditions(f);
  const VectorField l = ev.eval(id.lhs);
  const VectorField r = ev.eval(id.rhs);
  if (!l.same_shape(r) || !l.same_shape(f)) throw std::invalid_argument("identity: shape mismatch");
  const VectorField d = l - r;
  ResidualReport rep;
  rep.identity = id.name;
  rep.formula = id.formula;
  rep.group = id.group;
  rep.probe = probe_desc;
  rep.grid = f.grid()->spec();
  rep.abs = l2_norm(d);
  rep.lhs_norm = l2_norm(l);
  rep.rhs_norm = l2_norm(r);
  rep.probe_norm = l2_norm(f);
  for (int j = 0; j < 3; ++j) rep.component_abs[static_cast<std::size_t>(j)] = l2_norm_component(d, j);
  // An RHS that vanishes on this probe (e.g. d_j of a component that is
  // constant for the chosen chi) counts as zero.
  const bool rhs_zero = id.rhs.is_zero() || rep.rhs_norm <= 1e-10 * rep.probe_norm;
  const double den = rhs_zero ? rep.probe_norm : std::max(rep.lhs_norm, rep.rhs_norm);
  rep.rel = den > 0.0 ? rep.abs / den : rep.abs;
  rep.derivative = expr_has_derivative(id.lhs) || expr_has_derivative(id.rhs);
  const std::string group = rep.derivative ? id.group : std::string("exact");
  rep.threshold = table.for_grid(group, rep.grid, rep.derivative);
  rep.pass = rep.rel < rep.threshold;
  return rep;
}

/// Residual of [A, B] f - expected f for single handles A, B.
inline ResidualReport commutator_residual(const std::string& a, const std::string& b, const Expr& expected,
                                          const VectorField& f, const OpParams& params,
                                          const ThresholdTable& table = ThresholdTable(), std::string group = "exact") {
  IdentitySpec id{"[" + a + "," + b + "]", "[" + a + "," + b + "] = expected", std::move(group), comm(op(a), op(b)),
                  expected};
  Evaluator ev(f, params);
  return identity_residual(id, ev, "supplied field", table);
}

// ---------------------------------------------------------------------------
// Suites.

namespace detail {

inline std::string idx(int i) { return std::to_string(i + 1); }

/// Third index k and sign eps_{ijk} for i != j (0-based).
inline std::pair<int, int> complete(int i, int j) {
  const int k = 3 - i - j;
  return {k, levi_civita(i, j, k)};
}

inline std::string signed_i(int s) { return s > 0 ? "i" : "-i"; }

}  // namespace detail

struct SuiteInfo {
  std::string id;
  std::string description;
  bool requires_twisted = false;
};

inline const std::vector<SuiteInfo>& suite_list() {
  static const std::vector<SuiteInfo> s{
      {"position", "[x_i,x_j]=0, [x_i,k_j]=i delta_ij, [x_i,k]=i k_i/k, [x_i,sigma]=0", false},
      {"poincare", "Poincare algebra of J, K, P, H", false},
      {"little-group", "[L1,L2]=0, [J3,L1]=iL2, [J3,L2]=-iL1", false},
      {"e2", "[x1,x2]=0, [J3,x1]=i x2, [J3,x2]=-i x1 (twisted basis)", true},
      {"pryce", "Pryce commutators", false},
      {"rotation-boost-x", "[J_i,x_j] and [K_i,x_j] with axis-rotation terms", false},
      {"decomposition", "J and K split into extrinsic and intrinsic parts", false},
      {"velocity", "[x,H]/i = e_k", false},
      {"intrinsic-J3", "J3^(0,a) = sigma m on single-helicity probes (twisted basis)", true},
      {"position-eigen", "x c = x c for position eigenvectors", false},
      {"conjugation", "direct and conjugated position operators agree", false},
  };
  return s;
}

inline const SuiteInfo& find_suite(const std::string& id) {
  for (const auto& s : suite_list())
    if (s.id == id) return s;
  throw std::invalid_argument("unknown suite: " + id);
}

/// Identity list of a suite. `chi` supplies m for the intrinsic-J3 suite; the
/// position-eigen suite has one identity per component, applied to eigenvector probes.
inline std::vector<IdentitySpec> suite_identities(const std::string& suite, const ChiConvention& chi) {
  using detail::idx;
  std::vector<IdentitySpec> out;
  const cplx i1 = kI;
  auto add = [&](std::string name, std::string formula, std::string group, Expr lhs, Expr rhs) {
    out.push_back({std::move(name), std::move(formula), std::move(group), std::move(lhs), std::move(rhs)});
  };
  if (suite == "position") {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        add("[x" + idx(i) + ",x" + idx(j) + "]=0", "[x_i, x_j] = 0", "position.xx", comm(op("x" + idx(i)), op("x" + idx(j))),
            zero());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        add("[x" + idx(i) + ",k" + idx(j) + "]=" + (i == j ? "i" : "0"), "[x_i, k_j] = i delta_ij", "position.xP",
            comm(op("x" + idx(i)), op("P" + idx(j))), i == j ? i1 * unit() : zero());
    for (int i = 0; i < 3; ++i)
      add("[x" + idx(i) + ",k]=i k" + idx(i) + "/k", "[x_i, k] = i k_i / k", "position.xH", comm(op("x" + idx(i)), op("H")),
          i1 * op("khat" + idx(i)));
    for (int i = 0; i < 3; ++i)
      add("[x" + idx(i) + ",sigma]=0", "[x_i, sigma] = 0", "position.xsigma", comm(op("x" + idx(i)), op("sigma")), zero());
  } else if (suite == "poincare") {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const auto [k, s] = detail::complete(i, j);
        add("[J" + idx(i) + ",J" + idx(j) + "]=" + detail::signed_i(s) + "J" + idx(k), "[J_i, J_j] = i eps_ijk J_k",
            "poincare.JJ", comm(op("J" + idx(i)), op("J" + idx(j))), cplx(0.0, s) * op("J" + idx(k)));
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) {
          add("[J" + idx(i) + ",K" + idx(j) + "]=0", "[J_i, K_j] = i eps_ijk K_k", "poincare.JK",
              comm(op("J" + idx(i)), op("K" + idx(j))), zero());
        } else {
          const auto [k, s] = detail::complete(i, j);
          add("[J" + idx(i) + ",K" + idx(j) + "]=" + detail::signed_i(s) + "K" + idx(k), "[J_i, K_j] = i eps_ijk K_k",
              "poincare.JK", comm(op("J" + idx(i)), op("K" + idx(j))), cplx(0.0, s) * op("K" + idx(k)));
        }
      }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const auto [k, s] = detail::complete(i, j);
        add("[K" + idx(i) + ",K" + idx(j) + "]=" + detail::signed_i(-s) + "J" + idx(k), "[K_i, K_j] = -i eps_ijk J_k",
            "poincare.KK", comm(op("K" + idx(i)), op("K" + idx(j))), cplx(0.0, -s) * op("J" + idx(k)));
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) {
          add("[J" + idx(i) + ",P" + idx(j) + "]=0", "[J_i, P_j] = i eps_ijk P_k", "poincare.JP",
              comm(op("J" + idx(i)), op("P" + idx(j))), zero());
        } else {
          const auto [k, s] = detail::complete(i, j);
          add("[J" + idx(i) + ",P" + idx(j) + "]=" + detail::signed_i(s) + "P" + idx(k), "[J_i, P_j] = i eps_ijk P_k",
              "poincare.JP", comm(op("J" + idx(i)), op("P" + idx(j))), cplx(0.0, s) * op("P" + idx(k)));
        }
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        add("[K" + idx(i) + ",P" + idx(j) + "]=" + (i == j ? "iH" : "0"), "[K_i, P_j] = i delta_ij H", "poincare.KP",
            comm(op("K" + idx(i)), op("P" + idx(j))), i == j ? i1 * op("H") : zero());
    for (int i = 0; i < 3; ++i)
      add("[K" + idx(i) + ",H]=iP" + idx(i), "[K_i, H] = i P_i", "poincare.KH", comm(op("K" + idx(i)), op("H")),
          i1 * op("P" + idx(i)));
    for (int i = 0; i < 3; ++i)
      add("[J" + idx(i) + ",H]=0", "[J_i, H] = 0", "poincare.JH", comm(op("J" + idx(i)), op("H")), zero());
    for (int i = 0; i < 3; ++i)
      add("[P" + idx(i) + ",H]=0", "[P_i, H] = 0", "exact", comm(op("P" + idx(i)), op("H")), zero());
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        add("[P" + idx(i) + ",P" + idx(j) + "]=0", "[P_i, P_j] = 0", "exact", comm(op("P" + idx(i)), op("P" + idx(j))),
            zero());
  } else if (suite == "little-group") {
    add("[L1,L2]=0", "[L1, L2] = 0", "little.L1L2", comm(op("L1"), op("L2")), zero());
    add("[J3,L1]=iL2", "[J3, L1] = i L2", "little.J3L", comm(op("J3"), op("L1")), i1 * op("L2"));
    add("[J3,L2]=-iL1", "[J3, L2] = -i L1", "little.J3L", comm(op("J3"), op("L2")), -i1 * op("L1"));
  } else if (suite == "e2") {
    if (!chi.is_twisted()) throw std::invalid_argument("suite e2 requires a twisted chi convention");
    add("[x1,x2]=0", "[x1, x2] = 0", "e2.x1x2", comm(op("x1"), op("x2")), zero());
    add("[J3,x1]=ix2", "[J3, x1] = i x2", "e2.J3x", comm(op("J3"), op("x1")), i1 * op("x2"));
    add("[J3,x2]=-ix1", "[J3, x2] = -i x1", "e2.J3x", comm(op("J3"), op("x2")), -i1 * op("x1"));
  } else if (suite == "pryce") {
    add("[xP1,xP2]=-i sigma k3/k^3", "[xP1, xP2] = -i sigma k3 / k^3  (xP x xP = -i sigma k / k^3)", "pryce.xPxP",
        comm(op("xP1"), op("xP2")), -i1 * op("sk3_3"));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const std::string name = "[J" + idx(i) + ",xP" + idx(j) + "]";
        if (i == j) {
          add(name + "=0", "[J_i, xP_j] = i eps_ijk xP_k", "pryce.JxP", comm(op("J" + idx(i)), op("xP" + idx(j))), zero());
        } else {
          const auto [k, s] = detail::complete(i, j);
          add(name + "=" + detail::signed_i(s) + "xP" + idx(k), "[J_i, xP_j] = i eps_ijk xP_k", "pryce.JxP",
              comm(op("J" + idx(i)), op("xP" + idx(j))), cplx(0.0, s) * op("xP" + idx(k)));
        }
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const Expr xi = op("xP" + idx(i)), kj = op("khat" + idx(j));
        Expr rhs = (-0.5 * i1) * (kj * xi + xi * kj);
        if (i != j) {
          const auto [k, s] = detail::complete(i, j);
          rhs = rhs + cplx(0.0, -s) * op("sk2_" + idx(k));
        }
        add("[K" + idx(i) + ",xP" + idx(j) + "]",
            "[K_i, xP_j] = -(i/2)((k_j/k) xP_i + xP_i k_j/k) - i sigma eps_ijk k_k/k^2", "pryce.KxP",
            comm(op("K" + idx(i)), op("xP" + idx(j))), rhs);
      }
  } else if (suite == "rotation-boost-x") {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Expr rhs = (-i1) * op("dJ0_" + idx(i) + idx(j));
        if (i != j) {
          const auto [k, s] = detail::complete(i, j);
          rhs = rhs + cplx(0.0, s) * op("x" + idx(k));
        }
        add("[J" + idx(i) + ",x" + idx(j) + "]", "[J_i, x_j] = i eps_ijk x_k - i d_j J^(0,a)_i", "rbx.Jx",
            comm(op("J" + idx(i)), op("x" + idx(j))), rhs);
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const Expr xi = op("x" + idx(i)), kj = op("khat" + idx(j));
        const Expr rhs = (-0.5 * i1) * (kj * xi + xi * kj) - i1 * op("dK0_" + idx(i) + idx(j));
        add("[K" + idx(i) + ",x" + idx(j) + "]", "[K_i, x_j] = -(i/2)((k_j/k) x_i + x_i k_j/k) - i d_j K^(0,a)_i",
            "rbx.Kx", comm(op("K" + idx(i)), op("x" + idx(j))), rhs);
      }
  } else if (suite == "decomposition") {
    for (int i = 0; i < 3; ++i) {
      Expr ext, extP;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int e = levi_civita(i, a, b);
          if (e == 0) continue;
          ext = ext + static_cast<double>(e) * (op("x" + idx(a)) * op("P" + idx(b)));
          extP = extP + static_cast<double>(e) * (op("xP" + idx(a)) * op("P" + idx(b)));
        }
      add("J" + idx(i) + "=(x x k)" + idx(i) + "+J0_" + idx(i), "J = x x k + J^(0,a)", "decomp.J", op("J" + idx(i)),
          ext + op("J0_" + idx(i)));
      add("K" + idx(i) + "=(k x" + idx(i) + "+x" + idx(i) + " k)/2+K0_" + idx(i), "K = (k x + x k)/2 + K^(0,a)",
          "decomp.K", op("K" + idx(i)),
          0.5 * (op("H") * op("x" + idx(i)) + op("x" + idx(i)) * op("H")) + op("K0_" + idx(i)));
      add("J" + idx(i) + "=(xP x k)" + idx(i) + "+sigma k" + idx(i) + "/k", "J = xP x k + sigma e_k", "decomp.JP",
          op("J" + idx(i)), extP + op("khat" + idx(i)) * op("sigma"));
    }
  } else if (suite == "velocity") {
    for (int j = 0; j < 3; ++j)
      add("[x" + idx(j) + ",H]/i=k" + idx(j) + "/k", "[x, H]/i = e_k", "velocity",
          (-i1) * comm(op("x" + idx(j)), op("H")), op("khat" + idx(j)));
  } else if (suite == "intrinsic-J3") {
    if (!chi.is_twisted()) throw std::invalid_argument("suite intrinsic-J3 requires a twisted chi convention");
    add("J0_3=sigma m", "J3^(0,-m phi) = sigma m", "intrinsic.J3", op("J0_3"),
        static_cast<double>(chi.m()) * op("sigma"));
  } else if (suite == "position-eigen") {
    throw std::invalid_argument("position-eigen identities depend on the eigenvector label; use eigen_identities");
  } else if (suite == "conjugation") {
    for (int j = 0; j < 3; ++j)
      add("x" + idx(j) + "=xc" + idx(j), "x = k^alpha D i d_k D^-1 k^-alpha", "conjugation", op("x" + idx(j)),
          op("xc" + idx(j)));
  } else {
    find_suite(suite);
  }
  return out;
}

inline std::vector<IdentitySpec> eigen_identities(const Vec3& x) {
  std::vector<IdentitySpec> out;
  for (int j = 0; j < 3; ++j) {
    const std::string h = "x" + detail::idx(j);
    std::ostringstream nm;
    nm << h << " c = " << x[static_cast<std::size_t>(j)] << " c";
    out.push_back({nm.str(), "x c_{sigma x} = x c_{sigma x}", "eigen", op(h), x[static_cast<std::size_t>(j)] * unit()});
  }
  return out;
}

struct SuiteConfig {
  std::string suite;
  double alpha = 0.0;
  ChiConvention chi{};
  std::uint64_t seed = 1;
  int probes = 3;
};

struct SuiteReport {
  std::string suite;
  SuiteConfig config;
  GridSpec grid;
  std::vector<ResidualReport> reports;
  bool all_pass = true;
};

struct EigenLabel {
  Vec3 x;
  int sigma;
};

inline std::vector<EigenLabel> default_eigen_labels() {
  std::vector<EigenLabel> v;
  for (const Vec3& x : {Vec3{0.0, 0.0, 0.0}, Vec3{1.0, 0.0, 0.0}, Vec3{0.3, -0.7, 0.2}})
    for (int s : {1, -1}) v.push_back({x, s});
  return v;
}

inline std::string describe_probe(std::uint64_t seed, int index, const ProbeOptions& opt) {
  std::ostringstream os;
  os << "random seed=" << seed << " index=" << index << " nu={";
  for (std::size_t i = 0; i < opt.nus.size(); ++i) os << (i ? "," : "") << opt.nus[i];
  os << "} helicity="
     << (opt.helicity == ProbeHelicity::both ? "both" : opt.helicity == ProbeHelicity::plus ? "plus" : "minus");
  return os.str();
}

/// Runs every identity of a suite on `probes` random probes (both helicities,
/// nu in {0, 1, 3}); intrinsic-J3 uses single-helicity probes of each sign and
/// position-eigen uses the eigenvectors of default_eigen_labels().
inline SuiteReport run_suite(const SuiteConfig& cfg, const GridPtr& grid, const ThresholdTable& table = ThresholdTable()) {
  const SuiteInfo& info = find_suite(cfg.suite);
  if (info.requires_twisted && !cfg.chi.is_twisted())
    throw std::invalid_argument("suite " + cfg.suite + " requires a twisted chi convention");
  if (cfg.probes < 1) throw std::invalid_argument("run_suite: need at least one probe");
  SuiteReport rep;
  rep.suite = cfg.suite;
  rep.config = cfg;
  rep.grid = grid->spec();
  // The Pryce operator is the alpha = 1/2 member of the family; its boosts use that frame too.
  OpParams params{cfg.suite == "pryce" ? 0.5 : cfg.alpha, cfg.chi};

  auto run_probe = [&](const std::vector<IdentitySpec>& ids, VectorField f, const std::string& desc) {
    Evaluator ev(std::move(f), params);
    for (const auto& id : ids) {
      rep.reports.push_back(identity_residual(id, ev, desc, table));
      rep.all_pass = rep.all_pass && rep.reports.back().pass;
    }
  };

  if (cfg.suite == "position-eigen") {
    for (const auto& lab : default_eigen_labels()) {
      EigenvectorLabels el;
      el.x = lab.x;
      el.sigma = lab.sigma;
      el.alpha = cfg.alpha;
      std::ostringstream d;
      d << "eigenvector x=(" << lab.x[0] << "," << lab.x[1] << "," << lab.x[2] << ") sigma=" << lab.sigma;
      run_probe(eigen_identities(lab.x), position_eigenvector(grid, el, cfg.chi), d.str());
    }
    return rep;
  }

  const auto ids = suite_identities(cfg.suite, cfg.chi);
  for (int p = 0; p < cfg.probes; ++p) {
    std::vector<ProbeOptions> opts(1);
    if (cfg.suite == "intrinsic-J3") {
      opts.resize(2);
      opts[0].helicity = ProbeHelicity::plus;
      opts[1].helicity = ProbeHelicity::minus;
    }
    for (const auto& o : opts) run_probe(ids, random_probe(grid, cfg.chi, cfg.seed, p, o), describe_probe(cfg.seed, p, o));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence studies.

struct ConvergencePoint {
  double h;  // k spacing
  std::size_t nodes;
  double residual;  // worst relative residual over probes
};

struct ConvergenceReport {
  std::string identity;
  std::string group;
  bool derivative = true;
  std::vector<ConvergencePoint> points;
  bool exact = false;           // every residual below 1e-12
  double order = 0.0;           // least-squares log-log slope
  double fit_residual = 0.0;    // rms deviation of log residual from the fit
  double extrapolated = 0.0;    // fitted residual at the finest grid
};

inline std::size_t node_budget() {
  if (const char* s = std::getenv("PHOTONLOC_NODE_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw std::invalid_argument("PHOTONLOC_NODE_BUDGET must be a positive integer");
  }
  return 4'000'000;
}

/// Slope and intercept of least squares y = c + p x, with rms residual.
struct LineFit {
  double slope, intercept, rms;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double c = (sy - p * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - (c + p * x[i]), 2);
  return {p, c, std::sqrt(ss / n)};
}

/// Reruns a suite on `levels` grids, each halving every spacing of the
/// previous one, and fits the convergence order of each identity.
inline std::vector<ConvergenceReport> convergence_study(const SuiteConfig& cfg, const GridSpec& base, int levels,
                                                        const ThresholdTable& table = ThresholdTable()) {
  if (levels < 3) throw std::invalid_argument("convergence study needs at least 3 levels");
  std::vector<GridSpec> specs{base};
  for (int l = 1; l < levels; ++l) specs.push_back(specs.back().refined());
  if (specs.back().node_count() > node_budget())
    throw std::runtime_error("convergence study: finest grid has " + std::to_string(specs.back().node_count()) +
                             " nodes, above the node budget (PHOTONLOC_NODE_BUDGET=" + std::to_string(node_budget()) + ")");
  std::vector<ConvergenceReport> out;
  std::map<std::string, std::size_t> slot;
  for (const auto& spec : specs) {
    const GridPtr g = build_grid(spec);
    const SuiteReport sr = run_suite(cfg, g, table);
    std::map<std::string, double> worst;
    for (const auto& r : sr.reports) {
      if (!slot.count(r.identity)) {
        slot[r.identity] = out.size();
        out.push_back({r.identity, r.group, r.derivative, {}, false, 0.0, 0.0, 0.0});
      }
      worst[r.identity] = std::max(worst[r.identity], r.rel);
    }
    for (const auto& [name, w] : worst) out[slot[name]].points.push_back({g->h_k(), spec.node_count(), w});
  }
  for (auto& c : out) {
    c.exact = std::all_of(c.points.begin(), c.points.end(), [](const ConvergencePoint& p) { return p.residual < 1e-12; });
    if (c.exact) {
      c.extrapolated = c.points.back().residual;
      continue;
    }
    std::vector<double> lx, ly;
    for (const auto& p : c.points) {
      lx.push_back(std::log(p.h));
      ly.push_back(std::log(std::max(p.residual, 1e-300)));
    }
    const LineFit f = fit_line(lx, ly);
    c.order = f.slope;
    c.fit_residual = f.rms;
    c.extrapolated = std::exp(f.intercept + f.slope * lx.back());
  }
  return out;
}

}  // namespace photonloc
