#pragma once

// Reports (JSON) and field exports (CSV). Output is deterministic: no
// timestamps, fixed key order, round-trip precision.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "photonloc/field.hpp"
#include "photonloc/verify.hpp"
#include "photonloc/xspace.hpp"

#ifndef PHOTONLOC_VERSION
#define PHOTONLOC_VERSION "1.0.0"
#endif

namespace photonloc {

using json = nlohmann::ordered_json;

inline std::string tool_version() { return PHOTONLOC_VERSION; }

inline json grid_json(const GridSpec& s) {
  return json{{"k_min", s.k_min},
              {"k_max", s.k_max},
              {"n_k", s.n_k},
              {"n_theta", s.n_theta},
              {"n_phi", s.n_phi},
              {"theta_cap", s.theta_cap},
              {"stencil_order", s.stencil_order},
              {"phi_derivative", s.phi_derivative == PhiDerivative::spectral ? "spectral" : "central"}};
}

/// Common header embedded in every output.
inline json provenance_json(const GridSpec& grid, std::uint64_t seed, const ThresholdTable& table) {
  return json{{"tool", "photonloc"},
              {"version", tool_version()},
              {"grid", grid_json(grid)},
              {"seed", seed},
              {"threshold_hash", table.hash()}};
}

/// Suite report: one entry per identity with the worst probe's residuals and
/// the per-probe breakdown.
inline json suite_json(const SuiteReport& r, const ThresholdTable& table) {
  json j = provenance_json(r.grid, r.config.seed, table);
  j["suite"] = r.suite;
  j["chi"] = r.config.chi.name();
  if (r.config.chi.is_twisted()) j["m"] = r.config.chi.m();
  j["alpha"] = r.config.alpha;
  j["probes"] = r.config.probes;
  json ids = json::array();
  std::map<std::string, std::size_t> slot;
  for (const auto& rep : r.reports) {
    if (!slot.count(rep.identity)) {
      slot[rep.identity] = ids.size();
      ids.push_back(json{{"name", rep.identity},
                         {"paper_ref", rep.formula},
                         {"group", rep.group},
                         {"derivative", rep.derivative},
                         {"abs", 0.0},
                         {"rel", 0.0},
                         {"threshold", rep.threshold},
                         {"pass", true},
                         {"probes", json::array()}});
    }
    json& e = ids[slot[rep.identity]];
    if (rep.rel >= e["rel"].get<double>()) {
      e["abs"] = rep.abs;
      e["rel"] = rep.rel;
    }
    e["pass"] = e["pass"].get<bool>() && rep.pass;
    e["probes"].push_back(json{{"probe", rep.probe},
                               {"abs", rep.abs},
                               {"rel", rep.rel},
                               {"lhs_norm", rep.lhs_norm},
                               {"rhs_norm", rep.rhs_norm},
                               {"probe_norm", rep.probe_norm},
                               {"components", {rep.component_abs[0], rep.component_abs[1], rep.component_abs[2]}}});
  }
  j["identities"] = ids;
  j["all_pass"] = r.all_pass;
  return j;
}

inline json convergence_json(const std::vector<ConvergenceReport>& reps) {
  json arr = json::array();
  for (const auto& c : reps) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(json{{"h", p.h}, {"nodes", p.nodes}, {"residual", p.residual}});
    json e{{"name", c.identity}, {"group", c.group}, {"derivative", c.derivative}, {"levels", pts}, {"exact", c.exact}};
    if (c.exact) {
      e["order"] = nullptr;
    } else {
      e["order"] = c.order;
      e["fit_residual"] = c.fit_residual;
    }
    e["extrapolated"] = c.extrapolated;
    arr.push_back(e);
  }
  return arr;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// CSV with `# key=value` metadata lines, then
/// k,theta,phi,re_1,im_1,re_2,im_2,re_3,im_3.
inline void write_field_csv(std::ostream& os, const VectorField& f, const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  os << "k,theta,phi,re_1,im_1,re_2,im_2,re_3,im_3\n";
  const SphericalGrid& g = *f.grid();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Node nd = g.node(n);
    const CVec3 v = f.at(n);
    os << format_double(nd.k) << ',' << format_double(nd.theta) << ',' << format_double(nd.phi);
    for (const auto& c : v) os << ',' << format_double(c.real()) << ',' << format_double(c.imag());
    os << '\n';
  }
}

/// Reads back a field CSV written by write_field_csv onto a grid of matching shape.
inline VectorField read_field_csv(std::istream& is, const GridPtr& grid) {
  VectorField f(grid);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 9) throw std::runtime_error("field csv: expected 9 columns");
    if (n >= grid->size()) throw std::runtime_error("field csv: more rows than grid nodes");
    f.set(n, {cplx(vals[3], vals[4]), cplx(vals[5], vals[6]), cplx(vals[7], vals[8])});
    ++n;
  }
  if (n != grid->size()) throw std::runtime_error("field csv: row count does not match grid");
  return f;
}

/// CSV: x1,x2,x3,re/im of the three components,|F|^2.
inline void write_profile_csv(std::ostream& os, const XProfile& p, const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
  os << "x1,x2,x3,re_1,im_1,re_2,im_2,re_3,im_3,intensity\n";
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    const Vec3& x = p.points[i];
    os << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(x[2]);
    for (const auto& c : p.values[i]) os << ',' << format_double(c.real()) << ',' << format_double(c.imag());
    os << ',' << format_double(p.intensity[i]) << '\n';
  }
}

inline std::vector<std::pair<std::string, std::string>> provenance_meta(const GridSpec& grid, std::uint64_t seed,
                                                                        const ThresholdTable& table) {
  std::string g = grid.to_config();
  for (auto& c : g)
    if (c == '\n') c = ';';
  return {{"tool", "photonloc"},
          {"version", tool_version()},
          {"grid", g},
          {"seed", std::to_string(seed)},
          {"threshold_hash", table.hash()}};
}

}  // namespace photonloc
