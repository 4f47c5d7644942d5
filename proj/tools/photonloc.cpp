// photonloc: command-line driver for the identity suites, Berry-phase
// computations, eigenvector export and configuration-space synthesis.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "photonloc/berry.hpp"
#include "photonloc/io.hpp"
#include "photonloc/verify.hpp"
#include "photonloc/xspace.hpp"

using namespace photonloc;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GridSpec grid_from(const std::string& path) { return path.empty() ? reference_grid_spec() : load_grid_config(path); }

ThresholdTable thresholds_from(const std::string& path) {
  return path.empty() ? ThresholdTable() : ThresholdTable::load(path);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

std::vector<std::string> suite_ids() {
  std::vector<std::string> v;
  for (const auto& s : suite_list()) v.push_back(s.id);
  return v;
}

Vec3 parse_vec3(const std::string& s) {
  std::istringstream is(s);
  Vec3 v{};
  char sep = 0;
  if (!(is >> v[0] >> sep >> v[1] >> sep >> v[2]) || sep != ',') throw UsageError("expected x,y,z: " + s);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photonloc: photon position operator and Berry-phase laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  app.footer("Environment: PHOTONLOC_NODE_BUDGET caps the finest grid of a convergence study (default 4000000 nodes).");

  // verify
  std::string suite, grid_path, out_path, thr_path;
  int m = 1, probes = 3, sigma = 1, levels = 3;
  double alpha = 0.5;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "run an identity suite; exit 0 iff every identity passes");
  verify->add_option("--suite", suite, "suite id")->required()->check(CLI::IsMember(suite_ids()));
  verify->add_option("--m", m, "twisted-basis index (chi = -m phi)")->capture_default_str();
  verify->add_option("--alpha", alpha, "normalisation exponent")->capture_default_str();
  verify->add_option("--grid", grid_path, "grid config (key=value); reference grid if omitted")->check(CLI::ExistingFile);
  verify->add_option("--seed", seed, "probe seed")->capture_default_str();
  verify->add_option("--probes", probes, "number of random probes")->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--thresholds", thr_path, "threshold table override")->check(CLI::ExistingFile);
  verify->add_option("--out", out_path, "JSON report path (stdout if omitted)");

  // convergence
  bool calibrate = false;
  auto* conv = app.add_subcommand("convergence", "refine a base grid and fit convergence orders");
  conv->add_option("--suite", suite, "suite id")->required()->check(CLI::IsMember(suite_ids()));
  conv->add_option("--m", m, "twisted-basis index")->capture_default_str();
  conv->add_option("--alpha", alpha, "normalisation exponent")->capture_default_str();
  conv->add_option("--grid", grid_path, "base grid config")->check(CLI::ExistingFile);
  conv->add_option("--levels", levels, "refinement levels (>= 3)")->capture_default_str()->check(CLI::Range(3, 8));
  conv->add_option("--seed", seed, "probe seed")->capture_default_str();
  conv->add_option("--probes", probes, "number of random probes")->capture_default_str()->check(CLI::PositiveNumber);
  conv->add_option("--thresholds", thr_path, "threshold table override")->check(CLI::ExistingFile);
  conv->add_flag("--calibrate", calibrate, "print threshold-table lines (3 x extrapolated residual per group)");
  conv->add_option("--out", out_path, "JSON report path (stdout if omitted)");

  // berry
  auto* berry = app.add_subcommand("berry", "Berry connection quantities");
  berry->require_subcommand(1);
  double theta = kPi / 2, kval = 1.0;
  int samples = 256;
  auto* loop = berry->add_subcommand("loop", "latitude-circle loop phase -closed integral of a . dk");
  loop->add_option("--theta", theta, "polar angle of the circle (rad)")->required();
  loop->add_option("--m", m, "twisted-basis index")->capture_default_str();
  loop->add_option("--k", kval, "radius in k")->capture_default_str();
  loop->add_option("--samples", samples, "trapezoid samples")->capture_default_str()->check(CLI::Range(2, 1 << 24));
  loop->add_option("--out", out_path, "CSV path (stdout if omitted)");
  auto* curv = berry->add_subcommand("curvature", "residual of curl a + e_k / k^2 on a grid");
  curv->add_option("--m", m, "twisted-basis index")->capture_default_str();
  curv->add_option("--grid", grid_path, "grid config")->check(CLI::ExistingFile);
  curv->add_option("--out", out_path, "JSON path (stdout if omitted)");

  // eigenvector
  std::string x_text = "0,0,0";
  double t = 0.0;
  auto* eig = app.add_subcommand("eigenvector", "export a position eigenvector as CSV");
  eig->add_option("--x", x_text, "position x,y,z")->capture_default_str();
  eig->add_option("--t", t, "time")->capture_default_str();
  eig->add_option("--sigma", sigma, "helicity")->capture_default_str()->check(CLI::IsMember({-1, 1}));
  eig->add_option("--m", m, "twisted-basis index")->capture_default_str();
  eig->add_option("--alpha", alpha, "normalisation exponent")->capture_default_str();
  eig->add_option("--grid", grid_path, "grid config")->check(CLI::ExistingFile);
  eig->add_option("--out", out_path, "CSV path (stdout if omitted)");

  // xspace
  std::string measure = "trivial", sweep = "axial";
  double r_max = 0.0;
  int n_samples = 200;
  auto* xs = app.add_subcommand("xspace", "synthesize an eigenvector in configuration space along a sweep");
  xs->add_option("--alpha", alpha, "normalisation exponent")->capture_default_str();
  xs->add_option("--m", m, "twisted-basis index")->capture_default_str();
  xs->add_option("--sigma", sigma, "helicity")->capture_default_str()->check(CLI::IsMember({-1, 1}));
  xs->add_option("--x", x_text, "eigenvector position x,y,z (sweep centre)")->capture_default_str();
  xs->add_option("--t", t, "time")->capture_default_str();
  xs->add_option("--measure", measure, "trivial|invariant")->capture_default_str()->check(CLI::IsMember({"trivial", "invariant"}));
  xs->add_option("--sweep", sweep, "radial (along e1) or axial (along e3)")->capture_default_str()->check(CLI::IsMember({"radial", "axial"}));
  xs->add_option("--samples", n_samples, "sweep intervals")->capture_default_str()->check(CLI::Range(2, 100000));
  xs->add_option("--rmax", r_max, "sweep length (default: 0.8 x alias-free radius)");
  xs->add_option("--grid", grid_path, "grid config")->check(CLI::ExistingFile);
  xs->add_option("--out", out_path, "CSV path (stdout if omitted)");

  // ops
  auto* ops = app.add_subcommand("ops", "operator catalogue");
  ops->require_subcommand(1);
  auto* ops_list = ops->add_subcommand("list", "list operator families, formulas and parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (verify->parsed()) {
      const ThresholdTable table = thresholds_from(thr_path);
      const GridPtr g = build_grid(grid_from(grid_path));
      SuiteConfig cfg{suite, alpha, ChiConvention::twisted(m), seed, probes};
      const SuiteReport rep = run_suite(cfg, g, table);
      emit(out_path, suite_json(rep, table).dump(2) + "\n");
      return rep.all_pass ? kExitPass : kExitFail;
    }
    if (conv->parsed()) {
      const ThresholdTable table = thresholds_from(thr_path);
      const GridSpec base = grid_from(grid_path);
      SuiteConfig cfg{suite, alpha, ChiConvention::twisted(m), seed, probes};
      const auto reps = convergence_study(cfg, base, levels, table);
      json j = provenance_json(base, seed, table);
      j["suite"] = suite;
      j["m"] = m;
      j["alpha"] = alpha;
      j["levels"] = levels;
      j["identities"] = convergence_json(reps);
      if (calibrate) {
        std::map<std::string, double> worst;
        for (const auto& c : reps) {
          const std::string grp = c.derivative ? c.group : "exact";
          worst[grp] = std::max(worst[grp], 3.0 * c.extrapolated);
        }
        json cal = json::object();
        for (const auto& [k, v] : worst) cal[k] = v;
        j["calibration"] = cal;
      }
      emit(out_path, j.dump(2) + "\n");
      return kExitPass;
    }
    if (loop->parsed()) {
      const ChiConvention chi = ChiConvention::twisted(m);
      const LoopPhase ph = loop_phase(BerryLoop::latitude(kval, theta, samples), chi);
      std::ostringstream os;
      for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{
               {"tool", "photonloc"}, {"version", tool_version()}, {"k", format_double(kval)},
               {"samples", std::to_string(samples)}, {"threshold_hash", ThresholdTable().hash()}})
        os << "# " << k << '=' << v << '\n';
      os << "theta,m,raw_phase,reduced_phase,closed_form\n";
      os << format_double(theta) << ',' << m << ',' << format_double(ph.raw) << ',' << format_double(ph.reduced) << ','
         << format_double(kTwoPi * (1.0 - std::cos(theta))) << '\n';
      emit(out_path, os.str());
      return kExitPass;
    }
    if (curv->parsed()) {
      const GridSpec spec = grid_from(grid_path);
      const CurvatureReport r = curvature_residual(build_grid(spec), ChiConvention::twisted(m));
      json j = provenance_json(spec, 0, ThresholdTable());
      j["m"] = m;
      j["max_residual"] = r.max_residual;
      j["mean_residual"] = r.mean_residual;
      j["nodes"] = r.nodes;
      emit(out_path, j.dump(2) + "\n");
      return kExitPass;
    }
    if (eig->parsed()) {
      const GridSpec spec = grid_from(grid_path);
      EigenvectorLabels lab;
      lab.x = parse_vec3(x_text);
      lab.t = t;
      lab.sigma = sigma;
      lab.alpha = alpha;
      const VectorField c = position_eigenvector(build_grid(spec), lab, ChiConvention::twisted(m));
      auto meta = provenance_meta(spec, 0, ThresholdTable());
      meta.push_back({"x", x_text});
      meta.push_back({"t", format_double(t)});
      meta.push_back({"sigma", std::to_string(sigma)});
      meta.push_back({"m", std::to_string(m)});
      meta.push_back({"alpha", format_double(alpha)});
      std::ostringstream os;
      write_field_csv(os, c, meta);
      emit(out_path, os.str());
      return kExitPass;
    }
    if (xs->parsed()) {
      const GridSpec spec = grid_from(grid_path);
      const GridPtr g = build_grid(spec);
      EigenvectorLabels lab;
      lab.x = parse_vec3(x_text);
      lab.sigma = sigma;
      lab.alpha = alpha;
      const VectorField c = position_eigenvector(g, lab, ChiConvention::twisted(m));
      const bool axial = sweep == "axial";
      const double rm = r_max > 0.0 ? r_max : 0.8 * alias_free_radius(*g, axial);
      const auto pts = radial_sweep(lab.x, axial ? Vec3{0, 0, 1} : Vec3{1, 0, 0}, rm, n_samples);
      const XProfile prof = synthesize(c, parse_measure(measure), pts, t);
      const LocalizationMetrics lm = localization_metrics(prof, lab.x);
      auto meta = provenance_meta(spec, 0, ThresholdTable());
      meta.push_back({"x", x_text});
      meta.push_back({"t", format_double(t)});
      meta.push_back({"sigma", std::to_string(sigma)});
      meta.push_back({"m", std::to_string(m)});
      meta.push_back({"alpha", format_double(alpha)});
      meta.push_back({"measure", measure});
      meta.push_back({"sweep", sweep});
      meta.push_back({"fwhm", format_double(lm.fwhm)});
      meta.push_back({"tail_exponent", format_double(lm.tail_exponent)});
      meta.push_back({"tail_fraction", format_double(lm.tail_fraction)});
      std::ostringstream os;
      write_profile_csv(os, prof, meta);
      emit(out_path, os.str());
      return kExitPass;
    }
    if (ops_list->parsed()) {
      std::ostringstream os;
      os << "family\tmembers\tderivative\tparameters\tformula\n";
      for (const auto& f : operator_catalogue()) {
        std::string mem;
        for (const auto& h : f.members) mem += (mem.empty() ? "" : ",") + h;
        os << f.name << '\t' << mem << '\t' << (f.derivative ? "yes" : "no") << '\t' << f.parameters << '\t' << f.formula
           << '\n';
      }
      emit("", os.str());
      return kExitPass;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cerr << app.help();
  return kExitUsage;
}
