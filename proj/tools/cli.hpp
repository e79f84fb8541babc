#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fluxline/abphase.hpp"
#include "fluxline/curves.hpp"
#include "fluxline/errors.hpp"
#include "fluxline/field.hpp"
#include "fluxline/gauge.hpp"
#include "fluxline/interference.hpp"
#include "fluxline/io.hpp"
#include "fluxline/parallel.hpp"
#include "fluxline/topology.hpp"

namespace fluxline::cli {

using Json = nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kTolerance = 3,
  kClearance = 4,
};

inline constexpr const char* kExitCodeHelp =
    "Exit codes: 0 ok, 1 other error, 2 usage/schema error (bad flag, malformed JSON),\n"
    "3 result outside tolerance, 4 clearance violation (curves or points too close).";

// ---------------------------------------------------------------------------
// Curve pairs

struct CurveOptions {
  std::string preset = "hopf";
  std::string flux_curve;  ///< curve file carrying the flux (overrides preset)
  std::string path;        ///< curve file of the charge path (overrides preset)
  int samples = kDefaultSamples;

  void add_to(CLI::App* app) {
    app->add_option("--preset", preset, "built-in configuration")
        ->check(CLI::IsMember({"hopf", "unlinked", "solomon"}));
    app->add_option("--flux-curve", flux_curve, "curve JSON file of the flux line");
    app->add_option("--path", path, "curve JSON file of the charge path");
    app->add_option("--samples", samples, "points per preset curve")->check(CLI::Range(3, 1 << 22));
  }

  Json to_json() const {
    Json j{{"samples", samples}};
    if (uses_files()) {
      j["flux_curve"] = flux_curve;
      j["path"] = path;
    } else {
      j["preset"] = preset;
    }
    return j;
  }

  bool uses_files() const { return !flux_curve.empty() || !path.empty(); }
};

/// {flux curve, path}. hopf: unit circle in the xy plane and a unit circle
/// in the xz plane through its centre (linking 1). unlinked: the second
/// circle moved to x = 3. solomon: a path winding twice around the flux
/// circle (linking 2).
inline std::pair<ClosedCurve, ClosedCurve> load_pair(const CurveOptions& o) {
  if (o.uses_files()) {
    if (o.flux_curve.empty() || o.path.empty()) {
      throw SchemaError("--flux-curve and --path must be given together");
    }
    return {io::read_curve(o.flux_curve), io::read_curve(o.path)};
  }
  const int n = o.samples;
  ClosedCurve flux = make_circle({0, 0, 0}, 1.0, {0, 0, 1}, n);
  if (o.preset == "hopf") return {flux, make_circle({1, 0, 0}, 1.0, {0, 1, 0}, n)};
  if (o.preset == "unlinked") return {flux, make_circle({3, 0, 0}, 1.0, {0, 1, 0}, n)};
  if (o.preset == "solomon") return {flux, make_torus_knot(1, 2, 1.0, 0.4, n).reversed()};
  throw SchemaError("unknown preset '" + o.preset + "'");
}

/// Signed crossings of the path through a surface spanning the flux curve,
/// or of the flux curve through one spanning the path when the first fan
/// is degenerate. Both equal the linking number.
inline long counted_linking(const ClosedCurve& flux, const ClosedCurve& path) {
  try {
    return crossing_linking(path, span_surface(flux));
  } catch (const DegenerateGeometry&) {
    return crossing_linking(flux, span_surface(path));
  }
}

// ---------------------------------------------------------------------------
// Output

struct Output {
  std::string out;  ///< report / CSV path; empty = stdout
  std::ostream* stdout_stream = &std::cout;

  void emit(const std::string& text) const {
    if (out.empty()) {
      *stdout_stream << text;
    } else {
      io::write_text(out, text);
    }
  }
  void emit_json(const Json& j) const { emit(j.dump(2) + "\n"); }

  /// CSV outputs carry their resolved config in `<out>.json` when written
  /// to a file.
  void emit_csv(const std::string& csv, const Json& config) const {
    emit(csv);
    if (!out.empty()) io::write_text(out + ".json", Json{{"config", config}}.dump(2) + "\n");
  }
};

inline std::vector<double> linspace(double from, double to, int steps) {
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    v[static_cast<std::size_t>(i)] =
        steps == 1 ? from : from + i * (to - from) / static_cast<double>(steps - 1);
  }
  return v;
}

inline Point3 parse_point(const std::string& s, const char* flag) {
  std::stringstream ss(s);
  Point3 p;
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= 3) throw SchemaError(std::string(flag) + ": expected x,y,z");
    try {
      std::size_t used = 0;
      p[k] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw SchemaError(std::string(flag) + ": '" + item + "' is not a number");
    }
    ++k;
  }
  if (k != 3) throw SchemaError(std::string(flag) + ": expected x,y,z");
  return p;
}

// ---------------------------------------------------------------------------
// Subcommands

struct LinkCmd {
  CurveOptions curves;
  double tol = kDefaultLinkingTol;

  void add_to(CLI::App* app) {
    curves.add_to(app);
    app->add_option("--tol", tol, "allowed distance of the Gauss integral from an integer")
        ->check(CLI::PositiveNumber);
  }

  int run(const Output& out) const {
    const auto [flux, path] = load_pair(curves);
    require_clearance(path, flux, "link");
    LinkingResult r;
    r.raw = gauss_linking_integral(path, flux);
    r.rounded = std::lround(r.raw);
    r.residual = std::abs(r.raw - static_cast<double>(r.rounded));
    const long crossings = counted_linking(flux, path);
    Json config = curves.to_json();
    config["tol"] = tol;
    out.emit_json(Json{{"config", config},
                       {"raw", r.raw},
                       {"rounded", r.rounded},
                       {"residual", r.residual},
                       {"crossing_count", crossings},
                       {"agree", crossings == r.rounded}});
    return r.residual < tol ? kOk : kTolerance;
  }
};

struct DeformOptions {
  DeformationSpec spec;

  void add_to(CLI::App* app) {
    app->add_option("--amplitude", spec.amplitude, "total deformation size")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--steps", spec.steps, "deformation steps")->check(CLI::PositiveNumber);
    app->add_option("--seed", spec.seed, "random seed");
    app->add_option("--clearance", spec.clearance, "distance kept between the curves")
        ->check(CLI::PositiveNumber);
    app->add_option("--modes", spec.n_modes, "Fourier modes per step")->check(CLI::PositiveNumber);
  }

  Json to_json() const {
    return Json{{"amplitude", spec.amplitude}, {"steps", spec.steps},         {"seed", spec.seed},
                {"clearance", spec.clearance}, {"modes", spec.n_modes}};
  }
};

inline Json suite_json(const SuiteResult& s) {
  return Json{{"name", s.name},
              {"initial", s.initial},
              {"max_deviation", s.max_deviation},
              {"worst_step", s.worst_step},
              {"passed", s.passed}};
}

struct PhaseCmd {
  CurveOptions curves;
  DeformOptions deform;
  double alpha = 1.0;
  double flux = 1.0;
  double tol = kInvarianceTol;
  bool invariance = false;

  void add_to(CLI::App* app) {
    curves.add_to(app);
    deform.add_to(app);
    app->add_option("--alpha", alpha, "q flux / (hbar c)");
    app->add_option("--flux", flux, "flux carried by the line");
    app->add_option("--tol", tol, "allowed spread between phase forms (rad)")
        ->check(CLI::PositiveNumber);
    app->add_flag("--invariance", invariance, "also run the four deformation suites");
  }

  int run(const Output& out) const {
    const auto [curve, path] = load_pair(curves);
    const FluxLine f(curve, flux);
    const PhaseParams p{alpha};
    const LinkingResult lk = gauss_linking(path, curve);
    const auto sa = ab_phase_solid_angle(p, path, f);
    const std::vector<std::pair<std::string, double>> forms = {
        {"topological", ab_phase_topological(p, lk.rounded)},
        {"circulation", ab_phase_circulation(p, f, path)},
        {"flux", ab_phase_flux(p, f, path)},
        {"solid_angle", sa.phase},
        {"crossing", ab_phase_crossing(p, f, path)},
    };
    double lo = forms.front().second, hi = lo;
    Json jf = Json::object();
    for (const auto& [name, v] : forms) {
      jf[name] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    Json config = curves.to_json();
    config["alpha"] = alpha;
    config["flux"] = flux;
    config["tol"] = tol;
    config["invariance"] = invariance;
    if (invariance) config["deformation"] = deform.to_json();
    Json report{{"config", config},
                {"linking", lk.rounded},
                {"forms", jf},
                {"spread", hi - lo},
                {"solid_angle_gradient_term", sa.gradient_term},
                {"surface_crossings", sa.crossings}};
    bool ok = hi - lo < tol;
    if (invariance) {
      const auto rep = invariance_suite(p, f, path, deform.spec, tol);
      Json suites = Json::array();
      for (const auto& s : rep.suites) suites.push_back(suite_json(s));
      report["invariance"] = Json{{"suites", suites}, {"passed", rep.passed}};
      ok = ok && rep.passed;
    }
    out.emit_json(report);
    return ok ? kOk : kTolerance;
  }
};

struct FieldCmd {
  CurveOptions curves;
  double flux = 1.0;
  std::string start = "0,0,0.25";
  std::string end = "0,0,3";
  int steps = 12;

  void add_to(CLI::App* app) {
    curves.add_to(app);
    app->add_option("--flux", flux, "flux carried by the line");
    app->add_option("--start", start, "first sample point x,y,z");
    app->add_option("--end", end, "last sample point x,y,z");
    app->add_option("--steps", steps, "number of samples")->check(CLI::PositiveNumber);
  }

  int run(const Output& out) const {
    const Point3 a = parse_point(start, "--start");
    const Point3 b = parse_point(end, "--end");
    const auto [curve, path] = load_pair(curves);
    (void)path;
    const FluxLine f(curve, flux);
    const auto surf = span_surface(curve);
    std::string csv = "s,x,y,z,A_x,A_y,A_z,solid_angle\n";
    for (double s : linspace(0.0, 1.0, steps)) {
      const Point3 x = a + (b - a) * s;
      const Vec3 A = vector_potential(f, x);
      const double om = solid_angle(x, surf);
      csv += io::fmt(s) + "," + io::fmt(x.x) + "," + io::fmt(x.y) + "," + io::fmt(x.z) + "," +
             io::fmt(A.x) + "," + io::fmt(A.y) + "," + io::fmt(A.z) + "," + io::fmt(om) + "\n";
    }
    Json config = curves.to_json();
    config["flux"] = flux;
    config["start"] = start;
    config["end"] = end;
    config["steps"] = steps;
    out.emit_csv(csv, config);
    return kOk;
  }
};

struct TwoSlitOptions {
  TwoSlitConfig cfg;
  int grid = kDefaultGrid;
  double half_width = 0.0;  ///< 0 = 20 delta_x

  void add_to(CLI::App* app) {
    app->add_option("--x0", cfg.x0, "slit half separation")->check(CLI::PositiveNumber);
    app->add_option("--b", cfg.b, "slit width parameter")->check(CLI::PositiveNumber);
    app->add_option("--t-a", cfg.t_a, "time at the first screen")->check(CLI::PositiveNumber);
    app->add_option("--t-b", cfg.t_b, "time at the second screen")->check(CLI::PositiveNumber);
    app->add_option("--m", cfg.m, "particle mass")->check(CLI::PositiveNumber);
    app->add_option("--v", cfg.v, "beam velocity")->check(CLI::PositiveNumber);
    app->add_option("--grid", grid, "samples per pattern")->check(CLI::Range(64, 1 << 22));
    app->add_option("--half-width", half_width, "pattern half width (0 = 20 delta_x)")
        ->check(CLI::NonNegativeNumber);
  }

  double resolved_half_width() const {
    return half_width > 0.0 ? half_width : kDefaultHalfWidthInDeltaX * cfg.delta_x();
  }

  Json to_json() const {
    Json j = io::to_json(cfg);
    j["grid"] = grid;
    j["half_width"] = resolved_half_width();
    return j;
  }
};

/// |measured - analytic| reduced modulo one fringe, relative to |analytic|
/// (relative to the period when the analytic shift is 0).
inline double shift_rel_err(double measured, double analytic, double period) {
  const double diff = std::abs(wrap_to_period(measured - analytic, period));
  return analytic != 0.0 ? diff / std::abs(analytic) : diff / period;
}

struct InterfereCmd {
  TwoSlitOptions slits;
  double alpha = kPi;
  double tol = 0.02;
  std::string out_dir = ".";
  std::string prefix = "pattern";

  void add_to(CLI::App* app) {
    slits.add_to(app);
    app->add_option("--alpha", alpha, "AB phase between the partial waves");
    app->add_option("--tol", tol, "allowed relative error of the measured shift")
        ->check(CLI::PositiveNumber);
    app->add_option("--out-dir", out_dir, "directory for the pattern files");
    app->add_option("--prefix", prefix, "file name prefix of the pattern files");
  }

  int run(const Output& out) const {
    slits.cfg.validate();
    const double w = slits.resolved_half_width();
    const Pattern off = pattern(slits.cfg, 0.0, w, slits.grid);
    const Pattern on = pattern(slits.cfg, alpha, w, slits.grid);
    std::filesystem::create_directories(out_dir);
    const std::string stem = out_dir + "/" + prefix;
    io::write_pattern(stem + "_off", off);
    io::write_pattern(stem + "_on", on);
    const auto m = measure_shift(off, on);
    const double analytic = ab_shift_analytic(slits.cfg, alpha);
    const double rel = shift_rel_err(m.shift, analytic, m.period);
    Json config = slits.to_json();
    config["alpha"] = alpha;
    config["tol"] = tol;
    config["out_dir"] = out_dir;
    config["prefix"] = prefix;
    out.emit_json(Json{{"config", config},
                       {"shift_measured", m.shift},
                       {"shift_analytic", analytic},
                       {"fringe_period", m.period},
                       {"rel_err", rel},
                       {"files", Json::array({prefix + "_off.csv", prefix + "_off.json",
                                              prefix + "_on.csv", prefix + "_on.json"})}});
    return rel < tol ? kOk : kTolerance;
  }
};

struct GaugeDemoCmd {
  bool solenoid = false;
  bool closed_line = false;
  SolenoidConfig sol;
  double rho0 = 2.0;
  int turns = 1;
  int samples = kDefaultSamples;
  CurveOptions curves;
  double flux = 1.0;

  void add_to(CLI::App* app) {
    auto* s = app->add_flag("--solenoid", solenoid, "infinite solenoid demo (default)");
    auto* c = app->add_flag("--closed-line", closed_line, "closed flux line demo");
    s->excludes(c);
    app->add_option("--R", sol.R, "solenoid radius")->check(CLI::PositiveNumber);
    app->add_option("--solenoid-flux", sol.flux, "solenoid flux");
    app->add_option("--rho0", rho0, "loop radius (must exceed R)")->check(CLI::PositiveNumber);
    app->add_option("--turns", turns, "signed number of turns of the loop");
    app->add_option("--loop-samples", samples, "quadrature points per turn")
        ->check(CLI::Range(8, 1 << 22));
    curves.add_to(app);
    app->add_option("--flux", flux, "flux of the closed line");
  }

  int run(const Output& out) const {
    if (closed_line) {
      const auto [curve, path] = load_pair(curves);
      const FluxLine f(curve, flux);
      const auto d = singular_gauge_closed_line_demo(f, path);
      Json config = curves.to_json();
      config["mode"] = "closed-line";
      config["flux"] = flux;
      out.emit_json(Json{{"config", config},
                         {"before", d.before},
                         {"after", d.after},
                         {"flux_before", d.flux_before},
                         {"flux_after", d.flux_after},
                         {"crossings_before", d.crossings_before},
                         {"crossings_after", d.crossings_after},
                         {"surface_gauge_circulation",
                          surface_gauge_circulation(f, span_surface(curve), path)}});
      return kOk;
    }
    const auto d = solenoid_singular_gauge_demo(sol, rho0, turns, samples);
    out.emit_json(Json{{"config",
                        {{"mode", "solenoid"},
                         {"R", sol.R},
                         {"flux", sol.flux},
                         {"rho0", rho0},
                         {"turns", turns},
                         {"loop_samples", samples}}},
                       {"circ_A", d.circ_A},
                       {"circ_Aprime", d.circ_Aprime},
                       {"string_flux", d.string_flux},
                       {"winding", d.winding}});
    return kOk;
  }
};

struct SweepCmd {
  std::string param = "alpha";
  double from = 0.0;
  double to = kTwoPi;
  int steps = 8;
  TwoSlitOptions slits;
  CurveOptions curves;
  double flux = 1.0;

  void add_to(CLI::App* app) {
    app->add_option("--param", param, "parameter to vary")
        ->check(CLI::IsMember({"alpha", "samples"}));
    app->add_option("--from", from, "first value");
    app->add_option("--to", to, "last value");
    app->add_option("--steps", steps, "number of values")->check(CLI::PositiveNumber);
    slits.add_to(app);
    curves.add_to(app);
    app->add_option("--flux", flux, "flux of the closed line (samples sweep)");
  }

  int run(const Output& out) const {
    std::string csv;
    Json config{{"param", param}, {"from", from}, {"to", to}, {"steps", steps}};
    const auto values = linspace(from, to, steps);
    if (param == "alpha") {
      slits.cfg.validate();
      const double w = slits.resolved_half_width();
      const Pattern off = pattern(slits.cfg, 0.0, w, slits.grid);
      csv = "param,value,phase_topological,shift_analytic,shift_measured\n";
      for (double a : values) {
        const Pattern on = pattern(slits.cfg, a, w, slits.grid);
        csv += "alpha," + io::fmt(a) + "," + io::fmt(ab_phase_topological(PhaseParams{a}, 1)) + "," +
               io::fmt(ab_shift_analytic(slits.cfg, a)) + "," + io::fmt(ab_shift_measured(off, on)) +
               "\n";
      }
      config["two_slit"] = slits.to_json();
    } else {
      if (curves.uses_files()) throw SchemaError("--param samples needs a preset, not curve files");
      csv = "param,value,raw,residual,circulation,crossing_count\n";
      for (double v : values) {
        CurveOptions o = curves;
        o.samples = static_cast<int>(std::lround(v));
        if (o.samples < 3) throw SchemaError("--param samples: values must be >= 3");
        const auto [curve, path] = load_pair(o);
        require_clearance(path, curve, "sweep");
        const double raw = gauss_linking_integral(path, curve);
        const double res = std::abs(raw - std::round(raw));
        const double circ = circulation(FluxLine(curve, flux), path);
        csv += "samples," + std::to_string(o.samples) + "," + io::fmt(raw) + "," + io::fmt(res) + "," +
               io::fmt(circ) + "," + std::to_string(counted_linking(curve, path)) + "\n";
      }
      Json c = curves.to_json();
      c.erase("samples");
      config["curves"] = c;
      config["flux"] = flux;
    }
    out.emit_csv(csv, config);
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// --config expansion

/// Turns {"alpha": 3.1, "t_a": 1, "invariance": true} into
/// {"--alpha=3.1", "--t-a=1", "--invariance"}.
inline std::vector<std::string> config_args(const std::string& path) {
  const Json j = io::parse_json(io::read_text(path), path);
  if (!j.is_object()) throw SchemaError(path + ": top level must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    for (auto& ch : flag) {
      if (ch == '_') ch = '-';
    }
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_number_integer()) {
      args.push_back(flag + "=" + std::to_string(value.get<long long>()));
    } else if (value.is_number()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", value.get<double>());
      args.push_back(flag + "=" + buf);
    } else if (value.is_string()) {
      args.push_back(flag + "=" + value.get<std::string>());
    } else if (value.is_array() && value.size() == 3) {
      std::string s;
      for (std::size_t k = 0; k < 3; ++k) {
        if (!value[k].is_number()) throw SchemaError(path + ": field '" + key + "': expected numbers");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", value[k].get<double>());
        s += (k ? "," : "") + std::string(buf);
      }
      args.push_back(flag + "=" + s);
    } else {
      throw SchemaError(path + ": field '" + key + "': unsupported value type");
    }
  }
  return args;
}

/// Removes `--config FILE` / `--config=FILE` from args and splices the
/// file's keys in right after the subcommand name, so that flags given on
/// the command line win.
inline std::vector<std::string> expand_config(std::vector<std::string> args,
                                              const std::vector<std::string>& subcommands) {
  std::optional<std::string> file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw SchemaError("--config needs a file argument");
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!file) return args;
  const auto extra = config_args(*file);
  auto it = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
    return std::find(subcommands.begin(), subcommands.end(), a) != subcommands.end();
  });
  if (it == args.end()) throw SchemaError("--config needs a subcommand");
  args.insert(it + 1, extra.begin(), extra.end());
  return args;
}

// ---------------------------------------------------------------------------

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless --out is given; diagnostics go to `err`.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Aharonov-Bohm phases and linking numbers of closed flux lines.", "fluxline"};
  app.footer(kExitCodeHelp);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  Output output;
  output.stdout_stream = &out;
  int threads = 0;
  std::string config_file;
  app.add_option("--threads", threads, "cap on worker threads (0 = all cores)")
      ->envname("FLUXLINE_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", output.out, "write the report/CSV here instead of stdout");
  app.add_option("--config", config_file, "JSON file of flag values (command line wins)");

  LinkCmd link;
  PhaseCmd phase;
  FieldCmd field;
  InterfereCmd interfere;
  GaugeDemoCmd gauge;
  SweepCmd sweep;
  auto* s_link = app.add_subcommand("link", "Gauss linking number vs counted crossings");
  auto* s_phase = app.add_subcommand("phase", "AB phase in all five forms");
  auto* s_field = app.add_subcommand("field", "vector potential and solid angle along a segment");
  auto* s_interfere = app.add_subcommand("interfere", "two-slit patterns and the AB shift");
  auto* s_gauge = app.add_subcommand("gauge-demo", "singular vs non-singular gauge demos");
  auto* s_sweep = app.add_subcommand("sweep", "vary one parameter, long-format CSV");
  link.add_to(s_link);
  phase.add_to(s_phase);
  field.add_to(s_field);
  interfere.add_to(s_interfere);
  gauge.add_to(s_gauge);
  sweep.add_to(s_sweep);

  try {
    args = expand_config(std::move(args),
                         {"link", "phase", "field", "interfere", "gauge-demo", "sweep"});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  set_thread_count(threads);
  try {
    if (s_link->parsed()) return link.run(output);
    if (s_phase->parsed()) return phase.run(output);
    if (s_field->parsed()) return field.run(output);
    if (s_interfere->parsed()) return interfere.run(output);
    if (s_gauge->parsed()) return gauge.run(output);
    if (s_sweep->parsed()) return sweep.run(output);
    return kUsage;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ClearanceError& e) {
    err << "clearance violation: " << e.what() << "\n";
    return kClearance;
  } catch (const ResolutionError& e) {
    err << "tolerance: " << e.what() << "\n";
    return kTolerance;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}

}  // namespace fluxline::cli
