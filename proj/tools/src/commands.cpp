#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "cli.hpp"
#include "stratrt/csv.hpp"
#include "stratrt/parallel.hpp"
#include "stratrt/specfun.hpp"

namespace fs = std::filesystem;

namespace stratrt::cli {

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::string spectrum_path;
  std::string window;
  double blocked_kappa = 0.0;
  int threads = 0;
  std::optional<double> tol;
  std::optional<int> max_iters;
  bool sensitivity = false;
};

// Collects what manifest.json reports; written once solving has started,
// whatever the outcome.
class Manifest {
 public:
  Manifest(std::string subcommand, fs::path out_dir)
      : out_dir_(std::move(out_dir)), t0_(std::chrono::steady_clock::now()) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["version"] = STRATRT_VERSION;
    doc_["inputs"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::array();
  }

  nlohmann::json& doc() { return doc_; }
  void input(const std::string& key, const fs::path& p) { doc_["inputs"][key] = fs::absolute(p).string(); }
  fs::path output(const std::string& name) {
    const fs::path p = out_dir_ / name;
    doc_["outputs"].push_back(fs::absolute(p).string());
    return p;
  }
  void report(bool converged, int iterations, double final_increment) {
    doc_["report"] = {{"converged", converged},
                      {"iterations", iterations},
                      {"final_sup_increment", final_increment}};
  }
  void write(int exit_code) {
    doc_["exit_code"] = exit_code;
    doc_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    std::ofstream out(out_dir_ / "manifest.json");
    out << doc_.dump(2) << '\n';
  }

 private:
  fs::path out_dir_;
  std::chrono::steady_clock::time_point t0_;
  nlohmann::json doc_;
};

nlohmann::json read_json(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config file " + path + " is not valid JSON: " + e.what());
  }
}

fs::path bundled_spectrum() {
  for (const char* dir : {STRATRT_DATA_DIR, STRATRT_INSTALLED_DATA_DIR}) {
    const fs::path p = fs::path(dir) / "transmittance_schematic.csv";
    if (fs::exists(p)) return p;
  }
  throw ArgumentError("no --spectrum given and the bundled transmittance table was not found");
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto comma = text.find(',');
  std::pair<double, double> w;
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    w.first = std::stod(text.substr(0, comma), &used);
    const std::string rest = text.substr(comma + 1);
    w.second = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ArgumentError("--window expects lo,hi, got '" + text + "'");
  }
  if (!(w.first <= w.second)) throw ArgumentError("--window needs lo <= hi");
  return w;
}

void write_grey_iterations(const fs::path& path, const GreyReport& rep) {
  CsvWriter w(path, {"n", "sup_increment", "min_increment"});
  for (std::size_t k = 0; k < rep.sup_increments.size(); ++k) {
    w.row({double(k + 1), rep.sup_increments[k], rep.min_increments[k]});
  }
  w.close();
}

void write_spectral_report(const fs::path& path, const IterationReport& rep) {
  CsvWriter w(path, {"n", "sup_dT", "min_dT", "min_dJ", "min_dK", "source_norm", "ratio"});
  for (std::size_t k = 0; k < rep.sup_dT.size(); ++k) {
    w.row({double(k + 1), rep.sup_dT[k], rep.min_dT[k], rep.min_dJ[k], rep.min_dK[k],
           rep.source_norm[k], rep.ratio[k]});
  }
  w.close();
}

void write_temperature(const fs::path& path, const AtmosphereResult& r) {
  write_columns(path, {"z_km", "tau", "T_scaled", "T_kelvin"}, {r.z_km, r.tau, r.T, r.T_kelvin});
}

void write_outgoing(const fs::path& path, const AtmosphereResult& r) {
  write_columns(path, {"x", "kappa", "J_at_Z"}, {r.x, r.kappa, r.J_top});
}

double last_or_zero(const std::vector<double>& v) { return v.empty() ? 0.0 : v.back(); }

int run_specfun(const SpecfunOptions& o, Manifest& m) {
  CsvWriter w(m.output("specfun.csv"), {"x", "E1", "E2", "E3", "E5"});
  for (std::size_t k = 0; k < o.samples; ++k) {
    const double u = double(k) / double(o.samples - 1);
    const double x = o.x_min * std::pow(o.x_max / o.x_min, u);
    w.row({x, expint(1, x), expint(2, x), expint(3, x), expint(5, x)});
  }
  w.close();
  return kSuccess;
}

int run_grey1d(Grey1DOptions o, const Options& opt, Manifest& m) {
  if (opt.tol) o.config.tol = *opt.tol;
  if (opt.max_iters) o.config.outer_iters = *opt.max_iters;
  o.config.validate();
  const auto res = grey_iterate(o.config, grey_grid(o.config, o.intervals));
  std::vector<double> z(res.z.begin(), res.z.end());
  write_columns(m.output("temperature.csv"), {"z", "T_e", "T"}, {z, res.T_e, res.T});
  write_grey_iterations(m.output("iterations.csv"), res.report);
  m.report(res.report.converged, res.report.iterations, last_or_zero(res.report.sup_increments));
  m.doc()["report"]["monotone"] = res.report.monotone;
  return res.report.converged ? kSuccess : kNotConverged;
}

int run_grey2d(Grey2DOptions o, const Options& opt, Manifest& m) {
  if (opt.tol) o.config.tol = *opt.tol;
  if (opt.max_iters) o.config.outer_iters = *opt.max_iters;
  o.config.validate();
  const Terrain2D terrain =
      o.terrain == "flat"
          ? flat_terrain(o.flat_x_max, o.config.z_min, o.config.z_max, o.x_intervals, o.sigma_intervals)
          : quarter_disc_terrain(o.x_intervals, o.sigma_intervals, o.edge_fraction);
  const auto res = grey_solve_2d(terrain, o.config);
  write_columns(m.output("temperature.csv"), {"x", "z", "T_e", "T"}, {res.x, res.z, res.T_e, res.T});
  write_grey_iterations(m.output("iterations.csv"), res.report);
  m.report(res.report.converged, res.report.iterations, last_or_zero(res.report.sup_increments));
  m.doc()["report"]["monotone"] = res.report.monotone;
  return res.report.converged ? kSuccess : kNotConverged;
}

Scenario apply_overrides(Scenario s, const Options& opt) {
  if (opt.tol) s.tol = *opt.tol;
  if (opt.max_iters) s.max_iters = *opt.max_iters;
  s.validate();
  return s;
}

int run_atmosphere(const Scenario& base, const Options& opt, Manifest& m) {
  const Scenario sc = apply_overrides(base, opt);
  const fs::path spectrum_path = opt.spectrum_path.empty() ? bundled_spectrum() : fs::path(opt.spectrum_path);
  m.input("spectrum", spectrum_path);
  const Spectrum spectrum = build_spectrum(load_transmittance(spectrum_path), sc);
  const int threads = static_cast<int>(resolve_threads(opt.threads));
  m.doc()["threads"] = threads;

  const auto res = run_scenario(sc, spectrum, threads);
  write_temperature(m.output("temperature.csv"), res);
  write_outgoing(m.output("outgoing.csv"), res);
  write_spectral_report(m.output("report.csv"), res.report);
  m.report(res.report.converged, res.report.iterations, last_or_zero(res.report.sup_dT));
  m.doc()["report"]["monotone"] = res.report.monotone;
  m.doc()["report"]["ground_temperature_kelvin"] = res.T_kelvin.front();

  if (opt.sensitivity) {
    const Sensitivity s = sensitivity(sc, spectrum, 0.05, threads);
    m.doc()["sensitivity"] = {{"dT0_dQminus", s.dT0_dQminus}, {"dT0_dalbedo", s.dT0_dalbedo}};
    write_columns(m.output("sensitivity.csv"), {"dT0_dQminus", "dT0_dalbedo"},
                  {{s.dT0_dQminus}, {s.dT0_dalbedo}});
  }
  return res.report.converged ? kSuccess : kNotConverged;
}

int run_greenhouse(const Scenario& base, const Options& opt, Manifest& m) {
  const Scenario sc = apply_overrides(base, opt);
  if (opt.window.empty()) throw ArgumentError("greenhouse needs --window lo,hi");
  if (!(opt.blocked_kappa > 0.0)) throw ArgumentError("greenhouse needs --blocked-kappa > 0");
  const auto [lo, hi] = parse_window(opt.window);
  const fs::path spectrum_path = opt.spectrum_path.empty() ? bundled_spectrum() : fs::path(opt.spectrum_path);
  m.input("spectrum", spectrum_path);
  const Spectrum spectrum = build_spectrum(load_transmittance(spectrum_path), sc);
  const int threads = static_cast<int>(resolve_threads(opt.threads));
  m.doc()["threads"] = threads;
  m.doc()["window"] = {lo, hi};
  m.doc()["blocked_kappa"] = opt.blocked_kappa;

  const auto cmp = greenhouse_compare(sc, spectrum, lo, hi, opt.blocked_kappa, threads);
  write_temperature(m.output("temperature.csv"), cmp.base);
  write_temperature(m.output("temperature_blocked.csv"), cmp.blocked);
  write_outgoing(m.output("outgoing.csv"), cmp.base);
  write_outgoing(m.output("outgoing_blocked.csv"), cmp.blocked);
  write_spectral_report(m.output("report.csv"), cmp.base.report);
  write_spectral_report(m.output("report_blocked.csv"), cmp.blocked.report);
  std::vector<double> dk(cmp.delta_T.size());
  for (std::size_t i = 0; i < dk.size(); ++i) dk[i] = PhysicalScales{}.scaled_to_kelvin(cmp.delta_T[i]);
  write_columns(m.output("delta_T.csv"), {"z_km", "tau", "delta_T_scaled", "delta_T_kelvin"},
                {cmp.base.z_km, cmp.base.tau, cmp.delta_T, dk});

  const bool converged = cmp.base.report.converged && cmp.blocked.report.converged;
  m.report(converged, std::max(cmp.base.report.iterations, cmp.blocked.report.iterations),
           std::max(last_or_zero(cmp.base.report.sup_dT), last_or_zero(cmp.blocked.report.sup_dT)));
  m.doc()["greenhouse"] = {{"window_nodes", cmp.window.size()},
                           {"delta_T0_scaled", cmp.delta_T.front()},
                           {"ground_warming", cmp.ground_warming},
                           {"outgoing_reduced", cmp.outgoing_reduced}};
  return converged ? kSuccess : kNotConverged;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"stratrt: radiative transfer in stratified media", "stratrt"};
  app.set_version_flag("--version", std::string(STRATRT_VERSION));
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub, bool spectral) {
    sub->add_option("--config", opt.config_path, "flat JSON config")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory (created if missing)");
    sub->add_option("--tol", opt.tol, "override the convergence tolerance");
    sub->add_option("--max-iters", opt.max_iters, "override the outer iteration limit");
    if (spectral) {
      sub->add_option("--spectrum", opt.spectrum_path, "transmittance CSV (default: bundled table)")
          ->check(CLI::ExistingFile);
      sub->add_option("--threads", opt.threads, "worker threads, 0 = STRATRT_THREADS or all cores");
    }
  };
  auto* specfun = app.add_subcommand("specfun-table", "tabulate E1, E2, E3, E5");
  specfun->add_option("--config", opt.config_path, "flat JSON config")->check(CLI::ExistingFile);
  specfun->add_option("--out", opt.out_dir, "output directory");
  auto* grey1d = app.add_subcommand("grey1d", "grey lake, one dimension");
  common(grey1d, false);
  auto* grey2d = app.add_subcommand("grey2d", "grey lake cross-section");
  common(grey2d, false);
  auto* atmosphere = app.add_subcommand("atmosphere", "frequency-dependent atmosphere run");
  common(atmosphere, true);
  atmosphere->add_flag("--sensitivity", opt.sensitivity, "also record dT(0)/dQ- and dT(0)/dalbedo");
  auto* greenhouse = app.add_subcommand("greenhouse", "window-blocking comparison");
  common(greenhouse, true);
  greenhouse->add_option("--window", opt.window, "blocked band lo,hi in scaled frequency")->required();
  greenhouse->add_option("--blocked-kappa", opt.blocked_kappa, "kappa inside the window")->required();

  if (!args.empty() && !args.front().empty() && args.front()[0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args.front();
    if (!known) {
      err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
      return kInvalid;
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << STRATRT_VERSION << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kInvalid;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  std::optional<Manifest> manifest;
  try {
    nlohmann::json resolved;
    const TypedConfig cfg = validate_config(read_json(opt.config_path), name, &resolved);
    fs::create_directories(opt.out_dir);
    manifest.emplace(name, fs::path(opt.out_dir));
    manifest->doc()["config"] = resolved;
    if (!opt.config_path.empty()) manifest->input("config", opt.config_path);
    manifest->doc()["output_dir"] = fs::absolute(opt.out_dir).string();

    int code = kSuccess;
    if (name == "specfun-table") {
      code = run_specfun(std::get<SpecfunOptions>(cfg), *manifest);
    } else if (name == "grey1d") {
      code = run_grey1d(std::get<Grey1DOptions>(cfg), opt, *manifest);
    } else if (name == "grey2d") {
      code = run_grey2d(std::get<Grey2DOptions>(cfg), opt, *manifest);
    } else if (name == "atmosphere") {
      code = run_atmosphere(std::get<Scenario>(cfg), opt, *manifest);
    } else {
      code = run_greenhouse(std::get<Scenario>(cfg), opt, *manifest);
    }
    manifest->write(code);
    if (code == kNotConverged) err << name << ": did not converge within the iteration limit\n";
    return code;
  } catch (const NumericError& e) {
    err << name << ": numerical failure: " << e.what() << '\n';
    if (manifest) {
      manifest->doc()["error"] = e.what();
      manifest->report(false, 0, 0.0);
      manifest->write(kNotConverged);
    }
    return kNotConverged;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << '\n';
    if (manifest) {
      manifest->doc()["error"] = e.what();
      manifest->write(kInvalid);
    }
    return kInvalid;
  }
}

}  // namespace stratrt::cli
