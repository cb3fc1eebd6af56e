#include <set>
#include <string>

#include "cli.hpp"

namespace stratrt::cli {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string s = "invalid config:";
  for (const auto& i : items) s += "\n  " + i;
  return s;
}

// Reads typed fields out of a flat object, recording problems instead of
// throwing so that one run reports everything at once.
class Reader {
 public:
  Reader(const nlohmann::json& raw, nlohmann::json& resolved) : raw_(raw), resolved_(resolved) {
    if (!raw_.is_object()) errors_.push_back("config must be a JSON object");
  }

  void number(const char* key, double& out) {
    if (const auto* v = take(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        mismatch(key, "a number", *v);
      }
    }
    resolved_[key] = out;
  }

  void count(const char* key, std::size_t& out, std::size_t min) {
    if (const auto* v = take(key)) {
      if (v->is_number_integer() && v->get<long long>() >= 0) {
        out = v->get<std::size_t>();
        if (out < min) errors_.push_back(std::string(key) + ": must be >= " + std::to_string(min));
      } else {
        mismatch(key, "a non-negative integer", *v);
      }
    }
    resolved_[key] = out;
  }

  void integer(const char* key, int& out) {
    if (const auto* v = take(key)) {
      if (v->is_number_integer()) {
        out = v->get<int>();
      } else {
        mismatch(key, "an integer", *v);
      }
    }
    resolved_[key] = out;
  }

  void choice(const char* key, std::string& out, const std::set<std::string>& allowed) {
    if (const auto* v = take(key)) {
      if (v->is_string() && allowed.count(v->get<std::string>())) {
        out = v->get<std::string>();
      } else {
        std::string opts;
        for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
        mismatch(key, "one of " + opts, *v);
      }
    }
    resolved_[key] = out;
  }

  void boundary(const char* kind_key, const char* value_key, BoundaryCondition& bc) {
    std::string kind = bc.is_dirichlet() ? "dirichlet" : "neumann";
    double value = bc.value;
    choice(kind_key, kind, {"dirichlet", "neumann"});
    number(value_key, value);
    bc = kind == "dirichlet" ? BoundaryCondition::dirichlet(value) : BoundaryCondition::neumann();
  }

  // Range checks owned by the typed config.
  template <class F>
  void check(F&& validate) {
    try {
      validate();
    } catch (const ValidationError& e) {
      std::string msg = e.what();
      // Typed validators list items on separate lines; keep them separate.
      std::size_t pos = 0;
      bool split = false;
      while ((pos = msg.find("\n  ")) != std::string::npos) {
        split = true;
        msg = msg.substr(pos + 3);
        const auto next = msg.find("\n  ");
        errors_.push_back(msg.substr(0, next));
        if (next == std::string::npos) break;
      }
      if (!split) errors_.push_back(e.what());
    }
  }

  void finish() {
    if (raw_.is_object()) {
      for (const auto& [k, v] : raw_.items()) {
        if (!seen_.count(k)) errors_.push_back(k + ": unknown key");
      }
    }
    if (!errors_.empty()) throw ConfigError(errors_);
  }

  void error(std::string msg) { errors_.push_back(std::move(msg)); }

 private:
  const nlohmann::json* take(const char* key) {
    seen_.insert(key);
    if (!raw_.is_object()) return nullptr;
    const auto it = raw_.find(key);
    return it == raw_.end() ? nullptr : &*it;
  }

  void mismatch(const char* key, const std::string& want, const nlohmann::json& got) {
    errors_.push_back(std::string(key) + ": expected " + want + ", got " + got.dump());
  }

  const nlohmann::json& raw_;
  nlohmann::json& resolved_;
  std::set<std::string> seen_;
  std::vector<std::string> errors_;
};

void read_grey(Reader& r, GreyConfig& c) {
  r.number("kappa", c.kappa);
  r.number("albedo_a", c.albedo_a);
  r.number("kbar_T", c.kbar_T);
  r.number("Q", c.Q);
  r.number("T_sun", c.T_sun);
  r.number("z_min", c.z_min);
  r.number("z_max", c.z_max);
  r.boundary("bc_bottom", "bc_bottom_value", c.bc_bottom);
  r.boundary("bc_top", "bc_top_value", c.bc_top);
  r.integer("outer_iters", c.outer_iters);
  r.integer("inner_iters", c.inner_iters);
  r.number("tol", c.tol);
  r.check([&] { c.validate(); });
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> items)
    : ValidationError(join(items)), items_(std::move(items)) {}

TypedConfig validate_config(const nlohmann::json& raw, const std::string& subcommand,
                            nlohmann::json* resolved) {
  nlohmann::json sink = nlohmann::json::object();
  nlohmann::json& res = resolved ? *resolved : sink;
  res = nlohmann::json::object();
  Reader r(raw, res);

  if (subcommand == "specfun-table") {
    SpecfunOptions o;
    r.number("x_min", o.x_min);
    r.number("x_max", o.x_max);
    r.count("samples", o.samples, 2);
    if (!(o.x_min > 0.0 && o.x_min < o.x_max)) r.error("need 0 < x_min < x_max");
    r.finish();
    return o;
  }
  if (subcommand == "grey1d") {
    Grey1DOptions o;
    read_grey(r, o.config);
    r.count("n_intervals", o.intervals, 2);
    r.finish();
    return o;
  }
  if (subcommand == "grey2d") {
    Grey2DOptions o;
    read_grey(r, o.config);
    r.choice("terrain", o.terrain, {"quarter_disc", "flat"});
    r.count("x_intervals", o.x_intervals, 2);
    r.count("sigma_intervals", o.sigma_intervals, 2);
    r.number("edge_fraction", o.edge_fraction);
    r.number("flat_x_max", o.flat_x_max);
    if (!(o.edge_fraction > 0.0 && o.edge_fraction < 1.0)) r.error("edge_fraction: must lie in (0, 1)");
    if (!(o.flat_x_max > 0.0)) r.error("flat_x_max: must be positive");
    r.finish();
    return o;
  }
  if (subcommand == "atmosphere" || subcommand == "greenhouse") {
    Scenario s;
    r.number("thickness_km", s.thickness_km);
    r.number("solar_power_scaled", s.solar_power_scaled);
    r.number("ground_direct_fraction", s.ground_direct_fraction);
    r.number("ground_albedo", s.ground_albedo);
    r.number("high_altitude_source_fraction", s.high_altitude_source_fraction);
    r.number("cloud_albedo", s.cloud_albedo);
    r.number("cloud_base_km", s.cloud_base_km);
    r.number("cloud_top_km", s.cloud_top_km);
    r.number("rayleigh_albedo", s.rayleigh_albedo);
    r.number("rayleigh_base_km", s.rayleigh_base_km);
    r.number("kappa_mean", s.kappa_mean);
    r.number("density_rho0", s.density_rho0);
    r.number("scale_height_km", s.scale_height_km);
    r.number("sun_temperature", s.sun_temperature);
    r.count("n_depth", s.n_depth, 0);
    r.count("n_freq", s.n_freq, 0);
    r.integer("max_iters", s.max_iters);
    r.number("tol", s.tol);
    r.check([&] { s.validate(); });
    r.finish();
    return s;
  }
  throw ArgumentError("unknown subcommand '" + subcommand + "'");
}

}  // namespace stratrt::cli
