#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "stratrt/atmosphere.hpp"
#include "stratrt/error.hpp"
#include "stratrt/grey.hpp"

namespace stratrt::cli {

enum ExitCode : int { kSuccess = 0, kInvalid = 1, kNotConverged = 2 };

/// Itemized config problems: unknown keys, type mismatches, range violations.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<std::string> items);
  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
};

struct SpecfunOptions {
  double x_min = 1e-3;
  double x_max = 20.0;
  std::size_t samples = 200;
};

struct Grey1DOptions {
  GreyConfig config;
  std::size_t intervals = 200;
};

struct Grey2DOptions {
  GreyConfig config;
  std::string terrain = "quarter_disc";  // or "flat"
  std::size_t x_intervals = 60;
  std::size_t sigma_intervals = 40;
  double edge_fraction = 0.9;
  double flat_x_max = 27.0;  // flat terrain only
};

using TypedConfig = std::variant<SpecfunOptions, Grey1DOptions, Grey2DOptions, Scenario>;

/// Checks a flat JSON object against the schema of `subcommand` and returns the
/// typed config with defaults filled in. `resolved` (optional) receives every
/// field, including injected defaults. Throws ConfigError listing every
/// problem, or ArgumentError for an unknown subcommand.
TypedConfig validate_config(const nlohmann::json& raw, const std::string& subcommand,
                            nlohmann::json* resolved = nullptr);

/// Runs the command line (argv without the program name). Never throws;
/// errors are reported on `err` and mapped to ExitCode values.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stratrt::cli
