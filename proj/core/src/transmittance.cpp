#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "stratrt/atmosphere.hpp"
#include "stratrt/error.hpp"

namespace stratrt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& token, double& out) {
  const std::string t = trim(token);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  if (line.find(',') != std::string::npos) {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
  } else {
    std::stringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(f);
  }
  return fields;
}

}  // namespace

double TransmittanceTable::at(double lambda) const {
  if (wavelength_um.empty()) throw ArgumentError("TransmittanceTable: empty table");
  if (lambda <= wavelength_um.front()) return transmittance.front();
  if (lambda >= wavelength_um.back()) return transmittance.back();
  const auto it = std::upper_bound(wavelength_um.begin(), wavelength_um.end(), lambda);
  const std::size_t k = static_cast<std::size_t>(it - wavelength_um.begin()) - 1;
  const double u = (lambda - wavelength_um[k]) / (wavelength_um[k + 1] - wavelength_um[k]);
  return transmittance[k] + u * (transmittance[k + 1] - transmittance[k]);
}

void TransmittanceTable::validate() const {
  if (wavelength_um.size() != transmittance.size()) {
    throw ValidationError("TransmittanceTable: column lengths differ");
  }
  if (wavelength_um.empty()) throw ValidationError("TransmittanceTable: no samples");
  for (std::size_t k = 0; k < size(); ++k) {
    if (!(wavelength_um[k] > 0.0)) {
      throw ValidationError("TransmittanceTable: wavelengths must be positive");
    }
    if (k > 0 && !(wavelength_um[k] > wavelength_um[k - 1])) {
      throw ValidationError("TransmittanceTable: wavelengths must increase strictly (sample " +
                            std::to_string(k + 1) + ")");
    }
    if (!(transmittance[k] > 0.0 && transmittance[k] <= 1.0)) {
      throw ValidationError("TransmittanceTable: transmittance outside (0, 1] (sample " +
                            std::to_string(k + 1) + ")");
    }
  }
}

TransmittanceTable parse_transmittance(std::istream& in, const std::string& source) {
  TransmittanceTable table;
  std::string line;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    double lam = 0.0;
    double tr = 0.0;
    const bool numeric =
        fields.size() == 2 && parse_double(fields[0], lam) && parse_double(fields[1], tr);
    if (!numeric) {
      const bool looks_like_header =
          header_allowed && !fields.empty() &&
          std::isalpha(static_cast<unsigned char>(trim(fields[0]).c_str()[0])) != 0;
      header_allowed = false;
      if (looks_like_header) continue;
      throw ParseError(source + ":" + std::to_string(lineno) +
                           ": expected two numeric columns, got '" + t + "'",
                       lineno);
    }
    header_allowed = false;
    if (!(tr > 0.0 && tr <= 1.0)) {
      throw ValidationError(source + ":" + std::to_string(lineno) + ": transmittance " +
                            trim(fields[1]) + " outside (0, 1]");
    }
    if (!table.wavelength_um.empty() && !(lam > table.wavelength_um.back())) {
      throw ValidationError(source + ":" + std::to_string(lineno) +
                            ": wavelengths must increase strictly" +
                            (lam == table.wavelength_um.back() ? " (duplicate)" : ""));
    }
    table.wavelength_um.push_back(lam);
    table.transmittance.push_back(tr);
  }
  table.validate();
  return table;
}

TransmittanceTable load_transmittance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open transmittance file " + path.string());
  return parse_transmittance(in, path.string());
}

}  // namespace stratrt
