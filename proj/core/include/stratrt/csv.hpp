#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace stratrt {

/// Comma-separated output with a header row. Numbers are written with 17
/// significant digits so they round-trip exactly.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
  /// Flushes and checks the stream; throws ArgumentError on I/O failure.
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Writes equal-length columns under `header`.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

/// The formatting used by CsvWriter, exposed for other text outputs.
std::string format_number(double v);

}  // namespace stratrt
