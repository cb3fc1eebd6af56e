#include "stratrt/csv.hpp"

#include <fmt/format.h>

#include "stratrt/error.hpp"

namespace stratrt {

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), out_(path), columns_(header.size()) {
  if (!out_) throw ArgumentError("cannot write " + path.string());
  if (header.empty()) throw ArgumentError("CsvWriter: empty header");
  for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_) {
    throw ArgumentError(fmt::format("CsvWriter: row has {} values, header has {}", values.size(),
                                    columns_));
  }
  fmt::memory_buffer buf;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) buf.push_back(',');
    fmt::format_to(std::back_inserter(buf), "{:.17g}", values[k]);
  }
  buf.push_back('\n');
  out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw ArgumentError("write failed for " + path_.string());
  out_.close();
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  if (columns.size() != header.size()) throw ArgumentError("write_columns: header/column mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw ArgumentError("write_columns: columns differ in length");
  }
  CsvWriter w(path, header);
  std::vector<double> row(columns.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) row[c] = columns[c][r];
    w.row(row);
  }
  w.close();
}

}  // namespace stratrt
