#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace emt::harness {

/// Shortest round-trip decimal form; "nan"/"inf"/"-inf" for non-finite values.
[[nodiscard]] std::string format_double(double value);

/// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in quotes with embedded quotes doubled.
[[nodiscard]] std::string csv_escape(std::string_view field);

/// In-memory CSV table written with CRLF record separators.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& cell(double value);
  CsvTable& cell(std::int64_t value);
  CsvTable& cell(std::uint64_t value);
  CsvTable& cell(bool value);
  CsvTable& cell(std::string_view value);
  // Without this, string literals would bind to the bool overload.
  CsvTable& cell(const char* value) { return cell(std::string_view(value)); }
  void end_row();

  [[nodiscard]] std::string str() const;
  void write(const std::filesystem::path& path) const;
  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::vector<std::string> pending_;
  std::string text_;
};

}  // namespace emt::harness
