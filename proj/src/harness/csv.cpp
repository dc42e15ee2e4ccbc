#include "emt/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>


namespace emt::harness {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return {buf, res.ptr};
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(std::string_view(h));
  end_row();
  rows_ = 0;
}

CsvTable& CsvTable::cell(double value) {
  pending_.push_back(format_double(value));
  return *this;
}

CsvTable& CsvTable::cell(std::int64_t value) {
  pending_.push_back(std::to_string(value));
  return *this;
}

CsvTable& CsvTable::cell(std::uint64_t value) {
  pending_.push_back(std::to_string(value));
  return *this;
}

CsvTable& CsvTable::cell(bool value) {
  pending_.emplace_back(value ? "true" : "false");
  return *this;
}

CsvTable& CsvTable::cell(std::string_view value) {
  pending_.push_back(csv_escape(value));
  return *this;
}

void CsvTable::end_row() {
  if (pending_.size() != columns_) throw std::logic_error("CSV row width does not match the header");
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    if (i) text_ += ',';
    text_ += pending_[i];
  }
  text_ += "\r\n";
  pending_.clear();
  ++rows_;
}

std::string CsvTable::str() const { return text_; }

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text_;
}

}  // namespace emt::harness
