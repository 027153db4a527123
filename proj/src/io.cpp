#include "dressed/io.hpp"

#include "dressed/core.hpp"

#include <cmath>
#include <cstdio>

namespace dressed {

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) {
    throw ConfigError("cannot open '" + path.string() + "' for writing");
  }
  write_fields(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) {
    fields.push_back(format_double(v));
  }
  row(fields);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) {
    throw ConfigError("CsvWriter: row has " + std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(columns_));
  }
  write_fields(fields);
  ++rows_;
}

void CsvWriter::write_fields(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) {
      out_ << ',';
    }
    out_ << csv_escape(fields[i]);
  }
  out_ << "\r\n";
  if (!out_) {
    throw NumericalError("CsvWriter: write failed");
  }
}

} // namespace dressed
