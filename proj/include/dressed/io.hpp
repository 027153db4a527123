#pragma once

// RFC-4180 CSV output with round-trip exact number formatting.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dressed {

/// %.16e (17 significant digits); "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& fields);
  std::size_t rows() const { return rows_; }

private:
  void write_fields(const std::vector<std::string>& fields);

  std::ofstream out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

} // namespace dressed
