#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace slipflow {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g, so that parsing the text gives back the same double.
std::string format_double(double value);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(const std::string& field);

/// RFC-4180 table writer with CRLF line ends.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<Cell>& cells);
  std::size_t columns() const { return columns_; }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_;
};

}  // namespace slipflow
