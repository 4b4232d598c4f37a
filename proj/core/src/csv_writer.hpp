#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qkpz/errors.hpp"

namespace qkpz {
namespace detail {

// RFC-4180-style CSV: comma separated, '.' decimal separator, LF line
// endings, one '#'-prefixed schema comment line before the header. Numbers
// are printed with %.17g so reruns are byte-identical.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& schema,
            const std::vector<std::string>& columns)
      : out_(path, std::ios::binary) {
    if (!out_) throw IntegrationError("CsvWriter: cannot open " + path.string());
    out_ << "# schema: " << schema << "\n";
    write_row(columns);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  static std::string num(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
  }
  static std::string num(int value) { return std::to_string(value); }
  static std::string num(std::int64_t value) { return std::to_string(value); }

 private:
  std::ofstream out_;
};

}  // namespace detail
}  // namespace qkpz
