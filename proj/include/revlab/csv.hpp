#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "revlab/errors.hpp"

namespace revlab {

// '.' decimal, 17 significant digits: doubles round-trip losslessly and the
// files are byte-stable across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  using Cell = std::variant<std::string, double, long long>;

  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw ArgumentError("cannot open CSV output: " + path);
  }

  void header(const std::vector<std::string>& cols) { line(cols); }

  void row(const std::vector<Cell>& cells) {
    std::vector<std::string> cols;
    cols.reserve(cells.size());
    for (const auto& c : cells) {
      if (std::holds_alternative<std::string>(c))
        cols.push_back(std::get<std::string>(c));
      else if (std::holds_alternative<double>(c))
        cols.push_back(format_double(std::get<double>(c)));
      else
        cols.push_back(std::to_string(std::get<long long>(c)));
    }
    line(cols);
  }

 private:
  void line(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out_ << ',';
      out_ << cols[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
};

}  // namespace revlab
