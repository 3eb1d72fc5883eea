#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace gdlab {

// Deterministic CSV writer: fixed column order, '\n' line ends, shortest
// round-trip double formatting. Byte-identical output for identical data.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) {
    out_.open(path, std::ios::binary);
    if (!out_) throw NumericError("cannot open output file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
  }

  void field(double v) {
    sep();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out_ << buf;
  }

  void field(std::size_t v) {
    sep();
    out_ << v;
  }

  void field(const std::string& v) {
    sep();
    out_ << v;
  }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::ofstream out_;
  bool first_ = true;
};

}  // namespace gdlab
