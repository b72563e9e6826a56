// Output plumbing shared by the CLI: canonical float formatting, atomic file
// writes, checksums, CSV assembly, minimal static SVG plots.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qjh/types.hpp"

namespace qjh::io {

// Shortest round-trippable decimal with 17 significant digits.
std::string format_float(double v);

// Write via a temp file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  std::string serialize() const;  // LF line endings, header mandatory
};

// Polyline chart; one series per row of ys.
std::string line_chart_svg(const RealVector& xs, const std::vector<RealVector>& ys,
                           const std::string& title);
std::string histogram_svg(const RealVector& centers, const RealVector& density,
                          const std::string& title);

}  // namespace qjh::io
