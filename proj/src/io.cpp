#include "qjh/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qjh::io {

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_file: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_float(v));
  rows.push_back(std::move(row));
}

std::string CsvTable::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

namespace {
constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMargin = 48;

struct Scale {
  double lo, hi;
  double map(double v, int pixels) const {
    const double f = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return kMargin + f * pixels;
  }
};

std::string svg_header(const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  return s.str();
}
}  // namespace

std::string line_chart_svg(const RealVector& xs, const std::vector<RealVector>& ys,
                           const std::string& title) {
  const int px = kWidth - 2 * kMargin;
  const int py = kHeight - 2 * kMargin;
  Scale sx{xs.minCoeff(), xs.maxCoeff()};
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const auto& y : ys) {
    if (!y.size()) continue;
    lo = first ? y.minCoeff() : std::min(lo, y.minCoeff());
    hi = first ? y.maxCoeff() : std::max(hi, y.maxCoeff());
    first = false;
  }
  Scale sy{lo, hi};
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ostringstream s;
  s << svg_header(title);
  s << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << px
    << "\" height=\"" << py << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (std::size_t k = 0; k < ys.size(); ++k) {
    s << "<polyline fill=\"none\" stroke=\"" << colors[k % 4]
      << "\" stroke-width=\"1.5\" points=\"";
    for (Index i = 0; i < xs.size() && i < ys[k].size(); ++i) {
      const double x = sx.map(xs[i], px);
      const double y = kHeight - sy.map(ys[k][i], py);
      s << x << ',' << y << ' ';
    }
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string histogram_svg(const RealVector& centers, const RealVector& density,
                          const std::string& title) {
  const int px = kWidth - 2 * kMargin;
  const int py = kHeight - 2 * kMargin;
  if (centers.size() < 2) return svg_header(title) + "</svg>\n";
  const double width = centers[1] - centers[0];
  Scale sx{centers.minCoeff() - width / 2, centers.maxCoeff() + width / 2};
  Scale sy{0.0, std::max(1e-12, density.maxCoeff())};

  std::ostringstream s;
  s << svg_header(title);
  s << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << px
    << "\" height=\"" << py << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (Index i = 0; i < centers.size(); ++i) {
    const double x0 = sx.map(centers[i] - width / 2, px);
    const double x1 = sx.map(centers[i] + width / 2, px);
    const double h = (sy.map(density[i], py) - kMargin);
    s << "<rect x=\"" << x0 << "\" y=\"" << (kHeight - kMargin - h) << "\" width=\""
      << (x1 - x0) << "\" height=\"" << h << "\" fill=\"#1f77b4\" stroke=\"white\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace qjh::io
