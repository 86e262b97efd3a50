#ifndef HLAB_REPORT_HPP
#define HLAB_REPORT_HPP

// Diff-able experiment artifacts: CSV tables with a two-line header
// (column names, then config hash + seed) and self-contained SVG plots.
// All numeric formatting is fixed so identical configs produce
// byte-identical files.

#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hlab/core.hpp"

namespace hlab {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::span<const double> values) {
    detail::require(values.size() == columns_.size(), "CsvTable: column count mismatch");
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows_.push_back(std::move(row));
  }

  void add_row(std::vector<std::string> values) {
    detail::require(values.size() == columns_.size(), "CsvTable: column count mismatch");
    rows_.push_back(std::move(values));
  }

  std::string serialize(std::uint64_t config_hash, std::uint64_t seed) const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns_.size(); ++i)
      out << (i ? "," : "") << columns_[i];
    out << "\n";
    char meta[64];
    std::snprintf(meta, sizeof meta, "# config_hash=%016llx seed=%llu",
                  static_cast<unsigned long long>(config_hash),
                  static_cast<unsigned long long>(seed));
    out << meta << "\n";
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
    return out.str();
  }

  void write(const std::string& path, std::uint64_t config_hash, std::uint64_t seed) const {
    std::ofstream f(path, std::ios::binary);
    detail::require(f.good(), "CsvTable: cannot open output file");
    f << serialize(config_hash, seed);
  }

  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Minimal scatter/line plot; optionally log10 on either axis.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           std::span<const double> xs, std::span<const double> ys,
                           bool logx = false, bool logy = false) {
  detail::require(xs.size() == ys.size() && !xs.empty(), "svg: size mismatch");
  const int W = 640, H = 420, ML = 60, MR = 20, MT = 40, MB = 50;
  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(std::abs(v)) : v; };
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xmin = std::min(xmin, tx(xs[i]));
    xmax = std::max(xmax, tx(xs[i]));
    ymin = std::min(ymin, ty(ys[i]));
    ymax = std::max(ymax, ty(ys[i]));
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double v) { return ML + (tx(v) - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double v) { return H - MB - (ty(v) - ymin) / (ymax - ymin) * (H - MT - MB); };

  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  s << "<rect width='100%' height='100%' fill='white'/>\n";
  s << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='15'>" << title
    << "</text>\n";
  s << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
    << "' stroke='black'/>\n";
  s << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
    << "' stroke='black'/>\n";
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "<text x='%d' y='%d' font-size='11'>%s%.4g .. %.4g</text>\n", ML, H - 18,
                logx ? "log10 x: " : "x: ", xmin, xmax);
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<text x='6' y='%d' font-size='11'>%s%.4g .. %.4g</text>\n", MT - 8,
                logy ? "log10 y: " : "y: ", ymin, ymax);
  s << buf;
  s << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(xs[i]), py(ys[i]));
    s << buf;
  }
  s << "'/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "<circle cx='%.2f' cy='%.2f' r='3' fill='crimson'/>\n",
                  px(xs[i]), py(ys[i]));
    s << buf;
  }
  s << "</svg>\n";
  std::ofstream f(path, std::ios::binary);
  detail::require(f.good(), "svg: cannot open output file");
  f << s.str();
}

}  // namespace hlab

#endif  // HLAB_REPORT_HPP
