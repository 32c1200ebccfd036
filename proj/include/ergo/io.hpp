#pragma once

#include <string>
#include <vector>

namespace ergo {

/// Writes to "<path>.tmp" and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// Shortest round-trip decimal form.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static line plot; non-finite points are dropped.
std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series);

}  // namespace ergo
