#ifndef TAILTREND_SVG_HPP
#define TAILTREND_SVG_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace tailtrend::svg {

// Histogram of values with the standard normal density overlaid.
void write_histogram(const std::filesystem::path& path, const std::vector<double>& values,
                     const std::string& title, int bins = 25);

struct Series {
  std::string label;
  std::string dash;  // "" solid, "6,4" dashed, "2,3" dotted
  std::vector<double> x;
  std::vector<double> y;
};

// Line chart (rate vs k or lambda) with an optional horizontal reference line.
void write_line_chart(const std::filesystem::path& path, const std::vector<Series>& series,
                      const std::string& title, const std::string& x_label,
                      double hline = -1.0);

}  // namespace tailtrend::svg

#endif  // TAILTREND_SVG_HPP
