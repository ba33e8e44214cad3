#include "tailtrend/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "tailtrend/core.hpp"

namespace tailtrend::svg {

namespace {

constexpr double kW = 480.0, kH = 320.0;
constexpr double kL = 50.0, kR = 15.0, kT = 30.0, kB = 40.0;

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

void title_and_frame(std::ofstream& out, const std::string& title) {
  out << "<text x=\"" << kW / 2 << "\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">"
      << title << "</text>\n"
      << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR
      << "\" height=\"" << kH - kT - kB
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
}

double sx(double x, double x0, double x1) {
  return kL + (x - x0) / (x1 - x0) * (kW - kL - kR);
}
double sy(double y, double y0, double y1) {
  return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB);
}

void axis_labels(std::ofstream& out, double x0, double x1, double y0, double y1,
                 const std::string& x_label) {
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    out << "<text x=\"" << sx(xv, x0, x1) << "\" y=\"" << kH - kB + 16
        << "\" font-size=\"10\" text-anchor=\"middle\">" << format_double(std::round(xv * 1000) / 1000)
        << "</text>\n";
    out << "<text x=\"" << kL - 6 << "\" y=\"" << sy(yv, y0, y1) + 3
        << "\" font-size=\"10\" text-anchor=\"end\">" << format_double(std::round(yv * 1000) / 1000)
        << "</text>\n";
  }
  out << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 8
      << "\" font-size=\"11\" text-anchor=\"middle\">" << x_label << "</text>\n";
}

}  // namespace

void write_histogram(const std::filesystem::path& path, const std::vector<double>& values,
                     const std::string& title, int bins) {
  if (values.empty()) throw std::invalid_argument("svg: empty histogram data");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  lo = std::min(lo, -4.0);
  hi = std::max(hi, 4.0);
  const double width = (hi - lo) / bins;
  std::vector<double> count(bins, 0.0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    count[b] += 1.0;
  }
  // density scale
  const double n = static_cast<double>(values.size());
  double ymax = 0.45;
  for (double& c : count) {
    c /= n * width;
    ymax = std::max(ymax, c);
  }
  ymax *= 1.05;

  std::ofstream out = open(path);
  title_and_frame(out, title);
  for (int b = 0; b < bins; ++b) {
    const double x0 = sx(lo + b * width, lo, hi);
    const double x1 = sx(lo + (b + 1) * width, lo, hi);
    const double y = sy(count[b], 0.0, ymax);
    out << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << x1 - x0
        << "\" height=\"" << sy(0.0, 0.0, ymax) - y
        << "\" fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\"/>\n";
  }
  out << "<path fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" d=\"";
  for (int i = 0; i <= 200; ++i) {
    const double x = lo + (hi - lo) * i / 200.0;
    const double dens = std::exp(-x * x / 2.0) / std::sqrt(2.0 * std::numbers::pi);
    out << (i == 0 ? 'M' : 'L') << sx(x, lo, hi) << ' ' << sy(dens, 0.0, ymax) << ' ';
  }
  out << "\"/>\n";
  axis_labels(out, lo, hi, 0.0, ymax, "normalized estimate");
  out << "</svg>\n";
}

void write_line_chart(const std::filesystem::path& path, const std::vector<Series>& series,
                      const std::string& title, const std::string& x_label, double hline) {
  if (series.empty()) throw std::invalid_argument("svg: no series");
  double x0 = 1e300, x1 = -1e300, y1 = 0.0;
  for (const auto& s : series) {
    for (double x : s.x) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
    }
    for (double y : s.y) y1 = std::max(y1, y);
  }
  if (hline > 0.0) y1 = std::max(y1, hline * 2.0);
  y1 = std::min(std::max(y1 * 1.15, 0.05), 1.0);
  if (x1 <= x0) x1 = x0 + 1.0;

  std::ofstream out = open(path);
  title_and_frame(out, title);
  if (hline > 0.0) {
    out << "<line x1=\"" << kL << "\" y1=\"" << sy(hline, 0.0, y1) << "\" x2=\"" << kW - kR
        << "\" y2=\"" << sy(hline, 0.0, y1)
        << "\" stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"1,2\"/>\n";
  }
  const char* colors[] = {"#1b77b4", "#d64f2a", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    out << "<path fill=\"none\" stroke=\"" << colors[si % 6] << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << " d=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << (i == 0 ? 'M' : 'L') << sx(s.x[i], x0, x1) << ' ' << sy(s.y[i], 0.0, y1) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << kW - kR - 5 << "\" y=\"" << kT + 14 + 13 * si
        << "\" font-size=\"10\" text-anchor=\"end\" fill=\"" << colors[si % 6] << "\">"
        << s.label << "</text>\n";
  }
  axis_labels(out, x0, x1, 0.0, y1, x_label);
  out << "</svg>\n";
}

}  // namespace tailtrend::svg
