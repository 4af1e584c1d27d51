#include "gibbspd/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>

#include "gibbspd/errors.hpp"

namespace gibbspd {

namespace {

constexpr double kPanel = 320.0;
constexpr double kMargin = 46.0;

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

void draw_panel(std::string& svg, const Window& window, std::span<const Point> points,
                double x0, const std::string& title) {
  const double plot = kPanel - 2.0 * kMargin;
  const auto sx = [&](double b) {
    return x0 + kMargin + plot * (b - window.x_min) / window.width();
  };
  const auto sy = [&](double p) {
    return kMargin + plot * (1.0 - (p - window.y_min) / window.height());
  };

  svg += "<rect x=\"" + num(sx(window.x_min)) + "\" y=\"" + num(sy(window.y_max)) +
         "\" width=\"" + num(plot) + "\" height=\"" + num(plot) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(x0 + kPanel / 2.0) + "\" y=\"" + num(kPanel - 8.0) +
         "\" text-anchor=\"middle\" font-size=\"12\">birth</text>\n";
  svg += "<text x=\"" + num(x0 + 14.0) + "\" y=\"" + num(kPanel / 2.0) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " +
         num(x0 + 14.0) + " " + num(kPanel / 2.0) + ")\">persistence</text>\n";
  if (!title.empty())
    svg += "<text x=\"" + num(x0 + kPanel / 2.0) + "\" y=\"" + num(kMargin - 14.0) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + title + "</text>\n";
  for (const Point& p : points)
    svg += "<circle cx=\"" + num(sx(p.x())) + "\" cy=\"" + num(sy(p.y())) +
           "\" r=\"3\" fill=\"steelblue\"/>\n";
}

void write_svg(const std::string& body, double width, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << kPanel << "\" viewBox=\"0 0 " << width << " " << kPanel
      << "\">\n"
      << body << "</svg>\n";
}

}  // namespace

void plot_diagram_svg(const PersistenceDiagram& diagram, const Window& window,
                      const std::filesystem::path& path) {
  std::string body;
  draw_panel(body, window, diagram.points, 0.0, "");
  write_svg(body, kPanel, path);
}

void plot_samples_svg(const SampleSet& samples, const Window& window,
                      std::int64_t first_iterate, std::int64_t second_iterate,
                      const std::filesystem::path& path) {
  if (samples.records.empty()) throw EmptySampleSet("plot: no recorded samples");
  const auto nearest = [&](std::int64_t target) -> const SampleSet::Record& {
    const auto it = std::min_element(
        samples.records.begin(), samples.records.end(),
        [&](const auto& a, const auto& b) {
          return std::abs(a.iteration - target) < std::abs(b.iteration - target);
        });
    return *it;
  };
  const auto& first = nearest(first_iterate);
  const auto& second = nearest(second_iterate);
  std::string body;
  draw_panel(body, window, first.points, 0.0,
             "iteration " + std::to_string(first.iteration));
  draw_panel(body, window, second.points, kPanel,
             "iteration " + std::to_string(second.iteration));
  write_svg(body, 2.0 * kPanel, path);
}

}  // namespace gibbspd
