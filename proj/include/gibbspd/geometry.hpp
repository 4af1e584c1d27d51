#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

namespace gibbspd {

using Point = Eigen::Vector2d;

/// Rectangular observation window on the birth/persistence wedge.
/// Both coordinates are nonnegative by construction.
struct Window {
  Window(double x_min, double x_max, double y_min, double y_max);

  double x_min, x_max, y_min, y_max;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  bool contains(const Point& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  bool strictly_contains(const Point& p) const {
    return p.x() > x_min && p.x() < x_max && p.y() > y_min && p.y() < y_max;
  }
};

/// Dirichlet (Voronoi) tessellation of a window.
///
/// areas[i] is the area of the cell of generators[i] clipped to the window;
/// it doubles as the piecewise-constant spatial intensity and as the
/// quadrature weight of the generator.
struct DirichletTessellation {
  std::vector<Point> generators;
  std::vector<double> areas;
  Window window;

  std::size_t size() const { return generators.size(); }
};

/// Build the tessellation by half-plane clipping of the window rectangle,
/// one cell per generator. O(m^2) overall; fine at desk scale.
///
/// Throws EmptyInput, OutOfWindow (generator not strictly inside) or
/// DuplicateGenerator (exact coordinate equality).
DirichletTessellation build_tessellation(const std::vector<Point>& generators,
                                         const Window& window);

/// Index of the generator nearest to x; ties broken by smallest index.
/// Throws OutOfWindow when x lies outside the (closed) window.
std::size_t tile_index(const Point& x, const DirichletTessellation& tess);

/// Piecewise-constant intensity: the area of the tile containing x.
double intensity_at(const Point& x, const DirichletTessellation& tess);

/// Integral of the intensity over the window: sum of squared tile areas.
double intensity_integral(const DirichletTessellation& tess);

nlohmann::json to_json(const Window& window);
Window window_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DirichletTessellation& tess);
DirichletTessellation tessellation_from_json(const nlohmann::json& j);

}  // namespace gibbspd
