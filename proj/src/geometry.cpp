#include "gibbspd/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gibbspd/errors.hpp"

namespace gibbspd {

Window::Window(double x_min_, double x_max_, double y_min_, double y_max_)
    : x_min(x_min_), x_max(x_max_), y_min(y_min_), y_max(y_max_) {
  if (!(x_min < x_max) || !(y_min < y_max))
    throw InvalidConfig("window: degenerate extent");
  if (x_min < 0.0 || y_min < 0.0)
    throw InvalidConfig("window: must lie on the nonnegative wedge");
}

namespace {

double polygon_area(const std::vector<Point>& poly) {
  double twice = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

// Sutherland-Hodgman clip of a convex polygon against the half-plane
// n.x <= c (keep side).
void clip_halfplane(std::vector<Point>& poly, const Point& n, double c,
                    std::vector<Point>& scratch) {
  scratch.clear();
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point& cur = poly[i];
    const Point& nxt = poly[(i + 1) % m];
    const double dc = n.dot(cur) - c;
    const double dn = n.dot(nxt) - c;
    const double t = dc / (dc - dn);  // crossing parameter, valid when signs differ
    if (dc <= 0.0) {
      scratch.push_back(cur);
      if (dn > 0.0) scratch.push_back(cur + t * (nxt - cur));
    } else if (dn <= 0.0) {
      scratch.push_back(cur + t * (nxt - cur));
    }
  }
  poly.swap(scratch);
}

}  // namespace

DirichletTessellation build_tessellation(const std::vector<Point>& generators,
                                         const Window& window) {
  const std::size_t m = generators.size();
  if (m == 0) throw EmptyInput("build_tessellation: no generators");
  for (std::size_t i = 0; i < m; ++i) {
    if (!window.strictly_contains(generators[i]))
      throw OutOfWindow("build_tessellation: generator " + std::to_string(i) +
                        " not strictly inside window");
    for (std::size_t j = i + 1; j < m; ++j) {
      if (generators[i].x() == generators[j].x() &&
          generators[i].y() == generators[j].y())
        throw DuplicateGenerator("build_tessellation: generators " +
                                 std::to_string(i) + " and " +
                                 std::to_string(j) + " coincide");
    }
  }

  DirichletTessellation tess{generators, std::vector<double>(m, 0.0), window};

  std::vector<Point> poly, scratch;
  poly.reserve(m + 4);
  scratch.reserve(m + 4);
  for (std::size_t i = 0; i < m; ++i) {
    poly.assign({Point(window.x_min, window.y_min), Point(window.x_max, window.y_min),
                 Point(window.x_max, window.y_max), Point(window.x_min, window.y_max)});
    for (std::size_t j = 0; j < m && !poly.empty(); ++j) {
      if (j == i) continue;
      // Keep the side nearer generator i: 2 (pj - pi) . x <= |pj|^2 - |pi|^2.
      const Point n = 2.0 * (generators[j] - generators[i]);
      const double c = generators[j].squaredNorm() - generators[i].squaredNorm();
      clip_halfplane(poly, n, c, scratch);
    }
    tess.areas[i] = poly.size() >= 3 ? polygon_area(poly) : 0.0;
  }

  double total = 0.0;
  for (double a : tess.areas) total += a;
  if (std::abs(total - window.area()) > 1e-9 * window.area())
    throw Error("build_tessellation: tile areas do not partition the window");
  return tess;
}

std::size_t tile_index(const Point& x, const DirichletTessellation& tess) {
  if (!tess.window.contains(x))
    throw OutOfWindow("tile_index: point outside window");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tess.generators.size(); ++i) {
    const double d2 = (x - tess.generators[i]).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

double intensity_at(const Point& x, const DirichletTessellation& tess) {
  return tess.areas[tile_index(x, tess)];
}

double intensity_integral(const DirichletTessellation& tess) {
  double sum = 0.0;
  for (double a : tess.areas) sum += a * a;
  return sum;
}

nlohmann::json to_json(const Window& window) {
  return {{"x_min", window.x_min},
          {"x_max", window.x_max},
          {"y_min", window.y_min},
          {"y_max", window.y_max}};
}

Window window_from_json(const nlohmann::json& j) {
  return Window(j.at("x_min").get<double>(), j.at("x_max").get<double>(),
                j.at("y_min").get<double>(), j.at("y_max").get<double>());
}

nlohmann::json to_json(const DirichletTessellation& tess) {
  nlohmann::json gens = nlohmann::json::array();
  for (const Point& p : tess.generators) gens.push_back({p.x(), p.y()});
  return {{"window", to_json(tess.window)},
          {"generators", gens},
          {"areas", tess.areas}};
}

DirichletTessellation tessellation_from_json(const nlohmann::json& j) {
  DirichletTessellation tess{{}, {}, window_from_json(j.at("window"))};
  for (const auto& g : j.at("generators"))
    tess.generators.emplace_back(g.at(0).get<double>(), g.at(1).get<double>());
  tess.areas = j.at("areas").get<std::vector<double>>();
  if (tess.areas.size() != tess.generators.size())
    throw IoError("tessellation json: generators/areas size mismatch");
  return tess;
}

}  // namespace gibbspd
