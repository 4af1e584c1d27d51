#include "gibbspd/homology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gibbspd/errors.hpp"
#include "gibbspd/rng.hpp"

namespace gibbspd {

PointCloud sample_polar_curve(const PolarCurveSpec& spec, std::uint64_t seed) {
  if (spec.n < 3) throw InvalidConfig("polar curve: need n >= 3");
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.a) || !std::isfinite(spec.b))
    throw InvalidConfig("polar curve: invalid parameters");

  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = spec.a + spec.b * std::cos(2.0 * phi);
    Point p(r * std::cos(phi), r * std::sin(phi));
    if (spec.noise_sd > 0.0) {
      p.x() += rng.normal(0.0, spec.noise_sd);
      p.y() += rng.normal(0.0, spec.noise_sd);
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

Point tilt(double birth, double death) {
  if (birth < 0.0) throw Error("tilt: negative birth");
  if (death < birth) throw NegativePersistence("tilt: death before birth");
  return Point(birth, death - birth);
}

double cloud_diameter(const PointCloud& cloud) {
  double best = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = i + 1; j < cloud.size(); ++j)
      best = std::max(best, (cloud.points[i] - cloud.points[j]).norm());
  return best;
}

namespace {

struct Edge {
  double diam;
  std::int32_t u, v;  // u < v
};

struct Triangle {
  double diam;
  std::int32_t a, b, c;  // a < b < c
};

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool merge(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
  std::vector<std::int32_t> parent;
};

// Symmetric difference of two ascending index lists.
void xor_into(std::vector<std::int32_t>& col, const std::vector<std::int32_t>& other,
              std::vector<std::int32_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                std::back_inserter(scratch));
  col.swap(scratch);
}

void sort_diagram(PersistenceDiagram& diagram) {
  std::sort(diagram.points.begin(), diagram.points.end(),
            [](const Point& a, const Point& b) {
              return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
            });
}

}  // namespace

PersistenceDiagram vietoris_rips_diagram(const PointCloud& cloud, int dim,
                                         double max_scale) {
  if (cloud.size() == 0) throw EmptyInput("vietoris_rips_diagram: empty cloud");
  if (dim != 0 && dim != 1)
    throw InvalidConfig("vietoris_rips_diagram: dimension must be 0 or 1");
  if (!(max_scale > 0.0))
    throw InvalidConfig("vietoris_rips_diagram: max_scale must be positive");

  const std::int32_t n = static_cast<std::int32_t>(cloud.size());
  std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j) {
      const double d = (cloud.points[i] - cloud.points[j]).norm();
      dist[static_cast<std::size_t>(i) * n + j] = d;
      dist[static_cast<std::size_t>(j) * n + i] = d;
    }
  const auto d_at = [&](std::int32_t i, std::int32_t j) {
    return dist[static_cast<std::size_t>(i) * n + j];
  };

  std::vector<Edge> edges;
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j)
      if (d_at(i, j) <= max_scale) edges.push_back({d_at(i, j), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.diam != b.diam) return a.diam < b.diam;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });

  PersistenceDiagram diagram;
  diagram.dimension = dim;
  diagram.max_scale = max_scale;

  // Dimension 0: Kruskal sweep; a merging edge kills a component born at 0.
  UnionFind uf(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> merges(edges.size(), 0);
  std::size_t components = static_cast<std::size_t>(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (uf.merge(edges[e].u, edges[e].v)) {
      merges[e] = 1;
      --components;
      if (dim == 0 && edges[e].diam > 0.0)
        diagram.points.push_back(tilt(0.0, edges[e].diam));
    }
  }
  if (dim == 0) {
    diagram.essential_classes = components;
    sort_diagram(diagram);
    return diagram;
  }

  // Dimension 1: reduce triangle boundaries over the sorted edge basis.
  std::vector<Triangle> triangles;
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j) {
      const double dij = d_at(i, j);
      if (dij > max_scale) continue;
      for (std::int32_t k = j + 1; k < n; ++k) {
        const double diam = std::max({dij, d_at(i, k), d_at(j, k)});
        if (diam <= max_scale) triangles.push_back({diam, i, j, k});
      }
    }
  std::sort(triangles.begin(), triangles.end(),
            [](const Triangle& a, const Triangle& b) {
              if (a.diam != b.diam) return a.diam < b.diam;
              if (a.a != b.a) return a.a < b.a;
              if (a.b != b.b) return a.b < b.b;
              return a.c < b.c;
            });

  std::vector<std::int32_t> edge_id(static_cast<std::size_t>(n) * n, -1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    edge_id[static_cast<std::size_t>(edges[e].u) * n + edges[e].v] =
        static_cast<std::int32_t>(e);
  }
  const auto eid = [&](std::int32_t i, std::int32_t j) {
    return edge_id[static_cast<std::size_t>(i) * n + j];
  };

  // pivot[e]: index into stored reduced columns whose lowest entry is e.
  std::vector<std::int32_t> pivot(edges.size(), -1);
  std::vector<std::vector<std::int32_t>> stored;
  std::vector<std::int32_t> column, scratch;
  std::size_t killed_creators = 0;

  for (const Triangle& t : triangles) {
    column = {eid(t.a, t.b), eid(t.a, t.c), eid(t.b, t.c)};
    std::sort(column.begin(), column.end());
    while (!column.empty()) {
      const std::int32_t low = column.back();
      const std::int32_t hit = pivot[static_cast<std::size_t>(low)];
      if (hit < 0) break;
      xor_into(column, stored[static_cast<std::size_t>(hit)], scratch);
    }
    if (column.empty()) continue;  // creator of a 2-cycle, irrelevant here
    const std::int32_t low = column.back();
    pivot[static_cast<std::size_t>(low)] = static_cast<std::int32_t>(stored.size());
    stored.push_back(column);
    ++killed_creators;
    const double birth = edges[static_cast<std::size_t>(low)].diam;
    if (t.diam > birth) diagram.points.push_back(tilt(birth, t.diam));
  }

  const std::size_t creators =
      edges.size() - (static_cast<std::size_t>(n) - components);
  diagram.truncated_features = creators - killed_creators;
  diagram.essential_classes = 0;
  sort_diagram(diagram);
  return diagram;
}

PersistenceDiagram vietoris_rips_diagram(const PointCloud& cloud, int dim) {
  const double diameter = cloud_diameter(cloud);
  return vietoris_rips_diagram(cloud, dim, diameter > 0.0 ? diameter : 1.0);
}

namespace {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{}) throw IoError("csv: bad number '" + s + "'");
  return x;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void write_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << "x,y\n";
  for (const Point& p : cloud.points)
    out << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
}

PointCloud read_cloud_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y", 0) != 0)
    throw IoError("cloud csv: missing x,y header in " + path.string());
  PointCloud cloud;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 2) throw IoError("cloud csv: short row");
    cloud.points.emplace_back(parse_double(fields[0]), parse_double(fields[1]));
  }
  if (cloud.points.empty()) throw EmptyInput("cloud csv: no points");
  return cloud;
}

void write_diagram_csv(const PersistenceDiagram& diagram,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << "birth,persistence,dim\n";
  for (const Point& p : diagram.points)
    out << format_double(p.x()) << ',' << format_double(p.y()) << ','
        << diagram.dimension << '\n';
}

PersistenceDiagram read_diagram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("birth,persistence,dim", 0) != 0)
    throw IoError("diagram csv: missing header in " + path.string());
  PersistenceDiagram diagram;
  bool have_dim = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 3) throw IoError("diagram csv: short row");
    diagram.points.emplace_back(parse_double(fields[0]), parse_double(fields[1]));
    const int d = static_cast<int>(parse_double(fields[2]));
    if (!have_dim) {
      diagram.dimension = d;
      have_dim = true;
    } else if (diagram.dimension != d) {
      throw IoError("diagram csv: mixed homology dimensions");
    }
  }
  return diagram;
}

}  // namespace gibbspd
