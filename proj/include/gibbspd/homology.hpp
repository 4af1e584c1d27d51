#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gibbspd/geometry.hpp"

namespace gibbspd {

struct PointCloud {
  std::vector<Point> points;
  std::string label;

  std::size_t size() const { return points.size(); }
};

/// Synthetic data source: polar curve r(phi) = a + b cos(2 phi) sampled at
/// uniform angles with isotropic Gaussian jitter. With a < b the curve has
/// two large and two small lobes.
struct PolarCurveSpec {
  double a = 0.5;
  double b = 1.0;
  int n = 100;
  double noise_sd = 0.1;
};

PointCloud sample_polar_curve(const PolarCurveSpec& spec, std::uint64_t seed);

/// Multiset of tilted (birth, persistence) points for one homology dimension.
struct PersistenceDiagram {
  std::vector<Point> points;  // x = birth, y = persistence, both >= 0
  int dimension = 1;
  /// Classes alive at max_scale: connected components for dimension 0,
  /// unfilled loops for dimension 1 (the latter are truncated, not listed).
  std::size_t essential_classes = 0;
  std::size_t truncated_features = 0;
  double max_scale = 0.0;

  std::size_t size() const { return points.size(); }
};

/// Tilted representation of a (birth, death) pair: (b, d - b).
/// Throws NegativePersistence when d < b.
Point tilt(double birth, double death);

double cloud_diameter(const PointCloud& cloud);

/// Vietoris-Rips persistence for dimension 0 or 1. A simplex enters the
/// filtration at its diameter; simplices beyond max_scale are not built.
/// Zero-persistence pairs are dropped. Output points are sorted by
/// (birth, persistence) and independent of the input point order.
PersistenceDiagram vietoris_rips_diagram(const PointCloud& cloud, int dim,
                                         double max_scale);

/// Same, with max_scale defaulted to the cloud diameter so every finite
/// feature is resolved.
PersistenceDiagram vietoris_rips_diagram(const PointCloud& cloud, int dim);

void write_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_cloud_csv(const std::filesystem::path& path);

void write_diagram_csv(const PersistenceDiagram& diagram,
                       const std::filesystem::path& path);
PersistenceDiagram read_diagram_csv(const std::filesystem::path& path);

}  // namespace gibbspd
