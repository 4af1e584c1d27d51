#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "gibbspd/geometry.hpp"
#include "gibbspd/homology.hpp"

namespace gibbspd {

/// Interaction distance thresholds 0 = r_0 < r_1 < ... < r_k. A pair at
/// distance d interacts through bin l when r_{l-1} <= d < r_l (half-open,
/// so the bins partition [0, r_k)); beyond r_k there is no interaction.
struct InteractionThresholds {
  explicit InteractionThresholds(std::vector<double> r);

  std::vector<double> r;

  std::size_t size() const { return r.size(); }
  double reach() const { return r.back(); }

  /// Zero-based bin index for a distance, or -1 when d >= r_k.
  int bin(double distance) const;
};

/// Pairwise-interacting point process for persistence diagrams: Dirichlet
/// tile areas as the spatial intensity s, a piecewise-constant pairwise
/// interaction exp(-theta_l) on the distance bins, and a reference Poisson
/// mean lambda_w for the point count. The normalizing constant is never
/// evaluated; every use is a density ratio.
struct PcpiModel {
  PcpiModel(InteractionThresholds thresholds, Eigen::VectorXd theta,
            DirichletTessellation intensity, double lambda_w);

  InteractionThresholds thresholds;
  Eigen::VectorXd theta;  // componentwise >= 0 (inhibitory only)
  DirichletTessellation intensity;
  Window window;          // the tessellation window
  double lambda_w;

  double log_s(const Point& x) const { return std::log(intensity_at(x, intensity)); }
};

/// Component l counts the points of `others` whose distance from x falls in
/// bin l. x itself must not be in `others`.
Eigen::VectorXi interaction_covariates(const Point& x, std::span<const Point> others,
                                       const InteractionThresholds& thresholds);

/// Interaction function value in (0, 1]: exp(-theta_l) for the active bin,
/// 1 at or beyond the last threshold.
double pcpi(const Point& x, const Point& y, const PcpiModel& model);

/// log pcpi, exact (no exp/log round trip).
double log_pcpi(const Point& x, const Point& y, const PcpiModel& model);

/// Gibbs log-potential of a configuration: sum of log intensities plus the
/// sum of pairwise log interactions.
double log_potential(std::span<const Point> points, const PcpiModel& model);
double log_potential(const PersistenceDiagram& diagram, const PcpiModel& model);

/// Log Papangelou conditional intensity of a point u given a configuration.
/// Instances of u already present in the configuration (exact coordinate
/// equality) are excluded from the interaction sum.
double log_conditional_intensity(const Point& u, std::span<const Point> configuration,
                                 const PcpiModel& model);
double log_conditional_intensity(const Point& u, const PersistenceDiagram& diagram,
                                 const PcpiModel& model);

/// Model serialization: the tessellation is written to its own file and the
/// model JSON holds a relative reference to it.
nlohmann::json to_json(const PcpiModel& model, const std::string& tessellation_ref);
PcpiModel model_from_json(const nlohmann::json& j, const DirichletTessellation& tess);

}  // namespace gibbspd
