#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "gibbspd/fit.hpp"
#include "gibbspd/geometry.hpp"
#include "gibbspd/homology.hpp"
#include "gibbspd/inference.hpp"
#include "gibbspd/model.hpp"
#include "gibbspd/sampler.hpp"

namespace gibbspd {

struct ChainConfig {
  std::int64_t iterations = 1000;
  std::int64_t burn_in = 0;
  std::int64_t thin = 1;
  int chains = 1;
};

/// One self-contained experiment recipe. A single seed drives every stage;
/// each stage derives its own labeled stream, so enabling extra chains or
/// stages never perturbs earlier draws.
struct ExperimentConfig {
  Window window{0.0, 1.0, 0.0, 1.0};
  PolarCurveSpec curve;
  int homology_dim = 1;
  std::optional<double> max_scale;    // absent: cloud diameter
  std::vector<double> thresholds{0.1, 0.2, 0.3};
  int dummy_count = 20;
  GaussianMixture dummy_mixture;
  GaussianMixture proposal;
  std::optional<double> lambda_w;     // absent: count-matched (see make_model)
  /// Recenter the dummy/proposal mixture means on the diagram's clusters,
  /// keeping weights; dummy variances follow the cluster spreads, proposal
  /// variances stay at the recipe values.
  bool recenter_mixture = true;
  ClusterSplit cluster_split = ClusterSplit::kPairs;
  double move_add = 0.35;
  double move_remove = 0.35;
  double move_relocate = 0.30;
  double add_remove_p_add = 0.5;
  ChainConfig chain;
  double alpha = 0.05;
  int max_rank = 5;
  std::uint64_t seed = 1;

  ExperimentConfig();
};

/// The experiment mixture: three isotropic components sitting on the two
/// high-persistence clusters and the low-persistence cluster of the diagram.
GaussianMixture default_cluster_mixture();

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

/// lambda_w resolution: an explicit value is used as-is; otherwise the
/// count-matched fallback sets lambda_w = n_data * |W| / integral(s), so the
/// interaction-free reference holds about n_data points.
double resolve_lambda_w(const std::optional<double>& lambda_w, std::size_t n_data,
                        const DirichletTessellation& tess);


struct FitArtifacts {
  QuadratureScheme quadrature;
  DirichletTessellation tessellation;
  FitResult fit;
  double lambda_w = 0.0;
};

PointCloud run_generate(const ExperimentConfig& config);
PersistenceDiagram run_pd(const PointCloud& cloud, const ExperimentConfig& config);
FitArtifacts run_fit(const PersistenceDiagram& diagram, const ExperimentConfig& config);
PcpiModel make_fitted_model(const PersistenceDiagram& diagram,
                            const FitArtifacts& artifacts,
                            const ExperimentConfig& config);

/// variant: "rjmcmc", "mwg" or "addremove". Multiple chains are run on
/// independent derived seeds and merged in chain order.
SampleSet run_sample(const PersistenceDiagram& diagram, const PcpiModel& model,
                     const ExperimentConfig& config, const std::string& variant);

InferenceReport run_infer(const SampleSet& samples, const PersistenceDiagram& diagram,
                          const ExperimentConfig& config);

/// Full pipeline into a directory: cloud, diagram, fit, samples for all
/// three variants, reports, plots and the resolved config snapshot.
void run_all(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace gibbspd
