#include "gibbspd/experiment.hpp"

#include <fstream>

#include <cmath>

#include "gibbspd/errors.hpp"
#include "gibbspd/plot.hpp"
#include "gibbspd/rng.hpp"

namespace gibbspd {

GaussianMixture default_cluster_mixture() {
  GaussianMixture mixture;
  mixture.components = {{1.0, Point(0.6, 0.85), 0.001},
                        {1.0, Point(0.4, 0.6), 0.001},
                        {6.0, Point(0.3, 0.01), 0.001}};
  return mixture;
}

ExperimentConfig::ExperimentConfig()
    : dummy_mixture(default_cluster_mixture()), proposal(default_cluster_mixture()) {
  // Calibrated sampling-experiment recipe: a four-loop curve whose diagram
  // fills the unit window, and a reference mean that keeps the chain at a
  // handful of points.
  curve.a = 0.19;
  curve.b = 2.65;
  curve.n = 185;
  curve.noise_sd = 0.1;
  max_scale = 2.0;
  lambda_w = 26.0;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["window"] = to_json(config.window);
  j["curve"] = {{"a", config.curve.a},
                {"b", config.curve.b},
                {"n", config.curve.n},
                {"noise_sd", config.curve.noise_sd}};
  j["homology_dim"] = config.homology_dim;
  if (config.max_scale) j["max_scale"] = *config.max_scale;
  j["thresholds"] = config.thresholds;
  j["dummy_count"] = config.dummy_count;
  j["recenter_mixture"] = config.recenter_mixture;
  j["cluster_split"] =
      config.cluster_split == ClusterSplit::kPairs ? "pairs" : "prominent";
  j["dummy_mixture"] = to_json(config.dummy_mixture);
  j["proposal"] = to_json(config.proposal);
  if (config.lambda_w) j["lambda_w"] = *config.lambda_w;
  j["moves"] = {{"add", config.move_add},
                {"remove", config.move_remove},
                {"relocate", config.move_relocate}};
  j["add_remove_p_add"] = config.add_remove_p_add;
  j["chain"] = {{"iterations", config.chain.iterations},
                {"burn_in", config.chain.burn_in},
                {"thin", config.chain.thin},
                {"chains", config.chain.chains}};
  j["alpha"] = config.alpha;
  j["max_rank"] = config.max_rank;
  j["seed"] = config.seed;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  if (j.contains("window")) config.window = window_from_json(j.at("window"));
  if (j.contains("curve")) {
    const auto& c = j.at("curve");
    config.curve.a = c.value("a", config.curve.a);
    config.curve.b = c.value("b", config.curve.b);
    config.curve.n = c.value("n", config.curve.n);
    config.curve.noise_sd = c.value("noise_sd", config.curve.noise_sd);
  }
  config.homology_dim = j.value("homology_dim", config.homology_dim);
  if (j.contains("max_scale")) config.max_scale = j.at("max_scale").get<double>();
  if (j.contains("thresholds"))
    config.thresholds = j.at("thresholds").get<std::vector<double>>();
  config.dummy_count = j.value("dummy_count", config.dummy_count);
  config.recenter_mixture = j.value("recenter_mixture", config.recenter_mixture);
  if (j.contains("cluster_split"))
    config.cluster_split = j.at("cluster_split").get<std::string>() == "prominent"
                               ? ClusterSplit::kProminent
                               : ClusterSplit::kPairs;
  if (j.contains("dummy_mixture"))
    config.dummy_mixture = mixture_from_json(j.at("dummy_mixture"));
  if (j.contains("proposal")) config.proposal = mixture_from_json(j.at("proposal"));
  if (j.contains("lambda_w")) config.lambda_w = j.at("lambda_w").get<double>();
  if (j.contains("moves")) {
    const auto& m = j.at("moves");
    config.move_add = m.value("add", config.move_add);
    config.move_remove = m.value("remove", config.move_remove);
    config.move_relocate = m.value("relocate", config.move_relocate);
  }
  config.add_remove_p_add = j.value("add_remove_p_add", config.add_remove_p_add);
  if (j.contains("chain")) {
    const auto& c = j.at("chain");
    config.chain.iterations = c.value("iterations", config.chain.iterations);
    config.chain.burn_in = c.value("burn_in", config.chain.burn_in);
    config.chain.thin = c.value("thin", config.chain.thin);
    config.chain.chains = c.value("chains", config.chain.chains);
  }
  config.alpha = j.value("alpha", config.alpha);
  config.max_rank = j.value("max_rank", config.max_rank);
  config.seed = j.value("seed", config.seed);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << to_json(config).dump(2) << '\n';
}

double resolve_lambda_w(const std::optional<double>& lambda_w, std::size_t n_data,
                        const DirichletTessellation& tess) {
  if (lambda_w) {
    if (!(*lambda_w > 0.0)) throw InvalidConfig("lambda_w must be positive");
    return *lambda_w;
  }
  const double integral = intensity_integral(tess);
  return static_cast<double>(n_data) * tess.window.area() / integral;
}

PointCloud run_generate(const ExperimentConfig& config) {
  return sample_polar_curve(config.curve, derive_seed(config.seed, "cloud"));
}

PersistenceDiagram run_pd(const PointCloud& cloud, const ExperimentConfig& config) {
  if (config.max_scale)
    return vietoris_rips_diagram(cloud, config.homology_dim, *config.max_scale);
  return vietoris_rips_diagram(cloud, config.homology_dim);
}

FitArtifacts run_fit(const PersistenceDiagram& diagram, const ExperimentConfig& config) {
  const GaussianMixture mixture =
      config.recenter_mixture
          ? recenter_on_clusters(config.dummy_mixture, diagram, config.cluster_split)
          : config.dummy_mixture;
  DummyPointSpec dummy{config.dummy_count, mixture, derive_seed(config.seed, "dummy")};
  InteractionThresholds thresholds(config.thresholds);
  auto [quadrature, tessellation] =
      build_quadrature(diagram, dummy, config.window, thresholds);
  FitResult fit = fit_mple(quadrature);
  const double lambda_w =
      resolve_lambda_w(config.lambda_w, diagram.points.size(), tessellation);
  return {std::move(quadrature), std::move(tessellation), std::move(fit), lambda_w};
}

PcpiModel make_fitted_model(const PersistenceDiagram& diagram,
                            const FitArtifacts& artifacts,
                            const ExperimentConfig& config) {
  (void)diagram;
  // The admissible interaction space is theta >= 0; negative estimates are
  // projected onto the boundary.
  Eigen::VectorXd theta = artifacts.fit.theta_hat.cwiseMax(0.0);
  return PcpiModel(InteractionThresholds(config.thresholds), std::move(theta),
                   artifacts.tessellation, artifacts.lambda_w);
}

SampleSet run_sample(const PersistenceDiagram& diagram, const PcpiModel& model,
                     const ExperimentConfig& config, const std::string& variant) {
  if (config.chain.chains < 1) throw InvalidConfig("chains must be >= 1");
  GaussianMixture proposal = config.proposal;
  if (config.recenter_mixture) {
    // Means follow the diagram's clusters; the proposal keeps the recipe's
    // tight component variances so relocations stay cluster-concentrated.
    proposal = recenter_on_clusters(config.proposal, diagram, config.cluster_split,
                                    /*rescale_variance=*/false);
  }
  const auto run_one = [&](std::uint64_t chain_seed) {
    if (variant == "rjmcmc")
      return run_rjmcmc(diagram, model,
                        MoveProbabilities(config.move_add, config.move_remove,
                                          config.move_relocate),
                        proposal, config.chain.iterations, config.chain.burn_in,
                        config.chain.thin, chain_seed);
    if (variant == "mwg")
      return run_mwg(diagram, model, proposal, config.chain.iterations,
                     config.chain.burn_in, config.chain.thin, chain_seed);
    if (variant == "addremove")
      return run_add_remove(diagram, model, config.add_remove_p_add,
                            config.chain.iterations, config.chain.burn_in,
                            config.chain.thin, chain_seed);
    throw InvalidConfig("unknown sampler variant '" + variant + "'");
  };

  SampleSet merged = run_one(derive_seed(config.seed, "chain-" + variant, 0));
  for (int c = 1; c < config.chain.chains; ++c) {
    SampleSet next = run_one(derive_seed(config.seed, "chain-" + variant,
                                         static_cast<std::uint64_t>(c)));
    merged.records.insert(merged.records.end(), next.records.begin(), next.records.end());
    merged.cardinality_trace.insert(merged.cardinality_trace.end(),
                                    next.cardinality_trace.begin(),
                                    next.cardinality_trace.end());
    merged.add.proposed += next.add.proposed;
    merged.add.accepted += next.add.accepted;
    merged.remove.proposed += next.remove.proposed;
    merged.remove.accepted += next.remove.accepted;
    merged.relocate.proposed += next.relocate.proposed;
    merged.relocate.accepted += next.relocate.accepted;
  }
  return merged;
}

InferenceReport run_infer(const SampleSet& samples, const PersistenceDiagram& diagram,
                          const ExperimentConfig& config) {
  return sequential_test(samples, diagram, config.alpha, config.max_rank);
}

void run_all(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  save_config(config, out_dir / "config.json");

  const PointCloud cloud = run_generate(config);
  write_cloud_csv(cloud, out_dir / "cloud.csv");

  const PersistenceDiagram diagram = run_pd(cloud, config);
  write_diagram_csv(diagram, out_dir / "pd.csv");
  plot_diagram_svg(diagram, config.window, out_dir / "pd.svg");

  const FitArtifacts artifacts = run_fit(diagram, config);
  {
    nlohmann::json j = to_json(artifacts.fit);
    j["lambda_w"] = artifacts.lambda_w;
    j["thresholds"] = config.thresholds;
    j["window"] = to_json(config.window);
    j["tessellation_ref"] = "tessellation.json";
    std::ofstream out(out_dir / "fit.json");
    out << j.dump(2) << '\n';
    std::ofstream tess_out(out_dir / "tessellation.json");
    tess_out << to_json(artifacts.tessellation).dump(2) << '\n';
  }

  const PcpiModel model = make_fitted_model(diagram, artifacts, config);
  for (const std::string variant : {"rjmcmc", "mwg", "addremove"}) {
    const SampleSet samples = run_sample(diagram, model, config, variant);
    write_samples_ndjson(samples, out_dir / ("samples_" + variant + ".ndjson"));
    write_trace_csv(samples, out_dir / ("trace_" + variant + ".csv"));
    plot_samples_svg(samples, config.window, 100, 500,
                     out_dir / ("samples_" + variant + ".svg"));
    const InferenceReport report = run_infer(samples, diagram, config);
    write_report_csv(report, out_dir / ("report_" + variant + ".csv"));
    std::ofstream txt(out_dir / ("report_" + variant + ".txt"));
    txt << format_report_text(report);
  }
}

}  // namespace gibbspd
