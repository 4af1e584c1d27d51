// Command-line front end: generate clouds, compute diagrams, fit the
// interaction model, sample random diagrams and run the order-statistic
// significance analysis.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gibbspd/errors.hpp"
#include "gibbspd/experiment.hpp"
#include "gibbspd/plot.hpp"

namespace fs = std::filesystem;
using namespace gibbspd;

namespace {

ExperimentConfig make_config(const std::string& config_path,
                             std::optional<std::uint64_t> seed) {
  ExperimentConfig config;
  if (!config_path.empty()) config = load_config(config_path);
  if (seed) config.seed = *seed;
  return config;
}

PcpiModel model_from_fit_file(const fs::path& fit_path) {
  std::ifstream in(fit_path);
  if (!in) throw IoError("cannot open " + fit_path.string());
  nlohmann::json j;
  in >> j;
  const fs::path tess_path =
      fit_path.parent_path() / j.at("tessellation_ref").get<std::string>();
  std::ifstream tess_in(tess_path);
  if (!tess_in) throw IoError("cannot open " + tess_path.string());
  nlohmann::json tess_json;
  tess_in >> tess_json;
  const DirichletTessellation tess = tessellation_from_json(tess_json);

  const FitResult fit = fit_from_json(j);
  Eigen::VectorXd theta = fit.theta_hat.cwiseMax(0.0);
  return PcpiModel(InteractionThresholds(j.at("thresholds").get<std::vector<double>>()),
                   std::move(theta), tess, j.at("lambda_w").get<double>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs point-process modeling and sampling of persistence diagrams"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Experiment config JSON")->capture_default_str();
  app.add_option("--seed", seed, "Override the config seed");

  // generate
  auto* cmd_generate = app.add_subcommand("generate", "Sample a polar-curve point cloud");
  std::string gen_out = "cloud.csv";
  cmd_generate->add_option("--out", gen_out, "Output cloud CSV")->capture_default_str();

  // pd
  auto* cmd_pd = app.add_subcommand("pd", "Vietoris-Rips persistence diagram of a cloud");
  std::string pd_in, pd_out = "pd.csv";
  int pd_dim = 1;
  std::optional<double> pd_max_scale;
  cmd_pd->add_option("cloud", pd_in, "Input cloud CSV")->required();
  cmd_pd->add_option("--dim", pd_dim, "Homology dimension (0 or 1)")->capture_default_str();
  cmd_pd->add_option("--max-scale", pd_max_scale, "Filtration cutoff (default: diameter)");
  cmd_pd->add_option("--out", pd_out, "Output diagram CSV")->capture_default_str();

  // fit
  auto* cmd_fit = app.add_subcommand("fit", "Maximum pseudolikelihood fit of the model");
  std::string fit_in, fit_out = "fit.json";
  cmd_fit->add_option("pd", fit_in, "Input diagram CSV")->required();
  cmd_fit->add_option("--out", fit_out, "Output fit JSON")->capture_default_str();

  // sample
  auto* cmd_sample = app.add_subcommand("sample", "Generate random diagrams from a fit");
  std::string sample_pd, sample_fit, sample_variant = "rjmcmc";
  std::string sample_out = "samples.ndjson";
  cmd_sample->add_option("pd", sample_pd, "Initial diagram CSV")->required();
  cmd_sample->add_option("fit", sample_fit, "Fit JSON")->required();
  cmd_sample->add_option("--variant", sample_variant, "rjmcmc | mwg | addremove")
      ->capture_default_str();
  cmd_sample->add_option("--out", sample_out, "Output NDJSON")->capture_default_str();

  // infer
  auto* cmd_infer = app.add_subcommand("infer", "Order-statistic significance analysis");
  std::string infer_samples, infer_pd, infer_out = "report.csv";
  cmd_infer->add_option("samples", infer_samples, "Samples NDJSON")->required();
  cmd_infer->add_option("pd", infer_pd, "Original diagram CSV")->required();
  cmd_infer->add_option("--out", infer_out, "Output report CSV")->capture_default_str();

  // plot
  auto* cmd_plot = app.add_subcommand("plot", "Render a diagram or sampled iterates to SVG");
  std::string plot_in, plot_out = "plot.svg";
  cmd_plot->add_option("input", plot_in, "Diagram CSV or samples NDJSON")->required();
  cmd_plot->add_option("--out", plot_out, "Output SVG")->capture_default_str();

  // run-all
  auto* cmd_run_all = app.add_subcommand("run-all", "Full pipeline into a directory");
  std::string run_out = "out";
  cmd_run_all->add_option("--out", run_out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig config = make_config(config_path, seed);

    if (cmd_generate->parsed()) {
      write_cloud_csv(run_generate(config), gen_out);
    } else if (cmd_pd->parsed()) {
      ExperimentConfig local = config;
      local.homology_dim = pd_dim;
      if (pd_max_scale) local.max_scale = pd_max_scale;
      write_diagram_csv(run_pd(read_cloud_csv(pd_in), local), pd_out);
    } else if (cmd_fit->parsed()) {
      const PersistenceDiagram diagram = read_diagram_csv(fit_in);
      if (diagram.points.empty()) throw EmptyDiagram("fit: diagram has no points");
      const FitArtifacts artifacts = run_fit(diagram, config);
      const fs::path out_path(fit_out);
      const fs::path tess_name = out_path.stem().string() + "_tessellation.json";
      nlohmann::json j = to_json(artifacts.fit);
      j["lambda_w"] = artifacts.lambda_w;
      j["thresholds"] = config.thresholds;
      j["window"] = to_json(config.window);
      j["tessellation_ref"] = tess_name.string();
      std::ofstream out(out_path);
      if (!out) throw IoError("cannot open " + out_path.string());
      out << j.dump(2) << '\n';
      std::ofstream tess_out(out_path.parent_path() / tess_name);
      tess_out << to_json(artifacts.tessellation).dump(2) << '\n';
      std::cout << format_fit_summary(artifacts.fit);
    } else if (cmd_sample->parsed()) {
      const PersistenceDiagram diagram = read_diagram_csv(sample_pd);
      const PcpiModel model = model_from_fit_file(sample_fit);
      const SampleSet samples = run_sample(diagram, model, config, sample_variant);
      write_samples_ndjson(samples, sample_out);
      const fs::path trace_path =
          fs::path(sample_out).replace_extension().string() + "_trace.csv";
      write_trace_csv(samples, trace_path);
    } else if (cmd_infer->parsed()) {
      const SampleSet samples = read_samples_ndjson(infer_samples);
      const PersistenceDiagram diagram = read_diagram_csv(infer_pd);
      const InferenceReport report = run_infer(samples, diagram, config);
      write_report_csv(report, infer_out);
      std::cout << format_report_text(report);
    } else if (cmd_plot->parsed()) {
      if (fs::path(plot_in).extension() == ".ndjson") {
        plot_samples_svg(read_samples_ndjson(plot_in), config.window, 100, 500, plot_out);
      } else {
        plot_diagram_svg(read_diagram_csv(plot_in), config.window, plot_out);
      }
    } else if (cmd_run_all->parsed()) {
      run_all(config, run_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
