#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gibbspd/geometry.hpp"
#include "gibbspd/homology.hpp"
#include "gibbspd/mixture.hpp"
#include "gibbspd/model.hpp"

namespace gibbspd {

/// Dummy-point generator for the quadrature scheme: draws from a Gaussian
/// mixture truncated to the window.
struct DummyPointSpec {
  int count = 20;
  GaussianMixture mixture;
  std::uint64_t seed = 0;
};

/// Berman-Turner design: data points first, then dummies. Weights are the
/// Dirichlet tile areas of the combined generator set; responses are 1/w_j
/// at data points and 0 at dummies; covariate row j holds the negated
/// interaction counts of u_j against the observed data pattern; the offset
/// is the log spatial intensity.
struct QuadratureScheme {
  std::vector<Point> points;
  Eigen::VectorXd weights;
  Eigen::VectorXd responses;
  Eigen::VectorXd offsets;
  Eigen::MatrixXd covariates;  // m x k, already negated
  std::vector<std::uint8_t> is_data;
  std::size_t n_data = 0;

  std::size_t size() const { return points.size(); }
};

std::pair<QuadratureScheme, DirichletTessellation> build_quadrature(
    const PersistenceDiagram& diagram, const DummyPointSpec& dummy,
    const Window& window, const InteractionThresholds& thresholds);

/// How diagram points are grouped when recentering mixture components.
enum class ClusterSplit {
  kPairs,      // top two / next two / remainder
  kProminent,  // four most persistent / upper remainder / lower remainder
};

/// Replace a three-component mixture's means by the diagram's cluster
/// centers under the chosen split; component variances are widened to the
/// cluster spreads when rescale_variance is set. Mixtures with a different
/// component count pass through unchanged.
GaussianMixture recenter_on_clusters(const GaussianMixture& base,
                                     const PersistenceDiagram& diagram,
                                     ClusterSplit split = ClusterSplit::kPairs,
                                     bool rescale_variance = true);

/// Quadrature log-pseudolikelihood sum_j (y_j log L_j - L_j) w_j with
/// log L_j = offset_j + theta . covariates_j.
double log_pseudolikelihood(const Eigen::VectorXd& theta, const QuadratureScheme& q);


/// Analytic gradient in theta: sum_j (y_j - L_j) w_j covariates_j.
Eigen::VectorXd log_pseudolikelihood_gradient(const Eigen::VectorXd& theta,
                                              const QuadratureScheme& q);

/// Two-term form of the pseudolikelihood on the same scheme: sum of log
/// conditional intensities at the data points minus the quadrature integral.
/// Algebraically identical to log_pseudolikelihood; kept as a cross-check.
double log_pseudolikelihood_direct(const Eigen::VectorXd& theta,
                                   const QuadratureScheme& q);

struct FitResult {
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd std_errors;
  std::vector<std::pair<double, double>> ci_95;
  Eigen::VectorXd p_values;  // two-sided Wald against theta_l = 0
  double log_pl = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Maximum pseudolikelihood via IRLS for the induced weighted log-linear
/// Poisson regression with offset. Throws Singular when the Fisher
/// information is not invertible; a hit of max_iter returns the best
/// iterate with converged = false.
FitResult fit_mple(const QuadratureScheme& q, int max_iter = 100, double tol = 1e-8);

struct RobustnessResult {
  struct Replication {
    int index = 0;
    bool ok = false;
    std::string error;
    Eigen::VectorXd theta;
    Eigen::VectorXd p_values;
  };
  std::vector<Replication> replications;
  Eigen::VectorXd mean;
  Eigen::VectorXd percentile_lo;  // empirical 2.5%
  Eigen::VectorXd percentile_hi;  // empirical 97.5%
  int n_ok = 0;
};

/// Repeat cloud -> H1 diagram -> fit; failures are recorded per replication,
/// not fatal. Replications run concurrently on independent seeded streams
/// and merge deterministically by index.
RobustnessResult robustness_study(const PolarCurveSpec& curve, int replications,
                                  const InteractionThresholds& thresholds,
                                  const DummyPointSpec& dummy, const Window& window,
                                  std::uint64_t seed, bool recenter_mixture = true,
                                  std::optional<double> max_scale = {});

nlohmann::json to_json(const FitResult& fit);
FitResult fit_from_json(const nlohmann::json& j);

/// Per-coefficient table: mean, 95% CI, p value.
std::string format_fit_summary(const FitResult& fit);

void write_robustness_csv(const RobustnessResult& result,
                          const std::filesystem::path& path);

}  // namespace gibbspd
