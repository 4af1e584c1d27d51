#include "gibbspd/fit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <thread>

#include "gibbspd/errors.hpp"
#include "gibbspd/rng.hpp"

namespace gibbspd {

std::pair<QuadratureScheme, DirichletTessellation> build_quadrature(
    const PersistenceDiagram& diagram, const DummyPointSpec& dummy,
    const Window& window, const InteractionThresholds& thresholds) {
  if (diagram.points.empty()) throw EmptyDiagram("build_quadrature: empty diagram");
  for (const Point& p : diagram.points)
    if (!window.strictly_contains(p))
      throw OutOfWindow("build_quadrature: data point outside window interior");
  dummy.mixture.validate();
  if (dummy.count < 1) throw InvalidConfig("build_quadrature: need at least one dummy");

  const std::size_t n = diagram.points.size();
  std::vector<Point> generators = diagram.points;
  Rng rng(dummy.seed);
  for (int i = 0; i < dummy.count; ++i)
    generators.push_back(dummy.mixture.sample_truncated(rng, window));

  // Generators must be pairwise distinct; nudge exact collisions.
  for (std::size_t i = 0; i < generators.size(); ++i) {
    bool collided = true;
    while (collided) {
      collided = false;
      for (std::size_t j = 0; j < i; ++j) {
        if (generators[i].x() == generators[j].x() &&
            generators[i].y() == generators[j].y()) {
          generators[i].x() += (generators[i].x() + 1e-9 < window.x_max) ? 1e-9 : -1e-9;
          collided = true;
          break;
        }
      }
    }
  }

  DirichletTessellation tess = build_tessellation(generators, window);

  const std::size_t m = generators.size();
  const Eigen::Index k = static_cast<Eigen::Index>(thresholds.size());
  QuadratureScheme q;
  q.points = diagram.points;
  for (std::size_t j = n; j < m; ++j) q.points.push_back(generators[j]);
  q.weights = Eigen::Map<const Eigen::VectorXd>(tess.areas.data(),
                                                static_cast<Eigen::Index>(m));
  q.responses = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  q.offsets.resize(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j)
    q.offsets[static_cast<Eigen::Index>(j)] = std::log(tess.areas[j]);
  q.covariates = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), k);
  q.is_data.assign(m, 0);
  q.n_data = n;

  // Interactions are taken against the observed data pattern only, with the
  // point itself excluded at data rows.
  std::vector<Point> others;
  others.reserve(n);
  for (std::size_t j = 0; j < m; ++j) {
    const bool data_row = j < n;
    if (data_row) {
      q.is_data[j] = 1;
      q.responses[static_cast<Eigen::Index>(j)] = 1.0 / q.weights[static_cast<Eigen::Index>(j)];
    }
    others.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (!data_row || i != j) others.push_back(diagram.points[i]);
    const Eigen::VectorXi counts = interaction_covariates(q.points[j], others, thresholds);
    for (Eigen::Index l = 0; l < k; ++l)
      q.covariates(static_cast<Eigen::Index>(j), l) = -static_cast<double>(counts[l]);
  }
  return {std::move(q), std::move(tess)};
}

GaussianMixture recenter_on_clusters(const GaussianMixture& base,
                                     const PersistenceDiagram& diagram,
                                     ClusterSplit split, bool rescale_variance) {
  if (base.components.size() != 3 || diagram.points.empty()) return base;
  std::vector<Point> sorted = diagram.points;
  std::sort(sorted.begin(), sorted.end(),
            [](const Point& a, const Point& b) { return a.y() > b.y(); });
  const std::size_t n = sorted.size();
  const auto centroid = [&](std::size_t from, std::size_t to) {
    Point c(0.0, 0.0);
    for (std::size_t i = from; i < to; ++i) c += sorted[i];
    return Point(c / static_cast<double>(to - from));
  };
  // Isotropic per-coordinate variance of a cluster around its centroid.
  const auto spread = [&](std::size_t from, std::size_t to, const Point& c) {
    if (to - from < 2) return 0.0;
    double ss = 0.0;
    for (std::size_t i = from; i < to; ++i) ss += (sorted[i] - c).squaredNorm();
    return ss / (2.0 * static_cast<double>(to - from));
  };

  std::size_t first_end, second_end;
  if (split == ClusterSplit::kPairs) {
    first_end = std::min<std::size_t>(2, n);
    second_end = std::min<std::size_t>(4, n);
  } else {
    first_end = std::min<std::size_t>(4, n);
    second_end = std::min<std::size_t>(first_end + (n - first_end) / 2, n);
  }
  GaussianMixture mixture = base;
  const Point c1 = centroid(0, first_end);
  const Point c2 = n > first_end ? centroid(first_end, second_end) : c1;
  const Point c3 =
      n > second_end ? centroid(second_end, n) : Point(c2.x(), 0.02);
  mixture.components[0].mean = c1;
  mixture.components[1].mean = c2;
  mixture.components[2].mean = c3;
  if (rescale_variance) {
    mixture.components[0].variance =
        std::max(base.components[0].variance, spread(0, first_end, c1));
    mixture.components[1].variance = std::max(
        base.components[1].variance,
        n > first_end ? spread(first_end, second_end, c2) : 0.0);
    mixture.components[2].variance = std::max(
        base.components[2].variance, n > second_end ? spread(second_end, n, c3) : 0.0);
  }
  return mixture;
}

double log_pseudolikelihood(const Eigen::VectorXd& theta, const QuadratureScheme& q) {
  const Eigen::ArrayXd eta = (q.offsets + q.covariates * theta).array();
  return ((q.responses.array() * eta - eta.exp()) * q.weights.array()).sum();
}

Eigen::VectorXd log_pseudolikelihood_gradient(const Eigen::VectorXd& theta,
                                              const QuadratureScheme& q) {
  const Eigen::ArrayXd eta = (q.offsets + q.covariates * theta).array();
  const Eigen::VectorXd r = ((q.responses.array() - eta.exp()) * q.weights.array()).matrix();
  return q.covariates.transpose() * r;
}

double log_pseudolikelihood_direct(const Eigen::VectorXd& theta,
                                   const QuadratureScheme& q) {
  const Eigen::ArrayXd eta = (q.offsets + q.covariates * theta).array();
  double data_term = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j)
    if (q.is_data[j]) data_term += eta[static_cast<Eigen::Index>(j)];
  const double integral = (eta.exp() * q.weights.array()).sum();
  return data_term - integral;
}

namespace {

Eigen::MatrixXd fisher_information(const Eigen::MatrixXd& design,
                                   const Eigen::VectorXd& beta,
                                   const QuadratureScheme& q) {
  const Eigen::ArrayXd mu = (q.offsets + design * beta).array().exp();
  const Eigen::ArrayXd ww = mu * q.weights.array();
  return design.transpose() * ww.matrix().asDiagonal() * design;
}

void require_invertible(const Eigen::MatrixXd& info) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const double max_eig = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(max_eig > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, max_eig))
    throw Singular("fit_mple: Fisher information not invertible");
}

double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace

FitResult fit_mple(const QuadratureScheme& q, int max_iter, double tol) {
  const Eigen::Index k = q.covariates.cols();
  if (k == 0) throw InvalidConfig("fit_mple: no covariates");
  if (q.size() == 0) throw EmptyInput("fit_mple: empty scheme");

  // The spatial term keeps a fixed unit coefficient; only theta is free.
  const Eigen::MatrixXd& design = q.covariates;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  const auto objective_at = [&](const Eigen::VectorXd& b) {
    return log_pseudolikelihood(b, q);
  };
  double objective = objective_at(beta);
  bool converged = false;
  int iter = 0;

  for (; iter < max_iter; ++iter) {
    const Eigen::ArrayXd mu = (q.offsets + design * beta).array().exp();
    const Eigen::MatrixXd info = fisher_information(design, beta, q);
    require_invertible(info);
    const Eigen::VectorXd score =
        design.transpose() * ((q.responses.array() - mu) * q.weights.array()).matrix();
    const Eigen::VectorXd step = info.ldlt().solve(score);

    // Step-halving keeps the ascent monotone if the Newton step overshoots.
    double scale = 1.0;
    Eigen::VectorXd candidate = beta + step;
    double cand_obj = objective_at(candidate);
    for (int half = 0; half < 40 && !(cand_obj >= objective - 1e-12); ++half) {
      scale *= 0.5;
      candidate = beta + scale * step;
      cand_obj = objective_at(candidate);
    }

    const double delta = (candidate - beta).cwiseAbs().maxCoeff();
    beta = candidate;
    objective = cand_obj;
    if (delta < tol) {
      converged = true;
      ++iter;
      break;
    }
  }

  FitResult fit;
  fit.theta_hat = beta;
  const Eigen::MatrixXd info = fisher_information(design, beta, q);
  require_invertible(info);
  fit.covariance = info.inverse();
  fit.std_errors = fit.covariance.diagonal().cwiseSqrt();
  fit.p_values = Eigen::VectorXd::Zero(k);
  for (Eigen::Index l = 0; l < k; ++l) {
    const double se = fit.std_errors[l];
    fit.ci_95.emplace_back(fit.theta_hat[l] - 1.96 * se, fit.theta_hat[l] + 1.96 * se);
    fit.p_values[l] = normal_two_sided_p(fit.theta_hat[l] / se);
  }
  fit.log_pl = objective;
  fit.converged = converged;
  fit.iterations = iter;
  return fit;
}

RobustnessResult robustness_study(const PolarCurveSpec& curve, int replications,
                                  const InteractionThresholds& thresholds,
                                  const DummyPointSpec& dummy, const Window& window,
                                  std::uint64_t seed, bool recenter_mixture,
                                  std::optional<double> max_scale) {
  if (replications < 2) throw InvalidConfig("robustness_study: need >= 2 replications");

  RobustnessResult result;
  result.replications.resize(static_cast<std::size_t>(replications));

  const auto run_one = [&](int r) {
    auto& rep = result.replications[static_cast<std::size_t>(r)];
    rep.index = r;
    try {
      const PointCloud cloud =
          sample_polar_curve(curve, derive_seed(seed, "robustness-cloud",
                                                static_cast<std::uint64_t>(r)));
      const PersistenceDiagram pd = max_scale
                                        ? vietoris_rips_diagram(cloud, 1, *max_scale)
                                        : vietoris_rips_diagram(cloud, 1);
      DummyPointSpec rep_dummy = dummy;
      if (recenter_mixture) rep_dummy.mixture = recenter_on_clusters(dummy.mixture, pd);
      rep_dummy.seed = derive_seed(seed, "robustness-dummy", static_cast<std::uint64_t>(r));
      const auto [q, tess] = build_quadrature(pd, rep_dummy, window, thresholds);
      const FitResult fit = fit_mple(q);
      rep.theta = fit.theta_hat;
      rep.p_values = fit.p_values;
      rep.ok = fit.converged;
      if (!fit.converged) rep.error = "not converged";
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.error = e.what();
    }
  };

  std::atomic<int> next{0};
  const unsigned n_threads =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t)
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < replications; r = next.fetch_add(1)) run_one(r);
    });
  for (auto& t : pool) t.join();

  const Eigen::Index k = static_cast<Eigen::Index>(thresholds.size());
  result.mean = Eigen::VectorXd::Zero(k);
  result.percentile_lo = Eigen::VectorXd::Zero(k);
  result.percentile_hi = Eigen::VectorXd::Zero(k);
  std::vector<double> column;
  for (Eigen::Index l = 0; l < k; ++l) {
    column.clear();
    for (const auto& rep : result.replications)
      if (rep.ok) column.push_back(rep.theta[l]);
    if (column.empty()) continue;
    double sum = 0.0;
    for (double v : column) sum += v;
    result.mean[l] = sum / static_cast<double>(column.size());
    std::sort(column.begin(), column.end());
    const auto quantile = [&](double p) {
      const double idx = p * static_cast<double>(column.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(idx);
      const std::size_t hi = std::min(lo + 1, column.size() - 1);
      const double frac = idx - static_cast<double>(lo);
      return column[lo] * (1.0 - frac) + column[hi] * frac;
    };
    result.percentile_lo[l] = quantile(0.025);
    result.percentile_hi[l] = quantile(0.975);
  }
  result.n_ok = 0;
  for (const auto& rep : result.replications)
    if (rep.ok) ++result.n_ok;
  return result;
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json ci = nlohmann::json::array();
  for (const auto& [lo, hi] : fit.ci_95) ci.push_back({lo, hi});
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index i = 0; i < fit.covariance.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < fit.covariance.cols(); ++j)
      row.push_back(fit.covariance(i, j));
    cov.push_back(row);
  }
  return {{"theta_hat", std::vector<double>(fit.theta_hat.begin(), fit.theta_hat.end())},
          {"std_errors", std::vector<double>(fit.std_errors.begin(), fit.std_errors.end())},
          {"covariance", cov},
          {"ci_95", ci},
          {"p_values", std::vector<double>(fit.p_values.begin(), fit.p_values.end())},
          {"log_pl", fit.log_pl},
          {"converged", fit.converged},
          {"iterations", fit.iterations}};
}

FitResult fit_from_json(const nlohmann::json& j) {
  FitResult fit;
  const auto theta = j.at("theta_hat").get<std::vector<double>>();
  fit.theta_hat = Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                                    static_cast<Eigen::Index>(theta.size()));
  const auto se = j.at("std_errors").get<std::vector<double>>();
  fit.std_errors =
      Eigen::Map<const Eigen::VectorXd>(se.data(), static_cast<Eigen::Index>(se.size()));
  const auto& cov = j.at("covariance");
  fit.covariance.resize(static_cast<Eigen::Index>(cov.size()),
                        static_cast<Eigen::Index>(cov.size()));
  for (Eigen::Index i = 0; i < fit.covariance.rows(); ++i)
    for (Eigen::Index jj = 0; jj < fit.covariance.cols(); ++jj)
      fit.covariance(i, jj) = cov.at(static_cast<std::size_t>(i))
                                  .at(static_cast<std::size_t>(jj))
                                  .get<double>();
  for (const auto& pair : j.at("ci_95"))
    fit.ci_95.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  const auto p = j.at("p_values").get<std::vector<double>>();
  fit.p_values =
      Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
  fit.log_pl = j.at("log_pl").get<double>();
  fit.converged = j.at("converged").get<bool>();
  fit.iterations = j.at("iterations").get<int>();
  return fit;
}

std::string format_fit_summary(const FitResult& fit) {
  std::string out = "parameter  mean      CI                p value\n";
  char line[160];
  for (Eigen::Index l = 0; l < fit.theta_hat.size(); ++l) {
    std::snprintf(line, sizeof(line), "theta_%-4ld %-9.4f [%.4f, %.4f]  %.3g\n",
                  static_cast<long>(l + 1), fit.theta_hat[l], fit.ci_95[static_cast<std::size_t>(l)].first,
                  fit.ci_95[static_cast<std::size_t>(l)].second, fit.p_values[l]);
    out += line;
  }
  return out;
}

void write_robustness_csv(const RobustnessResult& result,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  const Eigen::Index k = result.mean.size();
  out << "replication";
  for (Eigen::Index l = 0; l < k; ++l) out << ",theta_" << (l + 1);
  for (Eigen::Index l = 0; l < k; ++l) out << ",p_" << (l + 1);
  out << ",ok\n";
  char buf[32];
  const auto fmt = [&](double x) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
  };
  for (const auto& rep : result.replications) {
    out << rep.index;
    for (Eigen::Index l = 0; l < k; ++l)
      out << ',' << (rep.ok ? fmt(rep.theta[l]) : std::string("nan"));
    for (Eigen::Index l = 0; l < k; ++l)
      out << ',' << (rep.ok ? fmt(rep.p_values[l]) : std::string("nan"));
    out << ',' << (rep.ok ? 1 : 0) << '\n';
  }
}

}  // namespace gibbspd
