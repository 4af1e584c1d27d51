#include "gibbspd/model.hpp"

#include <cmath>

#include "gibbspd/errors.hpp"

namespace gibbspd {

InteractionThresholds::InteractionThresholds(std::vector<double> r_) : r(std::move(r_)) {
  if (r.empty()) throw InvalidConfig("thresholds: need k >= 1");
  if (!(r.front() > 0.0)) throw InvalidConfig("thresholds: r_1 must be positive");
  for (std::size_t l = 1; l < r.size(); ++l)
    if (!(r[l - 1] < r[l])) throw InvalidConfig("thresholds: must be strictly increasing");
}

int InteractionThresholds::bin(double distance) const {
  if (distance >= r.back()) return -1;
  int l = 0;
  while (distance >= r[static_cast<std::size_t>(l)]) ++l;
  return l;
}

PcpiModel::PcpiModel(InteractionThresholds thresholds_, Eigen::VectorXd theta_,
                     DirichletTessellation intensity_, double lambda_w_)
    : thresholds(std::move(thresholds_)),
      theta(std::move(theta_)),
      intensity(std::move(intensity_)),
      window(intensity.window),
      lambda_w(lambda_w_) {
  if (static_cast<std::size_t>(theta.size()) != thresholds.size())
    throw InvalidConfig("model: theta length must match threshold count");
  for (Eigen::Index l = 0; l < theta.size(); ++l)
    if (!(theta[l] >= 0.0)) throw InvalidConfig("model: theta must be nonnegative");
  if (!(lambda_w > 0.0)) throw InvalidConfig("model: lambda_w must be positive");
}

Eigen::VectorXi interaction_covariates(const Point& x, std::span<const Point> others,
                                       const InteractionThresholds& thresholds) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(thresholds.size()));
  for (const Point& y : others) {
    const int l = thresholds.bin((x - y).norm());
    if (l >= 0) ++counts[l];
  }
  return counts;
}

double log_pcpi(const Point& x, const Point& y, const PcpiModel& model) {
  const int l = model.thresholds.bin((x - y).norm());
  return l < 0 ? 0.0 : -model.theta[l];
}

double pcpi(const Point& x, const Point& y, const PcpiModel& model) {
  return std::exp(log_pcpi(x, y, model));
}

double log_potential(std::span<const Point> points, const PcpiModel& model) {
  double value = 0.0;
  for (const Point& p : points) {
    if (!model.window.contains(p)) throw OutOfWindow("log_potential: point outside window");
    value += model.log_s(p);
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      value += log_pcpi(points[i], points[j], model);
  return value;
}

double log_potential(const PersistenceDiagram& diagram, const PcpiModel& model) {
  return log_potential(std::span<const Point>(diagram.points), model);
}

double log_conditional_intensity(const Point& u, std::span<const Point> configuration,
                                 const PcpiModel& model) {
  if (!model.window.contains(u))
    throw OutOfWindow("log_conditional_intensity: point outside window");
  double value = model.log_s(u);
  for (const Point& x : configuration) {
    if (x.x() == u.x() && x.y() == u.y()) continue;  // self-exclusion
    value += log_pcpi(u, x, model);
  }
  return value;
}

double log_conditional_intensity(const Point& u, const PersistenceDiagram& diagram,
                                 const PcpiModel& model) {
  return log_conditional_intensity(u, std::span<const Point>(diagram.points), model);
}

nlohmann::json to_json(const PcpiModel& model, const std::string& tessellation_ref) {
  return {{"thresholds", model.thresholds.r},
          {"theta", std::vector<double>(model.theta.begin(), model.theta.end())},
          {"lambda_w", model.lambda_w},
          {"tessellation_ref", tessellation_ref},
          {"window", to_json(model.window)}};
}

PcpiModel model_from_json(const nlohmann::json& j, const DirichletTessellation& tess) {
  InteractionThresholds thresholds(j.at("thresholds").get<std::vector<double>>());
  const auto theta_vec = j.at("theta").get<std::vector<double>>();
  Eigen::VectorXd theta =
      Eigen::Map<const Eigen::VectorXd>(theta_vec.data(), static_cast<Eigen::Index>(theta_vec.size()));
  PcpiModel model(std::move(thresholds), theta, tess, j.at("lambda_w").get<double>());
  const Window w = window_from_json(j.at("window"));
  if (w.x_min != model.window.x_min || w.x_max != model.window.x_max ||
      w.y_min != model.window.y_min || w.y_max != model.window.y_max)
    throw IoError("model json: window does not match tessellation window");
  return model;
}

}  // namespace gibbspd
