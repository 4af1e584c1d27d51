#include "gibbspd/mixture.hpp"

#include <cmath>
#include <numbers>

#include "gibbspd/errors.hpp"

namespace gibbspd {

void GaussianMixture::validate() const {
  if (components.empty()) throw InvalidConfig("mixture: no components");
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw InvalidConfig("mixture: weights must be positive");
    if (!(c.variance > 0.0)) throw InvalidConfig("mixture: variances must be positive");
  }
}

double GaussianMixture::total_weight() const {
  double sum = 0.0;
  for (const auto& c : components) sum += c.weight;
  return sum;
}

double GaussianMixture::log_density(const Point& x) const {
  // log-sum-exp over components of w_i * N(x; mu_i, var_i I).
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    const double q = (x - c.mean).squaredNorm() / (2.0 * c.variance);
    terms[i] = std::log(c.weight) - std::log(2.0 * std::numbers::pi * c.variance) - q;
    best = std::max(best, terms[i]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - best);
  return best + std::log(sum) - std::log(total_weight());
}

Point GaussianMixture::sample(Rng& rng) const {
  const double u = rng.uniform(0.0, total_weight());
  double acc = 0.0;
  std::size_t pick = components.size() - 1;
  for (std::size_t i = 0; i < components.size(); ++i) {
    acc += components[i].weight;
    if (u < acc) {
      pick = i;
      break;
    }
  }
  const auto& c = components[pick];
  const double sd = std::sqrt(c.variance);
  return Point(rng.normal(c.mean.x(), sd), rng.normal(c.mean.y(), sd));
}

Point GaussianMixture::sample_truncated(Rng& rng, const Window& window) const {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Point p = sample(rng);
    if (window.strictly_contains(p)) return p;
  }
  throw Error("mixture: truncated sampling failed; mixture mass outside window");
}

nlohmann::json to_json(const GaussianMixture& mixture) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : mixture.components)
    comps.push_back({{"weight", c.weight},
                     {"mean", {c.mean.x(), c.mean.y()}},
                     {"variance", c.variance}});
  return {{"components", comps}};
}

GaussianMixture mixture_from_json(const nlohmann::json& j) {
  GaussianMixture mixture;
  for (const auto& c : j.at("components")) {
    MixtureComponent comp;
    comp.weight = c.at("weight").get<double>();
    comp.mean = Point(c.at("mean").at(0).get<double>(), c.at("mean").at(1).get<double>());
    comp.variance = c.at("variance").get<double>();
    mixture.components.push_back(comp);
  }
  mixture.validate();
  return mixture;
}

}  // namespace gibbspd
