#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "gibbspd/geometry.hpp"
#include "gibbspd/rng.hpp"

namespace gibbspd {

/// One isotropic component: weight c, mean mu, variance sigma (covariance
/// sigma * I2).
struct MixtureComponent {
  double weight;
  Point mean;
  double variance;
};

/// Finite Gaussian mixture over the plane. Weights need not be normalized.
struct GaussianMixture {
  std::vector<MixtureComponent> components;

  void validate() const;
  double total_weight() const;

  /// Mixture density value and its log at x (unnormalized support, exact
  /// weights). Truncation constants cancel in every ratio we form.
  double log_density(const Point& x) const;

  Point sample(Rng& rng) const;

  /// Rejection-sample until the draw lies strictly inside the window.
  Point sample_truncated(Rng& rng, const Window& window) const;
};

nlohmann::json to_json(const GaussianMixture& mixture);
GaussianMixture mixture_from_json(const nlohmann::json& j);

}  // namespace gibbspd
