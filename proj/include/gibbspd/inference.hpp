#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gibbspd/homology.hpp"
#include "gibbspd/sampler.hpp"

namespace gibbspd {

/// Values of the rank-i order statistic (i-th largest persistence) across a
/// sample set; diagrams with fewer than i points contribute 0.
struct OrderStatSample {
  int rank = 1;
  std::vector<double> values;
};

std::vector<OrderStatSample> order_statistics(const SampleSet& samples, int max_rank);

struct CiResult {
  double o_hat = 0.0;  // empirical mean of the sampled rank values
  double a = 0.0;      // inf{a >= 0 : P*(O >= o_org + a) <= alpha}, exact grid infimum
  double upper = 0.0;  // o_hat + a; the CI is [0, upper]
};

CiResult one_sided_ci(const OrderStatSample& sample, double o_org, double alpha);

struct InferenceRow {
  int rank = 0;
  double original = 0.0;
  double o_hat = 0.0;
  double a = 0.0;
  double ci_upper = 0.0;
  double p_value = 0.0;  // P*(O > o_org)
  bool significant = false;
  bool tested = false;
};

struct InferenceReport {
  std::vector<InferenceRow> rows;
  double alpha = 0.05;
  std::size_t n_samples = 0;
};

/// Sequential order-statistic test: rank i is significant when its original
/// value falls outside [0, o_hat_i + a_i]; ranks after the first
/// non-significant one are left untested.
InferenceReport sequential_test(const SampleSet& samples,
                                const PersistenceDiagram& original, double alpha,
                                int max_rank);

void write_report_csv(const InferenceReport& report, const std::filesystem::path& path);
std::string format_report_text(const InferenceReport& report);

}  // namespace gibbspd
