#include "gibbspd/inference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gibbspd/errors.hpp"

namespace gibbspd {

std::vector<OrderStatSample> order_statistics(const SampleSet& samples, int max_rank) {
  if (samples.records.empty()) throw EmptySampleSet("order_statistics: no samples");
  if (max_rank < 1) throw InvalidConfig("order_statistics: max_rank must be >= 1");

  std::vector<OrderStatSample> out(static_cast<std::size_t>(max_rank));
  for (int i = 0; i < max_rank; ++i) {
    out[static_cast<std::size_t>(i)].rank = i + 1;
    out[static_cast<std::size_t>(i)].values.reserve(samples.records.size());
  }
  std::vector<double> persistences;
  for (const auto& record : samples.records) {
    persistences.clear();
    for (const Point& p : record.points) persistences.push_back(p.y());
    std::sort(persistences.begin(), persistences.end(), std::greater<>());
    for (int i = 0; i < max_rank; ++i) {
      const std::size_t idx = static_cast<std::size_t>(i);
      out[idx].values.push_back(idx < persistences.size() ? persistences[idx] : 0.0);
    }
  }
  return out;
}

CiResult one_sided_ci(const OrderStatSample& sample, double o_org, double alpha) {
  if (sample.values.empty()) throw EmptySampleSet("one_sided_ci: no values");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidConfig("one_sided_ci: alpha must lie in (0, 1]");

  const double n = static_cast<double>(sample.values.size());
  double mean = 0.0;
  for (double v : sample.values) mean += v;
  mean /= n;

  // Candidate grid for the infimum: 0 and the exceedances v - o_org >= 0.
  std::vector<double> grid{0.0};
  for (double v : sample.values)
    if (v >= o_org) grid.push_back(v - o_org);
  std::sort(grid.begin(), grid.end());

  // count(a) = #{v >= o_org + a} is a left-open step function of a, so the
  // infimum of {a : count(a) <= alpha n} is the smallest grid point whose
  // strictly-above count already satisfies the bound.
  const double bound = alpha * n;
  double a = grid.back();
  for (double candidate : grid) {
    std::size_t above = 0;
    for (double v : sample.values)
      if (v - o_org > candidate) ++above;
    if (static_cast<double>(above) <= bound) {
      a = candidate;
      break;
    }
  }
  return {mean, a, mean + a};
}

InferenceReport sequential_test(const SampleSet& samples,
                                const PersistenceDiagram& original, double alpha,
                                int max_rank) {
  if (original.points.empty()) throw EmptyDiagram("sequential_test: empty original diagram");

  std::vector<double> originals;
  for (const Point& p : original.points) originals.push_back(p.y());
  std::sort(originals.begin(), originals.end(), std::greater<>());

  const auto stats = order_statistics(samples, max_rank);

  InferenceReport report;
  report.alpha = alpha;
  report.n_samples = samples.records.size();

  bool testing = true;
  for (int i = 0; i < max_rank; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    InferenceRow row;
    row.rank = i + 1;
    row.original = idx < originals.size() ? originals[idx] : 0.0;
    const CiResult ci = one_sided_ci(stats[idx], row.original, alpha);
    row.o_hat = ci.o_hat;
    row.a = ci.a;
    row.ci_upper = ci.upper;
    std::size_t above = 0;
    for (double v : stats[idx].values)
      if (v > row.original) ++above;
    row.p_value = static_cast<double>(above) / static_cast<double>(stats[idx].values.size());
    if (testing) {
      row.tested = true;
      row.significant = row.original > row.ci_upper;
      if (!row.significant) testing = false;
    }
    report.rows.push_back(row);
  }
  return report;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_report_csv(const InferenceReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << "rank,original,o_hat,ci_upper,p_value,significant,tested\n";
  for (const auto& row : report.rows)
    out << row.rank << ',' << fmt(row.original) << ',' << fmt(row.o_hat) << ','
        << fmt(row.ci_upper) << ',' << fmt(row.p_value) << ','
        << (row.significant ? 1 : 0) << ',' << (row.tested ? 1 : 0) << '\n';
}

std::string format_report_text(const InferenceReport& report) {
  std::ostringstream out;
  out << "rank  original    CI upper    P value     significant\n";
  for (const auto& row : report.rows) {
    char line[160];
    std::snprintf(line, sizeof(line), "O_%-3d %-11.4f [0,%.4f]  %-11.3g %s\n",
                  row.rank, row.original, row.ci_upper, row.p_value,
                  !row.tested ? "(not tested)" : (row.significant ? "yes" : "no"));
    out << line;
  }
  return out.str();
}

}  // namespace gibbspd
