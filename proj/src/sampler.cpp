#include "gibbspd/sampler.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gibbspd/errors.hpp"
#include "gibbspd/rng.hpp"

namespace gibbspd {

namespace {
constexpr std::size_t kNone = static_cast<std::size_t>(-1);
}

MoveProbabilities::MoveProbabilities(double add_, double remove_, double relocate_)
    : add(add_), remove(remove_), relocate(relocate_) {
  if (add < 0.0 || remove < 0.0 || relocate < 0.0)
    throw InvalidConfig("move probabilities must be nonnegative");
  if (std::abs(add + remove + relocate - 1.0) > 1e-12)
    throw InvalidConfig("move probabilities must sum to 1");
}

double log_papangelou(std::span<const Point> points, const Point& u,
                      const PcpiModel& model, std::size_t exclude) {
  double value = model.log_s(u);
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (j == exclude) continue;
    value += log_pcpi(points[j], u, model);
  }
  return value;
}

double log_add_ratio(std::span<const Point> points, const Point& d_star,
                     const PcpiModel& model) {
  const double lp = log_papangelou(points, d_star, model);
  return (lp + std::log(model.lambda_w)) -
         std::log(static_cast<double>(points.size()) + 1.0);
}

double log_remove_ratio(std::span<const Point> points, std::size_t i,
                        const PcpiModel& model) {
  if (points.empty()) throw EmptyDiagram("log_remove_ratio: empty configuration");
  if (i >= points.size()) throw Error("log_remove_ratio: index out of range");
  const double lp = log_papangelou(points, points[i], model, i);
  // Exact negation of log_add_ratio on the reciprocal move.
  return std::log(static_cast<double>(points.size())) -
         (lp + std::log(model.lambda_w));
}

double log_relocate_ratio(std::span<const Point> points, std::size_t i,
                          const Point& d_star, const PcpiModel& model,
                          double log_q_old, double log_q_new) {
  if (i >= points.size()) throw Error("log_relocate_ratio: index out of range");
  const double lp_new = log_papangelou(points, d_star, model, i);
  const double lp_old = log_papangelou(points, points[i], model, i);
  return (lp_new + log_q_old) - (lp_old + log_q_new);
}

double acc_relocate(const PersistenceDiagram& diagram, std::size_t i,
                    const Point& d_star, const PcpiModel& model,
                    const ProposalMixture& q) {
  const double log_r =
      log_relocate_ratio(diagram.points, i, d_star, model,
                         q.log_density(diagram.points[i]), q.log_density(d_star));
  return std::min(1.0, std::exp(log_r));
}

double acc_add(const PersistenceDiagram& diagram, const Point& d_star,
               const PcpiModel& model) {
  return std::min(1.0, std::exp(log_add_ratio(diagram.points, d_star, model)));
}

double acc_remove(const PersistenceDiagram& diagram, std::size_t i,
                  const PcpiModel& model) {
  return std::min(1.0, std::exp(log_remove_ratio(diagram.points, i, model)));
}

namespace {

SampleSet run_chain(const PersistenceDiagram& initial, const PcpiModel& model,
                    const MoveProbabilities& moves, const ProposalMixture* q,
                    std::int64_t iterations, std::int64_t burn_in, std::int64_t thin,
                    std::uint64_t seed, const std::string& variant,
                    bool validate_cache) {
  if (burn_in < 0 || iterations <= burn_in)
    throw InvalidConfig("sampler: need iterations > burn_in >= 0");
  if (thin < 1) throw InvalidConfig("sampler: thin must be >= 1");
  if (moves.relocate > 0.0 && q == nullptr)
    throw InvalidConfig("sampler: relocation requires a proposal density");

  ChainState state;
  state.points = initial.points;
  state.log_potential = log_potential(state.points, model);

  SampleSet out;
  out.seed = seed;
  out.variant = variant;
  out.cardinality_trace.reserve(static_cast<std::size_t>(iterations));

  Rng rng(seed);
  const Window& window = model.window;
  double max_drift = validate_cache ? 0.0 : -1.0;
  const auto check_cache = [&] {
    if (!validate_cache) return;
    const double full = log_potential(state.points, model);
    max_drift = std::max(max_drift, std::abs(state.log_potential - full));
  };

  for (std::int64_t l = 1; l <= iterations; ++l) {
    const double move = rng.uniform();
    if (move < moves.add) {
      ++out.add.proposed;
      const Point d_star(rng.uniform(window.x_min, window.x_max),
                         rng.uniform(window.y_min, window.y_max));
      const double lp = log_papangelou(state.points, d_star, model);
      const double log_r = (lp + std::log(model.lambda_w)) -
                           std::log(static_cast<double>(state.points.size()) + 1.0);
      if (std::log(rng.uniform()) < log_r) {
        state.points.push_back(d_star);
        state.log_potential += lp;
        ++out.add.accepted;
        check_cache();
      }
    } else if (move < moves.add + moves.remove) {
      ++out.remove.proposed;
      if (!state.points.empty()) {
        const std::size_t n = state.points.size();
        const std::size_t i = static_cast<std::size_t>(rng.below(n));
        const double lp = log_papangelou(state.points, state.points[i], model, i);
        const double log_r = std::log(static_cast<double>(n)) -
                             (lp + std::log(model.lambda_w));
        if (std::log(rng.uniform()) < log_r) {
          state.points.erase(state.points.begin() + static_cast<std::ptrdiff_t>(i));
          state.log_potential -= lp;
          ++out.remove.accepted;
          check_cache();
        }
      }
    } else {
      // Metropolis-within-Gibbs sweep over every current point.
      for (std::size_t i = 0; i < state.points.size(); ++i) {
        ++out.relocate.proposed;
        const Point d_star = q->sample_truncated(rng, window);
        const double lp_new = log_papangelou(state.points, d_star, model, i);
        const double lp_old = log_papangelou(state.points, state.points[i], model, i);
        const double log_r = (lp_new + q->log_density(state.points[i])) -
                             (lp_old + q->log_density(d_star));
        if (std::log(rng.uniform()) < log_r) {
          state.log_potential += lp_new - lp_old;
          state.points[i] = d_star;
          ++out.relocate.accepted;
          check_cache();
        }
      }
    }
    state.iteration = l;
    out.cardinality_trace.push_back(static_cast<int>(state.points.size()));
    if (l > burn_in && (l - burn_in) % thin == 0)
      out.records.push_back({l, state.points});

#ifndef NDEBUG
    if (l % 128 == 0) {
      const double full = log_potential(state.points, model);
      assert(std::abs(state.log_potential - full) <= 1e-9 * std::max(1.0, std::abs(full)));
    }
#endif
  }
  out.max_cache_drift = max_drift;
  return out;
}

}  // namespace

SampleSet run_rjmcmc(const PersistenceDiagram& initial, const PcpiModel& model,
                     const MoveProbabilities& moves, const ProposalMixture& q,
                     std::int64_t iterations, std::int64_t burn_in, std::int64_t thin,
                     std::uint64_t seed, bool validate_cache) {
  return run_chain(initial, model, moves, &q, iterations, burn_in, thin, seed,
                   "rjmcmc", validate_cache);
}

SampleSet run_mwg(const PersistenceDiagram& initial, const PcpiModel& model,
                  const ProposalMixture& q, std::int64_t iterations,
                  std::int64_t burn_in, std::int64_t thin, std::uint64_t seed,
                  bool validate_cache) {
  return run_chain(initial, model, MoveProbabilities(0.0, 0.0, 1.0), &q, iterations,
                   burn_in, thin, seed, "mwg", validate_cache);
}

SampleSet run_add_remove(const PersistenceDiagram& initial, const PcpiModel& model,
                         double p_add, std::int64_t iterations, std::int64_t burn_in,
                         std::int64_t thin, std::uint64_t seed, bool validate_cache) {
  if (!(p_add > 0.0) || !(p_add < 1.0))
    throw InvalidConfig("run_add_remove: p_add must lie in (0, 1)");
  return run_chain(initial, model, MoveProbabilities(p_add, 1.0 - p_add, 0.0), nullptr,
                   iterations, burn_in, thin, seed, "add_remove", validate_cache);
}

namespace {

nlohmann::json stats_json(const MoveStats& s) {
  return {{"proposed", s.proposed}, {"accepted", s.accepted}};
}

MoveStats stats_from_json(const nlohmann::json& j) {
  return {j.at("proposed").get<std::int64_t>(), j.at("accepted").get<std::int64_t>()};
}

}  // namespace

void write_samples_ndjson(const SampleSet& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  nlohmann::json header = {{"variant", samples.variant},
                           {"seed", samples.seed},
                           {"records", samples.records.size()},
                           {"moves",
                            {{"add", stats_json(samples.add)},
                             {"remove", stats_json(samples.remove)},
                             {"relocate", stats_json(samples.relocate)}}}};
  out << header.dump() << '\n';
  for (const auto& record : samples.records) {
    nlohmann::json points = nlohmann::json::array();
    for (const Point& p : record.points) points.push_back({p.x(), p.y()});
    nlohmann::json line = {{"iteration", record.iteration}, {"points", points}};
    out << line.dump() << '\n';
  }
}

SampleSet read_samples_ndjson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("samples ndjson: empty file");
  const nlohmann::json header = nlohmann::json::parse(line);
  SampleSet samples;
  samples.variant = header.at("variant").get<std::string>();
  samples.seed = header.at("seed").get<std::uint64_t>();
  samples.add = stats_from_json(header.at("moves").at("add"));
  samples.remove = stats_from_json(header.at("moves").at("remove"));
  samples.relocate = stats_from_json(header.at("moves").at("relocate"));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    SampleSet::Record record;
    record.iteration = j.at("iteration").get<std::int64_t>();
    for (const auto& p : j.at("points"))
      record.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    samples.records.push_back(std::move(record));
    samples.cardinality_trace.push_back(
        static_cast<int>(samples.records.back().points.size()));
  }
  return samples;
}

void write_trace_csv(const SampleSet& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  out << "iteration,cardinality\n";
  for (std::size_t l = 0; l < samples.cardinality_trace.size(); ++l)
    out << (l + 1) << ',' << samples.cardinality_trace[l] << '\n';
}

}  // namespace gibbspd
