#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gibbspd/homology.hpp"
#include "gibbspd/mixture.hpp"
#include "gibbspd/model.hpp"

namespace gibbspd {

struct MoveProbabilities {
  MoveProbabilities(double add, double remove, double relocate);

  double add, remove, relocate;
};

/// Relocation proposal density; an independence proposal evaluated on both
/// sides of the acceptance ratio, truncated to the model window.
using ProposalMixture = GaussianMixture;

/// One chain state: the diagram points, a cached log-potential kept in sync
/// by incremental updates, and the iteration counter.
struct ChainState {
  std::vector<Point> points;
  double log_potential = 0.0;
  std::int64_t iteration = 0;
};

struct MoveStats {
  std::int64_t proposed = 0;
  std::int64_t accepted = 0;
};

struct SampleSet {
  struct Record {
    std::int64_t iteration = 0;
    std::vector<Point> points;
  };
  std::vector<Record> records;
  std::vector<int> cardinality_trace;  // one entry per iteration
  MoveStats add, remove, relocate;
  std::uint64_t seed = 0;
  std::string variant;
  /// Largest |cached - recomputed| log-potential gap seen across accepted
  /// moves; -1 unless the run was asked to validate the cache.
  double max_cache_drift = -1.0;
};

/// Log of s(u) * prod_j h(points_j, u), skipping index `exclude`
/// (pass npos for none). The building block of every acceptance ratio.
double log_papangelou(std::span<const Point> points, const Point& u,
                      const PcpiModel& model,
                      std::size_t exclude = static_cast<std::size_t>(-1));

/// Raw log acceptance ratios. Addition and removal are exact algebraic
/// reciprocals; relocation ratios are exactly antisymmetric in the two
/// configurations.
double log_add_ratio(std::span<const Point> points, const Point& d_star,
                     const PcpiModel& model);
double log_remove_ratio(std::span<const Point> points, std::size_t i,
                        const PcpiModel& model);
double log_relocate_ratio(std::span<const Point> points, std::size_t i,
                          const Point& d_star, const PcpiModel& model,
                          double log_q_old, double log_q_new);

/// Acceptance probabilities min{1, R} for the three move types.
double acc_relocate(const PersistenceDiagram& diagram, std::size_t i,
                    const Point& d_star, const PcpiModel& model,
                    const ProposalMixture& q);
double acc_add(const PersistenceDiagram& diagram, const Point& d_star,
               const PcpiModel& model);
double acc_remove(const PersistenceDiagram& diagram, std::size_t i,
                  const PcpiModel& model);

/// Trans-dimensional sampler: per iteration draw a move type; additions
/// propose a uniform point on the window, removals a uniform index, and a
/// relocation move sweeps every current point with proposals from q. A
/// removal proposed on an empty diagram leaves the chain in place and counts
/// as a rejected proposal. States are recorded every `thin` iterations after
/// burn_in. Fully deterministic given the seed.
SampleSet run_rjmcmc(const PersistenceDiagram& initial, const PcpiModel& model,
                     const MoveProbabilities& moves, const ProposalMixture& q,
                     std::int64_t iterations, std::int64_t burn_in, std::int64_t thin,
                     std::uint64_t seed, bool validate_cache = false);

/// Relocation-only variant; the cardinality stays fixed at |initial|.
SampleSet run_mwg(const PersistenceDiagram& initial, const PcpiModel& model,
                  const ProposalMixture& q, std::int64_t iterations,
                  std::int64_t burn_in, std::int64_t thin, std::uint64_t seed,
                  bool validate_cache = false);

/// Addition/removal-only variant with move probabilities (p_add, 1 - p_add).
SampleSet run_add_remove(const PersistenceDiagram& initial, const PcpiModel& model,
                         double p_add, std::int64_t iterations, std::int64_t burn_in,
                         std::int64_t thin, std::uint64_t seed,
                         bool validate_cache = false);

void write_samples_ndjson(const SampleSet& samples, const std::filesystem::path& path);
SampleSet read_samples_ndjson(const std::filesystem::path& path);
void write_trace_csv(const SampleSet& samples, const std::filesystem::path& path);

}  // namespace gibbspd
