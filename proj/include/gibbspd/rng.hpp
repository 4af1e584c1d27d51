#pragma once

#include <cstdint>
#include <string_view>

namespace gibbspd {

/// Derive an independent child seed from a base seed and a stream label.
/// Streams are stable: adding new labels never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::uint64_t index = 0);

/// Deterministic random generator with a fixed bit-level contract.
///
/// All distributions are implemented on top of the raw engine output so
/// that sequences are reproducible across standard libraries and builds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Next raw 64-bit word.
  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform double in [a, b).
  double uniform(double a, double b);

  /// Unbiased uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal deviate (Marsaglia polar method, cached spare).
  double normal();

  /// Normal deviate with the given mean and standard deviation.
  double normal(double mean, double sd);

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gibbspd
