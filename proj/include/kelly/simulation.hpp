#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kelly/growth_analysis.hpp"
#include "kelly/types.hpp"

namespace kelly::sim {

/// Counter-based generator: the i-th draw of a path is
/// splitmix64_finalizer(key + (i + 1) * 0x9e3779b97f4a7c15), with
/// key = splitmix64_finalizer(seed ^ splitmix64_finalizer(path + 1)).
/// Every (seed, path) pair owns an independent stream, so the order in which
/// paths are evaluated never affects the draws.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path) noexcept;

  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64_finalizer(std::uint64_t z) noexcept;

struct SimConfig {
  WalkSpec walk;
  BetFraction fraction;  // in [0, 1)
  std::int64_t paths;
  std::uint64_t seed;
  std::optional<GrowthThreshold> threshold;
};

struct SimResult {
  double mean_log_growth_per_step = 0.0;
  double std_error = 0.0;
  std::optional<double> threshold_hit_fraction;  // share of paths with log-wealth <= Q
  std::int64_t paths = 0;
  std::vector<std::int64_t> up_step_histogram;  // index k = number of up-steps
};

/// Throws DomainError unless the config invariants hold.
void validate(const SimConfig& config);

/// Up-step counts per path folded into a histogram of size N + 1.
/// workers <= 0 uses the OpenMP default. Integer merging keeps the result
/// identical for any worker count.
std::vector<std::int64_t> up_step_histogram(const WalkSpec& walk, std::int64_t paths,
                                            std::uint64_t seed, int workers = 0);

/// Single-threaded reference kernel for up_step_histogram.
std::vector<std::int64_t> up_step_histogram_serial(const WalkSpec& walk, std::int64_t paths,
                                                   std::uint64_t seed);

/// Growth statistics for a given histogram. Log-wealth for k up-steps is
/// k log(1+f) + (N-k) log(1-f).
SimResult summarize(const SimConfig& config, std::vector<std::int64_t> histogram);

SimResult run(const SimConfig& config, int workers = 0);
SimResult run_serial(const SimConfig& config);

struct StrategyRow {
  double fraction;
  SimResult result;
  double analytic_growth_rate;             // U(p, f)
  std::optional<double> analytic_prob_below;  // F(floor k_Q, N, p) when a threshold is set
  double paired_mean_difference;           // per step, this row minus the first row
  double paired_std_error;
  double paired_z;                         // difference / std error (0 when both are 0)
};

/// Runs every config on the same coin-flip streams (common random numbers).
/// All configs must share the walk, path count and seed.
std::vector<StrategyRow> compare_strategies(std::span<const SimConfig> configs, int workers = 0);

struct ThresholdCheck {
  double empirical;
  double exact;
  double z_score;  // (empirical - exact) / sqrt(exact (1 - exact) / paths)
};

/// Compares an existing run's hit fraction with prob_growth_below.
ThresholdCheck threshold_check(const SimConfig& config, const SimResult& result);

ThresholdCheck threshold_validation(const SimConfig& config, int workers = 0);

}  // namespace kelly::sim
