#include "kelly/simulation.hpp"

#include <cmath>
#include <limits>

#include <omp.h>

#include "kelly/kelly_core.hpp"

namespace kelly::sim {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    comp_ += (std::abs(sum_) >= std::abs(x)) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

int count_up_steps(PathStream& stream, int steps, double bias) noexcept {
  int ups = 0;
  for (int i = 0; i < steps; ++i) {
    ups += stream.uniform() < bias ? 1 : 0;
  }
  return ups;
}

struct Moments {
  double mean;
  double std_error;
};

// Mean and standard error of value(k) weighted by the histogram.
template <typename Fn>
Moments histogram_moments(const std::vector<std::int64_t>& histogram, std::int64_t paths, Fn value) {
  const double n = static_cast<double>(paths);
  CompensatedSum mean_acc;
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    if (histogram[k] != 0) {
      mean_acc.add(static_cast<double>(histogram[k]) / n * value(static_cast<int>(k)));
    }
  }
  const double mean = mean_acc.value();
  if (paths < 2) {
    return {mean, 0.0};
  }
  CompensatedSum sq_acc;
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    if (histogram[k] != 0) {
      const double d = value(static_cast<int>(k)) - mean;
      sq_acc.add(static_cast<double>(histogram[k]) * d * d);
    }
  }
  const double variance = sq_acc.value() / (n - 1.0);
  return {mean, std::sqrt(variance / n)};
}

bool same_walk(const WalkSpec& a, const WalkSpec& b) {
  return a.steps() == b.steps() && a.bias() == b.bias();
}

}  // namespace

std::uint64_t splitmix64_finalizer(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PathStream::PathStream(std::uint64_t seed, std::uint64_t path) noexcept
    : state_(splitmix64_finalizer(seed ^ splitmix64_finalizer(path + 1))) {}

std::uint64_t PathStream::next() noexcept {
  state_ += kGamma;
  return splitmix64_finalizer(state_);
}

double PathStream::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

void validate(const SimConfig& config) {
  const double f = config.fraction.value();
  if (!(f >= 0.0 && f < 1.0)) {
    throw DomainError("simulated fraction must lie in [0, 1); f = 1 is ruined by a single loss");
  }
  if (config.paths < 1) {
    throw DomainError("simulation needs at least one path");
  }
}

std::vector<std::int64_t> up_step_histogram_serial(const WalkSpec& walk, std::int64_t paths,
                                                   std::uint64_t seed) {
  const int steps = walk.steps();
  const double bias = walk.bias().value();
  std::vector<std::int64_t> histogram(static_cast<std::size_t>(steps) + 1, 0);
  for (std::int64_t path = 0; path < paths; ++path) {
    PathStream stream(seed, static_cast<std::uint64_t>(path));
    ++histogram[static_cast<std::size_t>(count_up_steps(stream, steps, bias))];
  }
  return histogram;
}

std::vector<std::int64_t> up_step_histogram(const WalkSpec& walk, std::int64_t paths,
                                            std::uint64_t seed, int workers) {
  const int steps = walk.steps();
  const double bias = walk.bias().value();
  const std::size_t bins = static_cast<std::size_t>(steps) + 1;
  std::vector<std::int64_t> histogram(bins, 0);
  const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel num_threads(threads)
  {
    std::vector<std::int64_t> local(bins, 0);
#pragma omp for schedule(static)
    for (std::int64_t path = 0; path < paths; ++path) {
      PathStream stream(seed, static_cast<std::uint64_t>(path));
      ++local[static_cast<std::size_t>(count_up_steps(stream, steps, bias))];
    }
#pragma omp critical
    for (std::size_t k = 0; k < bins; ++k) {
      histogram[k] += local[k];
    }
  }
  return histogram;
}

SimResult summarize(const SimConfig& config, std::vector<std::int64_t> histogram) {
  validate(config);
  const int steps = config.walk.steps();
  const double f = config.fraction.value();
  const double up = std::log1p(f);
  const double down = std::log1p(-f);
  auto log_wealth = [&](int k) { return k * up + (steps - k) * down; };

  SimResult result;
  result.paths = config.paths;
  const Moments m = histogram_moments(histogram, config.paths,
                                      [&](int k) { return log_wealth(k) / steps; });
  result.mean_log_growth_per_step = m.mean;
  result.std_error = m.std_error;

  if (config.threshold) {
    // Ties (log-wealth equal to Q up to rounding) count as hits; the
    // allowance mirrors floor_with_tie on the k_Q scale.
    const double q = config.threshold->log_wealth();
    double allowance = 0.0;
    if (f > 0.0) {
      const double k_q = (q - steps * down) / (up - down);
      allowance = kThresholdTieTolerance * (up - down) * std::max(1.0, std::abs(k_q));
    }
    std::int64_t hits = 0;
    for (int k = 0; k <= steps; ++k) {
      if (log_wealth(k) <= q + allowance) {
        hits += histogram[static_cast<std::size_t>(k)];
      }
    }
    result.threshold_hit_fraction = static_cast<double>(hits) / static_cast<double>(config.paths);
  }
  result.up_step_histogram = std::move(histogram);
  return result;
}

SimResult run(const SimConfig& config, int workers) {
  validate(config);
  return summarize(config, up_step_histogram(config.walk, config.paths, config.seed, workers));
}

SimResult run_serial(const SimConfig& config) {
  validate(config);
  return summarize(config, up_step_histogram_serial(config.walk, config.paths, config.seed));
}

std::vector<StrategyRow> compare_strategies(std::span<const SimConfig> configs, int workers) {
  if (configs.empty()) {
    throw DomainError("compare_strategies needs at least one config");
  }
  const SimConfig& base = configs.front();
  for (const SimConfig& c : configs) {
    validate(c);
    if (!same_walk(c.walk, base.walk) || c.paths != base.paths || c.seed != base.seed) {
      throw DomainError("strategies must share walk, path count and seed");
    }
  }

  const auto histogram = up_step_histogram(base.walk, base.paths, base.seed, workers);
  const int steps = base.walk.steps();
  auto per_step = [steps](double f) {
    const double up = std::log1p(f);
    const double down = std::log1p(-f);
    return [=](int k) { return (k * up + (steps - k) * down) / steps; };
  };
  const auto base_growth = per_step(base.fraction.value());

  std::vector<StrategyRow> rows;
  rows.reserve(configs.size());
  for (const SimConfig& c : configs) {
    const auto growth = per_step(c.fraction.value());
    const Moments diff = histogram_moments(histogram, c.paths,
                                           [&](int k) { return growth(k) - base_growth(k); });
    StrategyRow row{c.fraction.value(),
                    summarize(c, histogram),
                    even_odds_growth_rate(c.walk.bias(), c.fraction),
                    std::nullopt,
                    diff.mean,
                    diff.std_error,
                    0.0};
    if (c.threshold && c.fraction.value() > 0.0) {
      row.analytic_prob_below = prob_growth_below(c.fraction, c.walk, *c.threshold).value();
    }
    if (diff.std_error > 0.0) {
      row.paired_z = diff.mean / diff.std_error;
    } else if (diff.mean != 0.0) {
      row.paired_z = std::copysign(std::numeric_limits<double>::infinity(), diff.mean);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ThresholdCheck threshold_check(const SimConfig& config, const SimResult& result) {
  if (!config.threshold || !result.threshold_hit_fraction) {
    throw DomainError("threshold validation needs a growth threshold");
  }
  if (!(config.fraction.value() > 0.0)) {
    throw DomainError("threshold validation requires 0 < f < 1");
  }
  const double empirical = *result.threshold_hit_fraction;
  const double exact = prob_growth_below(config.fraction, config.walk, *config.threshold).value();
  const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(config.paths));
  double z = 0.0;
  if (se > 0.0) {
    z = (empirical - exact) / se;
  } else if (empirical != exact) {
    z = std::copysign(std::numeric_limits<double>::infinity(), empirical - exact);
  }
  return {empirical, exact, z};
}

ThresholdCheck threshold_validation(const SimConfig& config, int workers) {
  if (!config.threshold) {
    throw DomainError("threshold validation needs a growth threshold");
  }
  return threshold_check(config, run(config, workers));
}

}  // namespace kelly::sim
