#pragma once

#include "kelly/types.hpp"

namespace kelly {

/// N steps of a coin walk with up-probability `bias`. The bias may sit on an
/// endpoint (a deterministic walk); operations that divide by p or 1-p check
/// for the open interval themselves.
class WalkSpec {
 public:
  WalkSpec(int steps, Probability bias) : steps_(steps), bias_(bias) {
    if (steps < 1) {
      throw DomainError("walk must have at least one step");
    }
  }

  int steps() const noexcept { return steps_; }
  Probability bias() const noexcept { return bias_; }

 private:
  int steps_;
  Probability bias_;
};

/// Terminal log-wealth level Q (natural log, relative to initial wealth).
class GrowthThreshold {
 public:
  explicit GrowthThreshold(double log_wealth) : log_wealth_(log_wealth) {
    if (!std::isfinite(log_wealth)) {
      throw DomainError("growth threshold must be finite");
    }
  }

  double log_wealth() const noexcept { return log_wealth_; }

 private:
  double log_wealth_;
};

// --- binomial distribution -------------------------------------------------

double log_binomial_pmf(const WalkSpec& walk, int k);
double binomial_pmf(const WalkSpec& walk, int k);

/// log F(k, N, p) with k floored; -inf for k < 0, 0 for k >= N.
double log_binomial_cdf(const WalkSpec& walk, double k);

/// F(k, N, p) = P(#up-steps <= floor(k)).
double binomial_cdf(const WalkSpec& walk, double k);

// --- relative entropy and tail bounds --------------------------------------

/// D(a || p) for Bernoulli laws, with 0 log 0 = 0. Requires p in (0, 1).
double kl_divergence(Probability a, Probability p);

/// Largest k for which the lower-tail bounds apply: floor(N p), guarded
/// against representation error in the product.
int max_bound_steps(const WalkSpec& walk);

/// exp(-N D(k/N || p)) for 0 <= k <= N p.
double chernoff_upper(const WalkSpec& walk, int k);

/// exp(-N D(k/N || p)) / sqrt(2N) for 0 <= k <= N p.
double chernoff_lower(const WalkSpec& walk, int k);

/// -log F(k, N, p) / N, computed in log space so it stays finite for
/// tails far below the smallest double.
double rate_per_step(const WalkSpec& walk, int k);

// --- double-or-nothing thresholds ------------------------------------------

/// Real k_Q with k log(1+f) + (N-k) log(1-f) = Q. Not clamped; values
/// outside [0, N] mean the threshold is always or never reached.
double threshold_steps(BetFraction f, const WalkSpec& walk, GrowthThreshold threshold);

/// Relative tolerance used to treat k_Q as an exact integer when it is one
/// up to rounding (terminal log-wealth exactly equal to Q counts as "<= Q").
inline constexpr double kThresholdTieTolerance = 1e-9;

/// floor(k) except that values within kThresholdTieTolerance of an integer
/// snap to it.
double floor_with_tie(double k);

/// P(terminal log-wealth <= Q) = F(floor(k_Q), N, p) with k_Q clamped to
/// [-1, N].
Probability prob_growth_below(BetFraction f, const WalkSpec& walk, GrowthThreshold threshold);

// --- sensitivity -------------------------------------------------------------

struct BiasSensitivity {
  double exact;        // D(k/N || p+eps) - D(k/N || p)
  double first_order;  // (p - k/N) / (p(1-p)) * eps
};

BiasSensitivity sensitivity_bias(int k, const WalkSpec& walk, double eps);

struct FractionSensitivity {
  double exact;              // U(p, 2p-1+eps) - U(p, 2p-1)
  double quadratic;          // coefficient * eps^2
  double coefficient;        // -1 / (8 p (1-p)), half the second derivative
  double quoted_coefficient;  // -1 / (4 p (1-p)), as commonly quoted
  double quoted_quadratic;    // quoted_coefficient * eps^2
};

FractionSensitivity sensitivity_fraction(Probability p, double eps);

/// 2p - 1.
BetFraction kelly_fraction_even_odds(Probability p);

}  // namespace kelly
