#include "kelly/growth_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "kelly/kelly_core.hpp"

namespace kelly {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(n!) - log(sqrt(2 pi n) (n/e)^n), the Stirling remainder.
double stirling_error(int n) {
  static const std::array<double, 16> small = [] {
    std::array<double, 16> t{};
    t[0] = 0.0;
    for (int i = 1; i < 16; ++i) {
      const double x = i;
      t[i] = std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return t;
  }();
  if (n < 16) {
    return small[n];
  }
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double x = n;
  const double xx = x * x;
  if (n > 500) return (s0 - s1 / xx) / x;
  if (n > 80) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

// x log(x/m) + m - x, evaluated without cancellation when x ~ m.
double deviance_term(double x, double m) {
  if (std::abs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double next = s + ej / (2 * j + 1);
      if (next == s) {
        return next;
      }
      s = next;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

int floor_steps(double k) {
  return static_cast<int>(std::floor(k));
}

}  // namespace

double log_binomial_pmf(const WalkSpec& walk, int k) {
  const int n = walk.steps();
  if (k < 0 || k > n) {
    throw DomainError("binomial pmf requires 0 <= k <= N");
  }
  const double p = walk.bias().value();
  const double q = walk.bias().complement();
  if (p == 0.0) return k == 0 ? 0.0 : kNegInf;
  if (q == 0.0) return k == n ? 0.0 : kNegInf;
  if (k == 0) return n * std::log1p(-p);
  if (k == n) return n * std::log(p);

  // Saddle-point form (Loader 2000): accurate to a few ulps for all N.
  const double nd = n;
  const double kd = k;
  const double lc = stirling_error(n) - stirling_error(k) - stirling_error(n - k) -
                    deviance_term(kd, nd * p) - deviance_term(nd - kd, nd * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(kd) + std::log1p(-kd / nd);
  return lc - 0.5 * lf;
}

double binomial_pmf(const WalkSpec& walk, int k) {
  return std::exp(log_binomial_pmf(walk, k));
}

double log_binomial_cdf(const WalkSpec& walk, double k) {
  const int n = walk.steps();
  if (std::isnan(k)) {
    throw DomainError("binomial cdf argument is NaN");
  }
  if (k < 0.0) return kNegInf;
  if (k >= n) return 0.0;
  const int upper = floor_steps(k);

  // Unimodal pmf: the largest term on [0, upper] sits at min(upper, mode).
  const double mode_real = (n + 1) * walk.bias().value();
  const int mode = std::clamp(static_cast<int>(std::floor(mode_real)), 0, n);
  const double reference = log_binomial_pmf(walk, std::min(upper, mode));
  if (reference == kNegInf) {
    return kNegInf;
  }
  double sum = 0.0;
  double compensation = 0.0;
  for (int i = 0; i <= upper; ++i) {
    const double term = std::exp(log_binomial_pmf(walk, i) - reference);
    const double t = sum + term;
    compensation += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return std::min(0.0, reference + std::log(sum + compensation));
}

double binomial_cdf(const WalkSpec& walk, double k) {
  if (k >= walk.steps()) return 1.0;
  return std::min(1.0, std::exp(log_binomial_cdf(walk, k)));
}

double kl_divergence(Probability a, Probability p) {
  require_interior(p, "reference probability p");
  const double av = a.value();
  const double pv = p.value();
  if (av == pv) {
    return 0.0;
  }
  double d = 0.0;
  if (av > 0.0) d += av * std::log(av / pv);
  if (av < 1.0) d += (1.0 - av) * std::log((1.0 - av) / (1.0 - pv));
  return std::max(0.0, d);
}

int max_bound_steps(const WalkSpec& walk) {
  const double np = walk.steps() * walk.bias().value();
  return static_cast<int>(std::floor(np * (1.0 + 1e-12)));
}

namespace {

double bound_exponent(const WalkSpec& walk, int k) {
  require_interior(walk.bias(), "walk bias p");
  if (k < 0 || k > max_bound_steps(walk)) {
    throw OutOfValidityRegion("tail bound requires 0 <= k <= N p (k = " + std::to_string(k) +
                              ", N p = " + std::to_string(walk.steps() * walk.bias().value()) + ")");
  }
  const double n = walk.steps();
  return -n * kl_divergence(Probability(k / n), walk.bias());
}

}  // namespace

double chernoff_upper(const WalkSpec& walk, int k) {
  return std::exp(bound_exponent(walk, k));
}

double chernoff_lower(const WalkSpec& walk, int k) {
  const double n = walk.steps();
  return std::exp(bound_exponent(walk, k)) / std::sqrt(2.0 * n);
}

double rate_per_step(const WalkSpec& walk, int k) {
  if (k < 0) {
    throw DomainError("rate per step requires k >= 0");
  }
  const double log_f = log_binomial_cdf(walk, k);
  if (log_f == kNegInf) {
    throw DomainError("rate per step undefined: F(k, N, p) = 0");
  }
  return -log_f / walk.steps();
}

double threshold_steps(BetFraction f, const WalkSpec& walk, GrowthThreshold threshold) {
  const double fv = f.value();
  if (!(fv > 0.0 && fv < 1.0)) {
    throw DomainError("threshold steps require 0 < f < 1");
  }
  const double up = std::log1p(fv);
  const double down = std::log1p(-fv);
  return (threshold.log_wealth() - walk.steps() * down) / (up - down);
}

double floor_with_tie(double k) {
  const double nearest = std::round(k);
  if (std::abs(k - nearest) <= kThresholdTieTolerance * std::max(1.0, std::abs(k))) {
    return nearest;
  }
  return std::floor(k);
}

Probability prob_growth_below(BetFraction f, const WalkSpec& walk, GrowthThreshold threshold) {
  const double k = threshold_steps(f, walk, threshold);
  const double clamped = std::clamp(floor_with_tie(k), -1.0, static_cast<double>(walk.steps()));
  return Probability(binomial_cdf(walk, clamped));
}

BiasSensitivity sensitivity_bias(int k, const WalkSpec& walk, double eps) {
  const int n = walk.steps();
  if (k < 0 || k > n) {
    throw DomainError("sensitivity requires 0 <= k <= N");
  }
  const double p = walk.bias().value();
  require_interior(walk.bias(), "walk bias p");
  const double shifted = p + eps;
  if (!(shifted > 0.0 && shifted < 1.0) || !std::isfinite(eps)) {
    throw DomainError("p + eps must lie strictly inside (0, 1)");
  }
  const Probability a(static_cast<double>(k) / n);
  const double exact = kl_divergence(a, Probability(shifted)) - kl_divergence(a, walk.bias());
  const double first_order = (p - a.value()) / (p * (1.0 - p)) * eps;
  return {exact, first_order};
}

FractionSensitivity sensitivity_fraction(Probability p, double eps) {
  require_interior(p, "probability p");
  const double optimum = 2.0 * p.value() - 1.0;
  const double moved = optimum + eps;
  if (!(moved > -1.0 && moved < 1.0) || !std::isfinite(eps)) {
    throw DomainError("2p - 1 + eps must lie strictly inside (-1, 1)");
  }
  const double variance = p.value() * p.complement();
  const double exact =
      even_odds_growth_rate(p, BetFraction(moved)) - even_odds_growth_rate(p, BetFraction(optimum));
  const double coefficient = -1.0 / (8.0 * variance);
  const double quoted_coefficient = -1.0 / (4.0 * variance);
  return {exact, coefficient * eps * eps, coefficient, quoted_coefficient, quoted_coefficient * eps * eps};
}

BetFraction kelly_fraction_even_odds(Probability p) {
  return BetFraction(2.0 * p.value() - 1.0);
}

}  // namespace kelly
