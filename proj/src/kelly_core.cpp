#include "kelly/kelly_core.hpp"

#include <algorithm>
#include <cmath>

namespace kelly {
namespace {

// weight * log(arg), with 0 * log(0) = 0.
double weighted_log(double weight, double arg) {
  if (weight == 0.0) {
    return 0.0;
  }
  if (!(arg > 0.0)) {
    throw DomainError("log utility undefined: position loses all capital on a possible outcome");
  }
  return weight * std::log(arg);
}

double long_utility(double q, double p, double f) {
  return weighted_log(1.0 - q, 1.0 - f) + weighted_log(q, 1.0 + f * (1.0 - p) / p);
}

}  // namespace

double log_utility(Probability q, Probability p, BetFraction f) {
  require_interior(p, "price p");
  const double stake = f.value();
  if (stake >= 0.0) {
    return long_utility(q.value(), p.value(), stake);
  }
  return long_utility(q.complement(), p.complement(), -stake);
}

double log_utility_alpha(Probability q, Probability p, BetFraction f, PayoutSpec spec) {
  require_interior(p, "price p");
  if (f.value() < 0.0) {
    throw DomainError("alpha payout is defined for long positions only");
  }
  const double multiplier = std::pow(p.complement() / p.value(), spec.alpha());
  return weighted_log(q.complement(), 1.0 - f.value()) +
         weighted_log(q.value(), 1.0 + f.value() * multiplier);
}

BetFraction optimal_fraction(Probability q, Probability p) {
  require_interior(p, "price p");
  const double qv = q.value();
  const double pv = p.value();
  if (qv >= pv) {
    return BetFraction(std::clamp(qv - pv * (1.0 - qv) / (1.0 - pv), 0.0, 1.0));
  }
  const double complement_stake = (1.0 - qv) - (1.0 - pv) * qv / pv;
  return BetFraction(-std::clamp(complement_stake, 0.0, 1.0));
}

double optimal_fraction_odds_form(Probability q, Probability p) {
  const double P = OddsRatio::from(p).value();
  const double Q = OddsRatio::from(q).value();
  return (Q - P) / (1.0 + Q);
}

BetFraction optimal_fraction_alpha(Probability q, Probability p, PayoutSpec spec) {
  require_interior(p, "price p");
  const double inverse_multiplier = std::pow(p.value() / p.complement(), spec.alpha());
  const double f = q.value() - q.complement() * inverse_multiplier;
  return BetFraction(std::clamp(f, 0.0, 1.0));
}

double even_odds_growth_rate(Probability p, BetFraction f) {
  const double stake = f.value();
  if (!(std::abs(stake) < 1.0)) {
    throw DomainError("even-odds growth rate requires |f| < 1");
  }
  return p.value() * std::log1p(stake) + p.complement() * std::log1p(-stake);
}

}  // namespace kelly
