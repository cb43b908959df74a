#include "kelly/market_clearing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kelly/kelly_core.hpp"

namespace kelly {
namespace {

constexpr double kPoleGuard = 1e-12;

double sum_exposures(const MarketPopulation& population, double price) {
  const Probability p(price);
  double total = 0.0;
  for (const Investor& inv : population.investors()) {
    total += signed_exposure(inv, p);
  }
  return total;
}

}  // namespace

Investor::Investor(double capital_, Probability belief_) : capital(capital_), belief(belief_) {
  if (!(capital_ > 0.0) || !std::isfinite(capital_)) {
    throw DomainError("investor capital must be positive and finite");
  }
}

MarketPopulation::MarketPopulation(std::vector<Investor> investors)
    : investors_(std::move(investors)) {
  if (investors_.empty()) {
    throw DomainError("market population must contain at least one investor");
  }
  for (const Investor& inv : investors_) {
    total_capital_ += inv.capital;
  }
  if (!(total_capital_ > 0.0) || !std::isfinite(total_capital_)) {
    throw DomainError("total capital must be positive and finite");
  }
}

MarketPopulation MarketPopulation::scaled(double factor) const {
  std::vector<Investor> out;
  out.reserve(investors_.size());
  for (const Investor& inv : investors_) {
    out.emplace_back(inv.capital * factor, inv.belief);
  }
  return MarketPopulation(std::move(out));
}

double signed_exposure(const Investor& investor, Probability p) {
  return investor.capital * optimal_fraction(investor.belief, p).value();
}

double aggregate_exposure(const MarketPopulation& population, Probability p) {
  require_interior(p, "price p");
  return sum_exposures(population, p.value());
}

Probability mean_belief(const MarketPopulation& population) {
  double weighted = 0.0;
  for (const Investor& inv : population.investors()) {
    weighted += inv.capital * inv.belief.value();
  }
  return Probability(std::clamp(weighted / population.total_capital(), 0.0, 1.0));
}

ClearingResult clearing_price(const MarketPopulation& population, double tol) {
  if (!(tol > 0.0)) {
    throw DomainError("clearing tolerance must be positive");
  }
  const auto investors = population.investors();
  const Probability belief0 = investors.front().belief;
  const bool all_equal = std::all_of(investors.begin(), investors.end(),
                                     [&](const Investor& inv) { return inv.belief == belief0; });
  const Probability mean = mean_belief(population);

  if (all_equal) {
    if (!belief0.interior()) {
      throw NoInteriorClearing("all investors hold the same extreme belief; exposure never changes sign");
    }
    return ClearingResult{belief0, std::vector<double>(investors.size(), 0.0), mean, 0.0, 0.0, true};
  }

  double lo = kPriceBracketLow;
  double hi = kPriceBracketHigh;
  double g_lo = sum_exposures(population, lo);
  double g_hi = sum_exposures(population, hi);
  if (g_lo == 0.0 && g_hi == 0.0) {
    throw NoInteriorClearing("aggregate exposure vanishes on the whole bracket; price undetermined");
  }
  if (g_lo < 0.0 || g_hi > 0.0) {
    throw NoInteriorClearing("aggregate exposure does not change sign on [1e-9, 1-1e-9] (lo: " +
                             std::to_string(g_lo) + ", hi: " + std::to_string(g_hi) + ")");
  }

  // Invariant: g_lo >= 0 >= g_hi.
  double price = 0.0;
  double residual = 0.0;
  if (g_lo == 0.0) {
    price = lo;
  } else if (g_hi == 0.0) {
    price = hi;
  } else {
    for (;;) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) {
        break;
      }
      const double g = sum_exposures(population, mid);
      if (g == 0.0) {
        lo = hi = mid;
        g_lo = g_hi = 0.0;
        break;
      }
      if (g > 0.0) {
        lo = mid;
        g_lo = g;
      } else {
        hi = mid;
        g_hi = g;
      }
    }
    price = (std::abs(g_lo) <= std::abs(g_hi)) ? lo : hi;
  }
  residual = sum_exposures(population, price);
  if (!(std::abs(residual) <= tol)) {
    throw NoInteriorClearing("bisection converged but |residual| = " + std::to_string(residual) +
                             " exceeds tolerance");
  }

  const Probability p(price);
  std::vector<double> exposures;
  exposures.reserve(investors.size());
  for (const Investor& inv : investors) {
    exposures.push_back(signed_exposure(inv, p));
  }
  return ClearingResult{p, std::move(exposures), mean, mean.value() - price, residual, false};
}

double confident_no_capital(Probability q, Probability p) {
  require_interior(p, "price p");
  if (!(q.value() - p.value() >= kPoleGuard)) {
    throw DomainError("confident-no clearing requires belief q > price p");
  }
  return p.complement() / (q.value() - p.value());
}

Probability mean_belief_confident_no(Probability q, Probability p) {
  confident_no_capital(q, p);  // precondition check
  return Probability(std::clamp(p.complement() * q.value() / (q.value() - 2.0 * p.value() + 1.0), 0.0, 1.0));
}

double confident_yes_capital(Probability q, Probability p) {
  require_interior(p, "price p");
  if (!(p.value() - q.value() >= kPoleGuard)) {
    throw DomainError("confident-yes clearing requires belief q < price p");
  }
  return p.complement() / (p.value() - q.value());
}

Probability mean_belief_confident_yes(Probability q, Probability p) {
  const double capital = confident_yes_capital(q, p);
  return Probability(std::clamp((capital * q.value() + 1.0) / (1.0 + capital), 0.0, 1.0));
}

std::vector<double> settlement_pnl(const ClearingResult& result, bool event_occurs) {
  const double p = result.price.value();
  std::vector<double> pnl;
  pnl.reserve(result.exposures.size());
  for (double stake : result.exposures) {
    if (stake >= 0.0) {
      pnl.push_back(event_occurs ? stake * (1.0 - p) / p : -stake);
    } else {
      const double complement_stake = -stake;
      pnl.push_back(event_occurs ? -complement_stake : complement_stake * p / (1.0 - p));
    }
  }
  return pnl;
}

}  // namespace kelly
