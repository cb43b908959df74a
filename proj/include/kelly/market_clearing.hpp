#pragma once

#include <span>
#include <vector>

#include "kelly/types.hpp"

namespace kelly {

struct Investor {
  Investor(double capital, Probability belief);

  double capital;
  Probability belief;
};

/// Non-empty, ordered set of log-utility investors.
class MarketPopulation {
 public:
  explicit MarketPopulation(std::vector<Investor> investors);

  std::span<const Investor> investors() const noexcept { return investors_; }
  std::size_t size() const noexcept { return investors_.size(); }
  double total_capital() const noexcept { return total_capital_; }

  /// Same beliefs with every capital multiplied by factor.
  MarketPopulation scaled(double factor) const;

 private:
  std::vector<Investor> investors_;
  double total_capital_ = 0.0;
};

struct ClearingResult {
  Probability price;
  std::vector<double> exposures;  // dollars, one per investor, signed
  Probability mean_belief;
  double gap;       // mean_belief - price
  double residual;  // aggregate exposure at price
  bool degenerate;  // all beliefs equal: zero-volume fixed point
};

inline constexpr double kDefaultClearingTolerance = 1e-9;
inline constexpr double kPriceBracketLow = 1e-9;
inline constexpr double kPriceBracketHigh = 1.0 - 1e-9;

/// capital * optimal_fraction(belief, p), in dollars.
double signed_exposure(const Investor& investor, Probability p);

/// Sum of signed exposures; non-increasing in p.
double aggregate_exposure(const MarketPopulation& population, Probability p);

/// Capital-weighted average belief.
Probability mean_belief(const MarketPopulation& population);

/// Solves aggregate_exposure(p) = 0 by bisection on
/// [kPriceBracketLow, kPriceBracketHigh]. The bracket is halved until no
/// further floating-point progress is possible, then |residual| <= tol is
/// enforced. Throws NoInteriorClearing when the aggregate does not change
/// sign on the bracket or vanishes identically.
ClearingResult clearing_price(const MarketPopulation& population,
                              double tol = kDefaultClearingTolerance);

/// Capital at belief q that clears against one dollar held by an investor
/// certain the event will not happen: (1-p)/(q-p). Requires p < q.
double confident_no_capital(Probability q, Probability p);

/// Mean belief of {(confident_no_capital(q,p), q), (1, 0)}:
/// (1-p) q / (q - 2p + 1).
Probability mean_belief_confident_no(Probability q, Probability p);

/// Capital at belief q that clears against one dollar held by an investor
/// certain the event will happen: (1-p)/(p-q). Requires q < p.
double confident_yes_capital(Probability q, Probability p);

/// Mean belief of {(confident_yes_capital(q,p), q), (1, 1)}, which is p.
Probability mean_belief_confident_yes(Probability q, Probability p);

/// Per-investor profit and loss when the contract resolves, using the real
/// contract payoffs: a long stake x at price p returns x(1-p)/p or loses x;
/// a complement stake y at price 1-p returns y p/(1-p) or loses y.
std::vector<double> settlement_pnl(const ClearingResult& result, bool event_occurs);

}  // namespace kelly
