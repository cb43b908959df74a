#pragma once

#include "kelly/types.hpp"

namespace kelly {

/// Expected log growth of a bettor with belief q holding fraction f of
/// capital in an all-or-nothing contract priced at p.
///
/// For f >= 0 the investor is long the event contract:
///   (1-q) log(1-f) + q log(1 + f (1-p)/p)
/// For f < 0 the investor is long the complement contract (price 1-p, belief
/// 1-q) with stake -f, so the mirror utility U(1-q, 1-p, -f) is returned.
/// A term with zero weight contributes nothing even when its log argument is
/// zero; a weighted term with a non-positive argument is rejected.
double log_utility(Probability q, Probability p, BetFraction f);

/// Log utility for the alpha-modified payout, where a winning unit stake pays
/// ((1-p)/p)^alpha. Long side only (f >= 0).
double log_utility_alpha(Probability q, Probability p, BetFraction f, PayoutSpec spec);

/// Kelly-optimal signed fraction. When q >= p this is q - p(1-q)/(1-p);
/// otherwise the complement contract is bought and the returned fraction is
/// -[(1-q) - (1-p)q/p].
BetFraction optimal_fraction(Probability q, Probability p);

/// The long-side closed form written in odds, (Q - P)/(1 + Q). Requires q < 1.
double optimal_fraction_odds_form(Probability q, Probability p);

/// Kelly-optimal long fraction under the alpha payout,
/// q - (1-q) (p/(1-p))^alpha clamped at 0.
BetFraction optimal_fraction_alpha(Probability q, Probability p, PayoutSpec spec);

/// Growth rate p log(1+f) + (1-p) log(1-f) of the even-odds game.
double even_odds_growth_rate(Probability p, BetFraction f);

}  // namespace kelly
