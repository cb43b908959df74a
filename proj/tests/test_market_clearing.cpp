#include <doctest.h>

#include <cmath>
#include <random>

#include "kelly/market_clearing.hpp"

using namespace kelly;

namespace {

Probability P(double x) { return Probability(x); }

MarketPopulation population(std::initializer_list<std::pair<double, double>> rows) {
  std::vector<Investor> investors;
  for (const auto& [capital, belief] : rows) investors.emplace_back(capital, P(belief));
  return MarketPopulation(std::move(investors));
}

MarketPopulation random_population(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 50);
  std::uniform_real_distribution<double> capital(0.01, 100.0);
  std::uniform_real_distribution<double> belief(0.01, 0.99);
  std::vector<Investor> investors;
  const int n = size(rng);
  for (int i = 0; i < n; ++i) investors.emplace_back(capital(rng), P(belief(rng)));
  return MarketPopulation(std::move(investors));
}

}  // namespace

TEST_CASE("investor and population invariants") {
  CHECK_THROWS_AS(Investor(0.0, P(0.5)), DomainError);
  CHECK_THROWS_AS(Investor(-1.0, P(0.5)), DomainError);
  CHECK_THROWS_AS(MarketPopulation({}), DomainError);
  const auto pop = population({{2, 0.1}, {3, 0.9}});
  CHECK(pop.total_capital() == 5.0);
  CHECK(pop.scaled(7).total_capital() == 35.0);
}

TEST_CASE("signed_exposure") {
  for (double p : {0.1, 0.4, 0.6, 0.95}) {
    CHECK(signed_exposure(Investor(1, P(0.0)), P(p)) == -1.0);
    CHECK(signed_exposure(Investor(1, P(1.0)), P(p)) == 1.0);
    CHECK(signed_exposure(Investor(5, P(p)), P(p)) == 0.0);
  }
  CHECK(signed_exposure(Investor(4, P(0.7)), P(0.6)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(signed_exposure(Investor(1, P(0.5)), P(0.0)), DomainError);
}

TEST_CASE("aggregate_exposure") {
  const auto single = population({{2, 0.3}});
  CHECK(aggregate_exposure(single, P(0.2)) > 0.0);
  CHECK(aggregate_exposure(single, P(0.5)) < 0.0);
  CHECK(aggregate_exposure(population({{1, 0.3}, {1, 0.7}}), P(0.5)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(aggregate_exposure(population({{3, 0.6}, {1, 0.0}}), P(0.4))) < 1e-15);
}

TEST_CASE("aggregate_exposure is non-increasing in price") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pop = random_population(rng);
    double previous = aggregate_exposure(pop, P(0.001));
    for (int i = 2; i < 1000; ++i) {
      const double now = aggregate_exposure(pop, P(i / 1000.0));
      CHECK(now <= previous + 1e-12);
      previous = now;
    }
  }
}

TEST_CASE("mean_belief") {
  CHECK(mean_belief(population({{4, 0.37}})).value() == doctest::Approx(0.37));
  CHECK(mean_belief(population({{3, 0.6}, {1, 0.0}})).value() == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(mean_belief(population({{2, 0.0}, {2, 1.0}})).value() == 0.5);
}

TEST_CASE("clearing_price examples") {
  SUBCASE("shared belief is a zero-volume fixed point") {
    const auto r = clearing_price(population({{1, 0.3}, {5, 0.3}, {2, 0.3}}));
    CHECK(r.price.value() == 0.3);
    CHECK(r.degenerate);
    for (double e : r.exposures) CHECK(e == 0.0);
    CHECK(r.gap == 0.0);
  }

  SUBCASE("confident-no construction recovers p") {
    const auto r = clearing_price(population({{1, 0.0}, {3, 0.6}}));
    CHECK(std::abs(r.price.value() - 0.4) < 1e-9);
    CHECK(r.mean_belief.value() == doctest::Approx(0.45));
    CHECK(r.gap == doctest::Approx(0.05));
    CHECK(std::abs(r.residual) <= kDefaultClearingTolerance);
  }

  SUBCASE("uniform capital scaling leaves the price unchanged") {
    const auto pop = population({{1, 0.0}, {3, 0.6}, {2.5, 0.35}});
    const double base = clearing_price(pop).price.value();
    CHECK(std::abs(clearing_price(pop.scaled(7)).price.value() - base) <= 1e-12);
  }

  SUBCASE("degenerate extreme populations have no interior price") {
    CHECK_THROWS_AS(clearing_price(population({{1, 0.0}, {2, 0.0}})), NoInteriorClearing);
    CHECK_THROWS_AS(clearing_price(population({{1, 1.0}})), NoInteriorClearing);
    CHECK_THROWS_AS(clearing_price(population({{1, 0.0}, {1, 1.0}})), NoInteriorClearing);
  }

  SUBCASE("tolerance must be positive") {
    CHECK_THROWS_AS(clearing_price(population({{1, 0.2}, {1, 0.8}}), 0.0), DomainError);
  }
}

TEST_CASE("clearing residual and invariants on random populations") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pop = random_population(rng);
    const auto r = clearing_price(pop);
    CHECK(std::abs(r.residual) < 1e-9);
    CHECK(std::abs(aggregate_exposure(pop, r.price) - r.residual) < 1e-12);
    CHECK(r.gap == doctest::Approx(r.mean_belief.value() - r.price.value()));
    double sum = 0.0;
    for (double e : r.exposures) sum += e;
    CHECK(std::abs(sum - r.residual) < 1e-9);
    for (double lambda : {0.1, 7.0, 1000.0}) {
      CHECK(std::abs(clearing_price(pop.scaled(lambda)).price.value() - r.price.value()) <= 1e-12);
    }
  }
}

TEST_CASE("extreme beliefs with a tiny imbalance have no interior clearing") {
  // One part in a million more capital on "yes" than on "no".
  const auto pop = population({{1.0 + 1e-6, 1.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(clearing_price(pop), NoInteriorClearing);
  CHECK(std::abs(mean_belief(pop).value() - 0.5) <= 1e-6 / 2);
  CHECK(aggregate_exposure(pop, P(kPriceBracketHigh)) > 0.0);
}

TEST_CASE("confident-no closed forms") {
  CHECK(confident_no_capital(P(0.6), P(0.4)) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(confident_no_capital(P(1.0), P(0.3)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(confident_no_capital(P(0.4), P(0.4)), DomainError);
  CHECK_THROWS_AS(confident_no_capital(P(0.3), P(0.4)), DomainError);
  CHECK_THROWS_AS(confident_no_capital(P(0.4 + 1e-13), P(0.4)), DomainError);

  CHECK(mean_belief_confident_no(P(0.6), P(0.4)).value() == doctest::Approx(0.45).epsilon(1e-14));
  CHECK(mean_belief_confident_no(P(1.0), P(0.5)).value() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mean_belief_confident_no(P(0.9), P(0.1)).value() == doctest::Approx(0.81 / 1.7).epsilon(1e-14));

  for (int j = 1; j < 20; ++j) {
    const double p = j / 20.0;
    for (int i = 1; i <= 40; ++i) {
      const double q = p + (1.0 - p) * i / 40.0;
      const double e = mean_belief_confident_no(P(q), P(p)).value();
      const double c = confident_no_capital(P(q), P(p));
      CHECK(std::abs(e - mean_belief(population({{c, q}, {1, 0.0}})).value()) < 1e-12);
      if (p < 0.5) CHECK((e >= 0.0 && e <= 0.5));
      if (p > 0.5) CHECK((e >= 0.5 && e <= 1.0));
      if (p == 0.5) CHECK(e == doctest::Approx(0.5).epsilon(1e-15));
    }
  }
}

TEST_CASE("confident-no mean belief: attainable range") {
  // At fixed p the image over q in (p, 1] is (p, 1/2] for p < 1/2 and
  // [1/2, p) for p > 1/2; the union over p fills [0, 1/2] and [1/2, 1].
  for (double p : {0.1, 0.3, 0.49, 0.51, 0.9}) {
    const double near = mean_belief_confident_no(P(p + 1e-9), P(p)).value();
    const double at_one = mean_belief_confident_no(P(1.0), P(p)).value();
    CHECK(std::abs(near - p) < 1e-6);
    CHECK(std::abs(at_one - 0.5) < 1e-12);
  }
  CHECK(mean_belief_confident_no(P(1e-6 + 1e-9), P(1e-6)).value() < 1e-5);
  CHECK(mean_belief_confident_no(P(1.0 - 1e-6 + 1e-11), P(1.0 - 1e-6)).value() > 1.0 - 1e-4);
}

TEST_CASE("confident-yes closed forms") {
  CHECK(confident_yes_capital(P(0.2), P(0.6)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(confident_yes_capital(P(0.0), P(0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(confident_yes_capital(P(0.6), P(0.6)), DomainError);
  CHECK_THROWS_AS(confident_yes_capital(P(0.6 - 1e-13), P(0.6)), DomainError);

  CHECK(mean_belief_confident_yes(P(0.2), P(0.6)).value() == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(mean_belief_confident_yes(P(0.4), P(0.5)).value() == doctest::Approx(0.5).epsilon(1e-14));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double p = 0.01 + 0.98 * u(rng);
    const double q = p * u(rng) * 0.999;
    const double e = mean_belief_confident_yes(P(q), P(p)).value();
    CHECK(std::abs(e - p) < 1e-12);
    const double c = confident_yes_capital(P(q), P(p));
    CHECK(std::abs(e - mean_belief(population({{c, q}, {1, 1.0}})).value()) < 1e-12);
  }
}

TEST_CASE("confident-yes construction does not clear under the two-contract convention") {
  // The complement-side fraction is -(p-q)/p, so against one dollar of
  // certain "yes" capital the aggregate is 1 - C (p'-q)/p' > 0 when C <= 1.
  const auto pop = population({{confident_yes_capital(P(0.2), P(0.6)), 0.2}, {1, 1.0}});
  CHECK_THROWS_AS(clearing_price(pop), NoInteriorClearing);
}

TEST_CASE("settlement at the clearing price") {
  // Dollar-denominated clearing balances stakes, not contracts; with real
  // payoffs the net P&L is V (1-2p)/p on the event and V (2p-1)/(1-p)
  // otherwise, where V is the dollar volume on each side.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pop = random_population(rng);
    if (pop.size() < 2) continue;
    const auto r = clearing_price(pop);
    double volume = 0.0;
    for (double e : r.exposures) {
      if (e > 0) volume += e;
    }
    const double p = r.price.value();
    double net_event = 0.0;
    double net_no_event = 0.0;
    for (double x : settlement_pnl(r, true)) net_event += x;
    for (double x : settlement_pnl(r, false)) net_no_event += x;
    CHECK(net_event == doctest::Approx(volume * (1 - 2 * p) / p).epsilon(1e-9).scale(volume));
    CHECK(net_no_event == doctest::Approx(volume * (2 * p - 1) / (1 - p)).epsilon(1e-9).scale(volume));
  }
  // Balanced at even odds.
  const auto even = clearing_price(population({{1, 0.3}, {1, 0.7}}));
  double net = 0.0;
  for (double x : settlement_pnl(even, true)) net += x;
  CHECK(std::abs(net) < 1e-9);
}
