#pragma once

#include "platonic/market.hpp"

#include <random>

// Small named markets and a random market generator.
namespace platonic::instances {

/// Outcomes up, down; S_0 = 1, S_1 in {2, 1/2}; F = G; P uniform.
market::MarketModel one_period_binomial();

/**
 * Two-period binomial on outcomes uu, ud, du, dd with grid 0, 1/2, 1 and
 * prices 1; (2, 2, 1/2, 1/2); (4, 1, 1, 1/4). G is the natural filtration,
 * F is G delayed by 1/2. P uniform.
 */
market::MarketModel delayed_binomial();

/**
 * delayed_binomial plus a second asset equal to 1 until 1/2 and (3, 0, 1, 1)
 * at 1. Admissible sets {1} (trivial filtration) and {1, 2} (G delayed by
 * 1/2). Complete, with martingale measure (1/9, 2/9, 2/9, 4/9).
 */
market::MarketModel two_asset_delayed();

/// The one-period binomial with S_1 = S_0 + 1 in both states.
market::MarketModel riskless_gain();

struct RandomMarketOptions {
    std::size_t min_outcomes = 2;
    std::size_t max_outcomes = 8;
    std::size_t max_assets = 3;
    std::size_t max_times = 4;
    /// Build prices as martingales of a random full-support measure under G,
    /// which rules out arbitrage for every trading filtration.
    bool martingale_prices = false;
    /// Chance that a random family of admissible sets is used instead of the
    /// single set of all assets.
    double family_probability = 0.5;
};

/// Random valid model: G by successive random refinements, per-asset trading
/// filtrations by random coarsenings of G, F^A the join over A, integer price
/// increments and a union-closed admissible family.
market::MarketModel random_market(std::mt19937& rng, const RandomMarketOptions& options = {});

/// Random claim with small integer values.
prob::RandomVariable random_claim(std::mt19937& rng, std::size_t outcome_count, int magnitude = 4);

/// Random strictly positive probability vector with small integer weights.
std::vector<Rational> random_full_support(std::mt19937& rng, std::size_t outcome_count);

/// Copy of `model` with reference probabilities replaced by `probs`.
market::MarketModel with_reference(market::MarketModel model, std::vector<Rational> probs);

}  // namespace platonic::instances
