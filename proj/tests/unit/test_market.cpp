#include "platonic/instances.hpp"
#include "platonic/market.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace platonic;
using namespace platonic::market;
using prob::Filtration;
using prob::Partition;

namespace {

Rational R(long n, long d = 1) { return ratio(n, d); }

RandomVariable constant_rv(std::size_t n, long v) { return RandomVariable(n, R(v)); }

bool has_invariant(const std::vector<Violation>& vs, const std::string& name) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.invariant == name; });
}

Strategy random_strategy(const MarketModel& m, std::mt19937& rng, Mode mode = Mode::free) {
    Strategy s;
    s.sign_constraint = mode;
    std::size_t j = rng() % m.admissible_sets.size();
    s.asset_set = m.admissible_sets[j];
    for (std::size_t from = 0; from + 1 < m.time_count(); ++from) {
        std::size_t to = std::min(m.time_count() - 1, from + 1 + rng() % 2);
        StrategyLeg leg{from, to, {}};
        Partition part = m.trading_filtrations[j].at(m.grid[from]);
        for (std::size_t a = 0; a < s.asset_set.size(); ++a) {
            RandomVariable h(m.outcome_count());
            for (const auto& block : part.blocks()) {
                long v = static_cast<long>(rng() % 7) - (mode == Mode::free ? 3 : 0);
                for (std::size_t w : block) h[w] = v;
            }
            leg.holdings.push_back(std::move(h));
        }
        s.legs.push_back(std::move(leg));
    }
    return s;
}

// Re-expresses `s` over the larger set `target`, padding with zero holdings.
Strategy lift(const Strategy& s, const AssetSet& target, std::size_t n) {
    Strategy out{target, {}, s.sign_constraint};
    for (const auto& leg : s.legs) {
        StrategyLeg l{leg.from, leg.to, std::vector<RandomVariable>(target.size(), constant_rv(n, 0))};
        for (std::size_t a = 0; a < s.asset_set.size(); ++a) {
            auto pos = std::find(target.begin(), target.end(), s.asset_set[a]) - target.begin();
            l.holdings[static_cast<std::size_t>(pos)] = leg.holdings[a];
        }
        out.legs.push_back(std::move(l));
    }
    return out;
}

std::set<RandomVariable> payoff_set(const std::vector<Generator>& gens) {
    std::set<RandomVariable> out;
    for (const auto& g : gens) out.insert(g.payoff);
    return out;
}

}  // namespace

TEST(Validate, ClassicalMarketIsValid) {
    EXPECT_TRUE(validate(instances::one_period_binomial()).empty());
    EXPECT_TRUE(validate(instances::delayed_binomial()).empty());
    EXPECT_TRUE(validate(instances::two_asset_delayed()).empty());
}

TEST(Validate, PriceVaryingWithinBlock) {
    auto m = instances::delayed_binomial();
    m.prices[0][1][1] = R(3);
    auto vs = validate(m);
    ASSERT_TRUE(has_invariant(vs, "adaptedness"));
    EXPECT_NE(vs.front().detail.find("asset S at t=1/2"), std::string::npos);
}

TEST(Validate, MonotonicityViolation) {
    auto m = instances::two_asset_delayed();
    std::swap(m.trading_filtrations[0], m.trading_filtrations[1]);
    EXPECT_TRUE(has_invariant(validate(m), "monotonicity"));
}

TEST(Validate, ContainmentViolation) {
    auto m = instances::delayed_binomial();
    m.trading_filtrations[0] = Filtration::discrete(4, m.grid);
    EXPECT_TRUE(has_invariant(validate(m), "containment"));
}

TEST(Validate, UnionClosureReportedAndRepaired) {
    auto m = instances::two_asset_delayed();
    m.admissible_sets = {{0}, {1}};
    m.trading_filtrations = {Filtration::trivial(4, m.grid), m.trading_filtrations[1]};
    auto vs = validate(m);
    ASSERT_EQ(vs.size(), 1u);
    EXPECT_EQ(vs[0].invariant, "refining");
    auto closed = close_under_unions(m);
    EXPECT_TRUE(validate(closed).empty());
    EXPECT_EQ(closed.filtration_of({0, 1}), m.trading_filtrations[1]);
}

TEST(Validate, StructuralProblems) {
    auto m = instances::delayed_binomial();
    m.prices[0].pop_back();
    EXPECT_TRUE(has_invariant(validate(m), "structure"));
    EXPECT_THROW(require_valid(m), InvalidModel);
}

TEST(Wealth, Examples) {
    auto m = instances::delayed_binomial();
    Strategy zero{{0}, {{0, 2, {constant_rv(4, 0)}}}, Mode::free};
    for (const auto& x : wealth_process(m, zero)) EXPECT_EQ(x, constant_rv(4, 0));

    Strategy hold{{0}, {{0, 2, {constant_rv(4, 1)}}}, Mode::free};
    auto w = wealth_process(m, hold);
    EXPECT_EQ(w[0], constant_rv(4, 0));
    EXPECT_EQ(w[2], (RandomVariable{R(3), R(0), R(0), R(-3, 4)}));

    // (S_1/2 - S_0) - (S_1 - S_1/2) = (1,1,-1/2,-1/2) - (2,-1,1/2,-1/4).
    Strategy flip{{0}, {{0, 1, {constant_rv(4, 1)}}, {1, 2, {constant_rv(4, -1)}}}, Mode::free};
    EXPECT_EQ(wealth_process(m, flip)[2], (RandomVariable{R(-1), R(2), R(-1), R(-1, 4)}));
}

TEST(Wealth, RejectsNonMeasurableHoldings) {
    auto m = instances::delayed_binomial();
    Strategy peek{{0}, {{1, 2, {RandomVariable{R(1), R(1), R(0), R(0)}}}}, Mode::free};
    EXPECT_THROW(wealth_process(m, peek), StrategyError);
    Strategy shortsale{{0}, {{0, 1, {constant_rv(4, -1)}}}, Mode::long_only};
    EXPECT_THROW(wealth_process(m, shortsale), StrategyError);
    Strategy unknown{{1}, {}, Mode::free};
    EXPECT_THROW(wealth_process(m, unknown), StrategyError);
}

TEST(Generators, Examples) {
    auto m = instances::one_period_binomial();
    m.trading_filtrations[0] = Filtration::trivial(2, m.grid);
    auto gens = enumerate_generators(m, Mode::free);
    ASSERT_EQ(gens.size(), 1u);
    EXPECT_EQ(gens[0].payoff, (RandomVariable{R(1), R(-1, 2)}));

    auto full = instances::delayed_binomial();
    full.trading_filtrations[0] = full.big_filtration;
    EXPECT_EQ(enumerate_generators(full, Mode::free).size(), 3u);

    auto delayed = enumerate_generators(instances::delayed_binomial(), Mode::free);
    EXPECT_EQ(payoff_set(delayed), (std::set<RandomVariable>{{R(1), R(1), R(-1, 2), R(-1, 2)},
                                                             {R(2), R(-1), R(1, 2), R(-1, 4)}}));
}

TEST(Generators, TwoAssetInstanceDeduplicates) {
    auto m = instances::two_asset_delayed();
    auto gens = enumerate_generators(m, Mode::free);
    ASSERT_EQ(gens.size(), 3u);
    // Asset S bets under the larger set repeat the trivial-filtration ones.
    EXPECT_EQ(gens[0].set, 0u);
    EXPECT_EQ(gens[1].set, 0u);
    EXPECT_EQ(gens[2].asset, 1u);
    EXPECT_EQ(gens[2].payoff, (RandomVariable{R(2), R(-1), R(0), R(0)}));
    for (const auto& g : gens) EXPECT_EQ(generator_payoff(m, g), g.payoff);
    auto cone = terminal_cone_description(m, Mode::free);
    EXPECT_EQ(cone.columns.size(), 3u);
    EXPECT_EQ(cone.rank, 3u);
}

TEST(TerminalCone, ConstantPricesGiveNoBets) {
    auto m = instances::delayed_binomial();
    for (auto& x : m.prices[0]) x = constant_rv(4, 2);
    auto cone = terminal_cone_description(m, Mode::free);
    EXPECT_TRUE(cone.columns.empty());
    EXPECT_EQ(cone.rank, 0u);
    EXPECT_NE(cone.description.find("K0 = {0}"), std::string::npos);
}

TEST(Generators, LongOnlyIsSignRestrictedCopy) {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        auto m = instances::random_market(rng);
        auto free = enumerate_generators(m, Mode::free);
        auto longs = enumerate_generators(m, Mode::long_only);
        ASSERT_EQ(free.size(), longs.size());
        for (std::size_t g = 0; g < free.size(); ++g) {
            EXPECT_EQ(free[g].payoff, longs[g].payoff);
            EXPECT_FALSE(free[g].one_sided);
            EXPECT_TRUE(longs[g].one_sided);
        }
    }
}

TEST(RandomMarkets, AreValid) {
    std::mt19937 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        auto m = instances::random_market(rng, {.martingale_prices = trial % 2 == 0});
        auto vs = validate(m);
        EXPECT_TRUE(vs.empty()) << (vs.empty() ? "" : vs.front().detail);
    }
}

TEST(Wealth, TerminalWealthLiesInGeneratorSpan) {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        auto m = instances::random_market(rng);
        auto s = random_strategy(m, rng);
        auto terminal = wealth_process(m, s).back();
        auto cols = payoff_columns(enumerate_generators(m, Mode::free));
        EXPECT_TRUE(linalg::solve_in_span(cols, terminal).has_value());
    }
}

TEST(Wealth, AdditiveAcrossAdmissibleSets) {
    std::mt19937 rng(4);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 50; ++trial) {
        auto m = instances::random_market(rng, {.family_probability = 1.0});
        if (m.admissible_sets.size() < 2) continue;
        auto s1 = random_strategy(m, rng);
        auto s2 = random_strategy(m, rng);
        AssetSet u = set_union(s1.asset_set, s2.asset_set);
        ASSERT_TRUE(m.set_index(u));
        Strategy a = lift(s1, u, m.outcome_count()), b = lift(s2, u, m.outcome_count());
        Strategy both{u, a.legs, Mode::free};
        both.legs.insert(both.legs.end(), b.legs.begin(), b.legs.end());
        auto w1 = wealth_process(m, s1), w2 = wealth_process(m, s2), w = wealth_process(m, both);
        for (std::size_t k = 0; k < m.time_count(); ++k)
            for (std::size_t x = 0; x < m.outcome_count(); ++x) EXPECT_EQ(w1[k][x] + w2[k][x], w[k][x]);
        ++checked;
    }
    EXPECT_EQ(checked, 50);
}

TEST(Generators, InvariantUnderRedundantGridTimes) {
    std::mt19937 rng(8);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto m = instances::random_market(rng);
        auto gap = std::adjacent_find(m.grid.begin(), m.grid.end(),
                                      [](const Rational& a, const Rational& b) { return b - a > ratio(1, 4); });
        if (gap == m.grid.end()) continue;
        std::size_t k = static_cast<std::size_t>(gap - m.grid.begin());
        Rational mid = (m.grid[k] + m.grid[k + 1]) / 2;
        auto refined = m;
        refined.grid.insert(refined.grid.begin() + static_cast<long>(k) + 1, mid);
        for (auto& path : refined.prices) path.insert(path.begin() + static_cast<long>(k) + 1, path[k]);
        ASSERT_TRUE(validate(refined).empty());
        EXPECT_EQ(payoff_set(enumerate_generators(m, Mode::free)),
                  payoff_set(enumerate_generators(refined, Mode::free)));
        ++checked;
    }
    EXPECT_GT(checked, 10);
}

TEST(Generators, CoefficientsRebuildAStrategy) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        auto m = instances::random_market(rng);
        auto gens = enumerate_generators(m, Mode::free);
        std::vector<Rational> lambda;
        for (std::size_t g = 0; g < gens.size(); ++g) lambda.push_back(R(static_cast<long>(rng() % 7) - 3, 2));
        auto s = strategy_from_coefficients(m, gens, lambda);
        EXPECT_EQ(wealth_process(m, s).back(), combine(payoff_columns(gens), lambda, m.outcome_count()));
    }
}
