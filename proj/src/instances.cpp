#include "platonic/instances.hpp"

#include <algorithm>
#include <set>

namespace platonic::instances {

using market::AssetSet;
using market::MarketModel;
using prob::Filtration;
using prob::FiniteSpace;
using prob::Partition;
using prob::RandomVariable;

namespace {

Rational R(long n, long d = 1) { return ratio(n, d); }

Partition refine_randomly(const Partition& coarse, std::mt19937& rng) {
    std::vector<Partition::Block> blocks;
    for (const auto& block : coarse.blocks()) {
        std::size_t k = 1 + rng() % block.size();
        std::vector<Partition::Block> split(k);
        for (std::size_t i = 0; i < block.size(); ++i) split[i < k ? i : rng() % k].push_back(block[i]);
        for (auto& b : split) blocks.push_back(std::move(b));
    }
    return Partition(coarse.outcome_count(), std::move(blocks));
}

Partition coarsen_randomly(const Partition& fine, std::mt19937& rng) {
    std::size_t groups = 1 + rng() % fine.block_count();
    std::vector<Partition::Block> merged(groups);
    for (std::size_t b = 0; b < fine.block_count(); ++b) {
        auto& target = merged[b < groups ? b : rng() % groups];
        target.insert(target.end(), fine.block(b).begin(), fine.block(b).end());
    }
    return Partition(fine.outcome_count(), std::move(merged));
}

Filtration random_sub_filtration(const Filtration& big, std::mt19937& rng) {
    switch (rng() % 4) {
    case 0: return big;
    case 1: return prob::delayed_filtration(big, R(1 + static_cast<long>(rng() % 2), 4));
    case 2: return Filtration::trivial(big.outcome_count(), big.times());
    default: break;
    }
    std::vector<Partition> parts(big.times().size(), Partition::trivial(big.outcome_count()));
    for (std::size_t k = parts.size(); k-- > 0;) {
        parts[k] = coarsen_randomly(big.partitions()[k], rng);
        if (k + 1 < parts.size()) parts[k] = prob::meet(parts[k], parts[k + 1]);
    }
    return Filtration(big.times(), std::move(parts));
}

std::vector<std::string> labels(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t w = 0; w < n; ++w) out.push_back("w" + std::to_string(w));
    return out;
}

}  // namespace

MarketModel one_period_binomial() {
    std::vector<Rational> grid{R(0), R(1)};
    return MarketModel{FiniteSpace::uniform({"up", "down"}),
                       grid,
                       Filtration(grid, {Partition::trivial(2), Partition::discrete(2)}),
                       {"S"},
                       {{{R(1), R(1)}, {R(2), R(1, 2)}}},
                       {{0}},
                       {Filtration(grid, {Partition::trivial(2), Partition::discrete(2)})}};
}

MarketModel riskless_gain() {
    auto m = one_period_binomial();
    m.prices[0][1] = {R(2), R(2)};
    return m;
}

MarketModel delayed_binomial() {
    std::vector<Rational> grid{R(0), R(1, 2), R(1)};
    Filtration g(grid, {Partition::trivial(4), Partition(4, {{0, 1}, {2, 3}}), Partition::discrete(4)});
    return MarketModel{FiniteSpace::uniform({"uu", "ud", "du", "dd"}),
                       grid,
                       g,
                       {"S"},
                       {{{R(1), R(1), R(1), R(1)}, {R(2), R(2), R(1, 2), R(1, 2)}, {R(4), R(1), R(1), R(1, 4)}}},
                       {{0}},
                       {prob::delayed_filtration(g, R(1, 2))}};
}

MarketModel two_asset_delayed() {
    auto m = delayed_binomial();
    m.assets.push_back("T");
    m.prices.push_back({{R(1), R(1), R(1), R(1)}, {R(1), R(1), R(1), R(1)}, {R(3), R(0), R(1), R(1)}});
    Filtration delayed = m.trading_filtrations[0];
    m.admissible_sets = {{0}, {0, 1}};
    m.trading_filtrations = {Filtration::trivial(4, m.grid), delayed};
    return m;
}

std::vector<Rational> random_full_support(std::mt19937& rng, std::size_t n) {
    std::vector<Rational> q;
    Rational total = 0;
    for (std::size_t w = 0; w < n; ++w) {
        q.emplace_back(static_cast<long>(1 + rng() % 5));
        total += q.back();
    }
    for (auto& v : q) v /= total;
    return q;
}

RandomVariable random_claim(std::mt19937& rng, std::size_t n, int magnitude) {
    RandomVariable f;
    for (std::size_t w = 0; w < n; ++w)
        f.emplace_back(static_cast<long>(rng() % static_cast<unsigned>(2 * magnitude + 1)) - magnitude);
    return f;
}

MarketModel with_reference(MarketModel model, std::vector<Rational> probs) {
    model.space = FiniteSpace(model.space.outcomes(), std::move(probs));
    return model;
}

MarketModel random_market(std::mt19937& rng, const RandomMarketOptions& options) {
    const std::size_t n = options.min_outcomes + rng() % (options.max_outcomes - options.min_outcomes + 1);
    const std::size_t time_count = 2 + rng() % (options.max_times - 1);
    const std::size_t asset_count = 1 + rng() % options.max_assets;

    std::vector<Rational> candidates{R(0), R(1, 4), R(1, 2), R(3, 4), R(1)};
    std::shuffle(candidates.begin(), candidates.end(), rng);
    std::vector<Rational> grid(candidates.begin(), candidates.begin() + static_cast<long>(time_count));
    std::sort(grid.begin(), grid.end());

    std::vector<Partition> g_parts{Partition::trivial(n)};
    for (std::size_t k = 1; k < time_count; ++k) g_parts.push_back(refine_randomly(g_parts.back(), rng));
    if (rng() % 2) g_parts.back() = Partition::discrete(n);
    Filtration big(grid, g_parts);

    MarketModel m{FiniteSpace::uniform(labels(n)), grid, big, {}, {}, {}, {}};
    auto q = random_full_support(rng, n);
    std::vector<Filtration> per_asset;
    for (std::size_t i = 0; i < asset_count; ++i) {
        m.assets.push_back("S" + std::to_string(i + 1));
        std::vector<RandomVariable> path(time_count, RandomVariable(n));
        if (options.martingale_prices) {
            RandomVariable terminal(n);
            for (const auto& block : g_parts.back().blocks()) {
                Rational v(static_cast<long>(rng() % 7));
                for (std::size_t w : block) terminal[w] = v;
            }
            for (std::size_t k = 0; k < time_count; ++k) path[k] = prob::conditional_expectation(terminal, g_parts[k], q);
        } else {
            for (const auto& block : g_parts[0].blocks()) {
                Rational v(static_cast<long>(1 + rng() % 5));
                for (std::size_t w : block) path[0][w] = v;
            }
            for (std::size_t k = 1; k < time_count; ++k)
                for (const auto& block : g_parts[k].blocks()) {
                    Rational v = path[k - 1][block.front()] + static_cast<long>(rng() % 5) - 2;
                    for (std::size_t w : block) path[k][w] = v;
                }
        }
        m.prices.push_back(std::move(path));
        per_asset.push_back(random_sub_filtration(big, rng));
    }

    std::set<AssetSet> family;
    if (std::uniform_real_distribution<double>(0, 1)(rng) < options.family_probability) {
        std::size_t picks = 1 + rng() % 3;
        for (std::size_t p = 0; p < picks; ++p) {
            AssetSet s;
            for (std::size_t i = 0; i < asset_count; ++i)
                if (rng() % 2) s.push_back(i);
            if (s.empty()) s.push_back(rng() % asset_count);
            family.insert(s);
        }
        bool grown = true;
        while (grown) {
            grown = false;
            for (const auto& a : std::vector<AssetSet>(family.begin(), family.end()))
                for (const auto& b : std::vector<AssetSet>(family.begin(), family.end()))
                    grown |= family.insert(market::set_union(a, b)).second;
        }
    } else {
        AssetSet all(asset_count);
        for (std::size_t i = 0; i < asset_count; ++i) all[i] = i;
        family.insert(all);
    }
    for (const auto& s : family) {
        Filtration f = per_asset[s.front()];
        for (std::size_t i : s) f = prob::join(f, per_asset[i]);
        m.admissible_sets.push_back(s);
        m.trading_filtrations.push_back(std::move(f));
    }
    return m;
}

}  // namespace platonic::instances
