#include "platonic/market.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace platonic::market {

namespace {

std::string set_name(const AssetSet& set, const std::vector<std::string>& assets) {
    std::string out = "{";
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (k) out += ",";
        out += set[k] < assets.size() ? assets[set[k]] : "#" + std::to_string(set[k]);
    }
    return out + "}";
}

std::string block_name(const Partition::Block& block, const FiniteSpace& space) {
    std::string out = "{";
    for (std::size_t k = 0; k < block.size(); ++k) {
        if (k) out += ",";
        out += space.outcomes()[block[k]];
    }
    return out + "}";
}

// First block of `coarse_expected` that `fine` splits, for diagnostics.
std::string first_unrefined(const Partition& fine, const Partition& coarse, const FiniteSpace& space) {
    for (const auto& block : fine.blocks()) {
        std::size_t target = coarse.block_of(block.front());
        for (std::size_t w : block)
            if (coarse.block_of(w) != target) return block_name(block, space);
    }
    return "{}";
}

bool structurally_sound(const MarketModel& m, std::vector<Violation>& out) {
    const std::size_t before = out.size();
    const std::size_t n = m.outcome_count();
    if (m.grid.empty()) out.push_back({"structure", "empty time grid"});
    for (std::size_t k = 0; k < m.grid.size(); ++k) {
        if (m.grid[k] < 0 || m.grid[k] > 1)
            out.push_back({"structure", "grid time " + to_string(m.grid[k]) + " outside [0,1]"});
        if (k && m.grid[k] <= m.grid[k - 1]) out.push_back({"structure", "grid times not strictly increasing"});
    }
    if (m.big_filtration.outcome_count() != n)
        out.push_back({"structure", "big filtration has wrong outcome count"});
    if (m.prices.size() != m.assets.size())
        out.push_back({"structure", std::to_string(m.assets.size()) + " assets but " +
                                        std::to_string(m.prices.size()) + " price processes"});
    for (std::size_t i = 0; i < m.prices.size(); ++i) {
        std::string name = i < m.assets.size() ? m.assets[i] : "#" + std::to_string(i);
        if (m.prices[i].size() != m.grid.size())
            out.push_back({"structure", "asset " + name + " has " + std::to_string(m.prices[i].size()) +
                                            " prices for " + std::to_string(m.grid.size()) + " grid times"});
        for (const auto& x : m.prices[i])
            if (x.size() != n) out.push_back({"structure", "asset " + name + " has a price of wrong length"});
    }
    if (m.admissible_sets.size() != m.trading_filtrations.size())
        out.push_back({"structure", "one trading filtration per admissible set required"});
    std::set<AssetSet> seen;
    for (const auto& set : m.admissible_sets) {
        if (set.empty()) out.push_back({"structure", "empty admissible set"});
        if (!std::is_sorted(set.begin(), set.end()) || std::adjacent_find(set.begin(), set.end()) != set.end())
            out.push_back({"structure", "admissible set " + set_name(set, m.assets) + " not sorted and unique"});
        for (std::size_t i : set)
            if (i >= m.assets.size())
                out.push_back({"structure", "admissible set refers to unknown asset #" + std::to_string(i)});
        if (!seen.insert(set).second)
            out.push_back({"structure", "admissible set " + set_name(set, m.assets) + " listed twice"});
    }
    for (const auto& f : m.trading_filtrations)
        if (f.outcome_count() != n) out.push_back({"structure", "trading filtration has wrong outcome count"});
    return out.size() == before;
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::free ? "free" : "long_only"; }

std::optional<std::size_t> MarketModel::set_index(const AssetSet& set) const {
    auto it = std::find(admissible_sets.begin(), admissible_sets.end(), set);
    if (it == admissible_sets.end()) return std::nullopt;
    return static_cast<std::size_t>(it - admissible_sets.begin());
}

const Filtration& MarketModel::filtration_of(const AssetSet& set) const {
    auto j = set_index(set);
    if (!j) throw std::out_of_range("asset set " + set_name(set, assets) + " is not admissible");
    return trading_filtrations.at(*j);
}

std::size_t MarketModel::grid_index(const Rational& t) const {
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end() || *it != t) throw std::out_of_range("time " + to_string(t) + " is not a grid time");
    return static_cast<std::size_t>(it - grid.begin());
}

std::size_t MarketModel::asset_index(const std::string& name) const {
    auto it = std::find(assets.begin(), assets.end(), name);
    if (it == assets.end()) throw std::out_of_range("unknown asset '" + name + "'");
    return static_cast<std::size_t>(it - assets.begin());
}

AssetSet set_union(const AssetSet& a, const AssetSet& b) {
    AssetSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool is_subset(const AssetSet& small, const AssetSet& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::vector<Violation> validate(const MarketModel& m) {
    std::vector<Violation> out;
    if (!structurally_sound(m, out)) return out;

    for (std::size_t i = 0; i < m.assets.size(); ++i)
        for (std::size_t k = 0; k < m.grid.size(); ++k) {
            Partition g = m.big_filtration.at(m.grid[k]);
            for (const auto& block : g.blocks()) {
                const auto& x = m.prices[i][k];
                bool constant = std::all_of(block.begin(), block.end(), [&](std::size_t w) { return x[w] == x[block.front()]; });
                if (!constant)
                    out.push_back({"adaptedness", "asset " + m.assets[i] + " at t=" + to_string(m.grid[k]) +
                                                      " varies on block " + block_name(block, m.space)});
            }
        }

    for (std::size_t j = 0; j < m.admissible_sets.size(); ++j) {
        const auto& f = m.trading_filtrations[j];
        for (std::size_t k = 0; k < f.times().size(); ++k) {
            Partition g = m.big_filtration.at(f.times()[k]);
            if (!prob::refines(g, f.partitions()[k]))
                out.push_back({"containment", "F^" + set_name(m.admissible_sets[j], m.assets) + " at t=" +
                                                  to_string(f.times()[k]) + " is not contained in G; G-block " +
                                                  first_unrefined(g, f.partitions()[k], m.space) + " is split"});
        }
    }

    for (std::size_t a = 0; a < m.admissible_sets.size(); ++a)
        for (std::size_t b = 0; b < m.admissible_sets.size(); ++b) {
            if (a == b || !is_subset(m.admissible_sets[a], m.admissible_sets[b])) continue;
            const auto& small = m.trading_filtrations[a];
            const auto& big = m.trading_filtrations[b];
            for (std::size_t k = 0; k < small.times().size(); ++k) {
                Partition fine = big.at(small.times()[k]);
                if (!prob::refines(fine, small.partitions()[k])) {
                    out.push_back({"monotonicity", set_name(m.admissible_sets[a], m.assets) + " is a subset of " +
                                                       set_name(m.admissible_sets[b], m.assets) + " but at t=" +
                                                       to_string(small.times()[k]) + " its filtration is finer on " +
                                                       first_unrefined(fine, small.partitions()[k], m.space)});
                    break;
                }
            }
        }

    for (std::size_t a = 0; a < m.admissible_sets.size(); ++a)
        for (std::size_t b = a + 1; b < m.admissible_sets.size(); ++b) {
            AssetSet u = set_union(m.admissible_sets[a], m.admissible_sets[b]);
            if (!m.set_index(u))
                out.push_back({"refining", "union " + set_name(u, m.assets) + " of " +
                                               set_name(m.admissible_sets[a], m.assets) + " and " +
                                               set_name(m.admissible_sets[b], m.assets) +
                                               " is not admissible; supply its filtration or close under unions"});
        }
    return out;
}

InvalidModel::InvalidModel(std::vector<Violation> violations)
    : std::invalid_argument([&] {
          std::string msg = "invalid market model:";
          for (const auto& v : violations) msg += "\n  " + v.invariant + ": " + v.detail;
          return msg;
      }()),
      violations_(std::move(violations)) {}

void require_valid(const MarketModel& model) {
    auto violations = validate(model);
    if (!violations.empty()) throw InvalidModel(std::move(violations));
}

MarketModel close_under_unions(MarketModel model) {
    bool grown = true;
    while (grown) {
        grown = false;
        const std::size_t count = model.admissible_sets.size();
        for (std::size_t a = 0; a < count; ++a)
            for (std::size_t b = a + 1; b < count; ++b) {
                AssetSet u = set_union(model.admissible_sets[a], model.admissible_sets[b]);
                if (model.set_index(u)) continue;
                // Join over every existing subset keeps monotonicity intact.
                std::optional<Filtration> f;
                for (std::size_t c = 0; c < model.admissible_sets.size(); ++c)
                    if (is_subset(model.admissible_sets[c], u))
                        f = f ? prob::join(*f, model.trading_filtrations[c]) : model.trading_filtrations[c];
                model.admissible_sets.push_back(std::move(u));
                model.trading_filtrations.push_back(std::move(*f));
                grown = true;
            }
    }
    return model;
}

void check_strategy(const MarketModel& model, const Strategy& s) {
    auto j = model.set_index(s.asset_set);
    if (!j) throw StrategyError("strategy trades a non-admissible asset set");
    const auto& f = model.trading_filtrations[*j];
    for (const auto& leg : s.legs) {
        if (leg.from >= leg.to || leg.to >= model.time_count())
            throw StrategyError("strategy leg [" + std::to_string(leg.from) + "," + std::to_string(leg.to) +
                                "] is not an increasing pair of grid indices");
        if (leg.holdings.size() != s.asset_set.size())
            throw StrategyError("strategy leg needs one holding per asset of its set");
        Partition part = f.at(model.grid[leg.from]);
        for (std::size_t a = 0; a < leg.holdings.size(); ++a) {
            const auto& h = leg.holdings[a];
            if (h.size() != model.outcome_count()) throw StrategyError("holding has wrong length");
            if (!part.measurable(h))
                throw StrategyError("holding in " + model.assets[s.asset_set[a]] + " at t=" +
                                    to_string(model.grid[leg.from]) + " is not measurable for the trading filtration");
            if (s.sign_constraint == Mode::long_only)
                for (const auto& v : h)
                    if (v < 0) throw StrategyError("long-only strategy holds a negative position");
        }
    }
}

std::vector<RandomVariable> wealth_process(const MarketModel& model, const Strategy& s) {
    check_strategy(model, s);
    const std::size_t n = model.outcome_count();
    std::vector<RandomVariable> out(model.time_count(), RandomVariable(n, Rational(0)));
    for (std::size_t k = 0; k < model.time_count(); ++k)
        for (const auto& leg : s.legs) {
            if (leg.from >= k) continue;
            std::size_t end = std::min(leg.to, k);
            for (std::size_t a = 0; a < s.asset_set.size(); ++a) {
                const auto& price = model.prices[s.asset_set[a]];
                for (std::size_t w = 0; w < n; ++w)
                    out[k][w] += leg.holdings[a][w] * (price[end][w] - price[leg.from][w]);
            }
        }
    return out;
}

RandomVariable generator_payoff(const MarketModel& model, const Generator& g) {
    RandomVariable out(model.outcome_count(), Rational(0));
    for (std::size_t w : g.block) out[w] = model.prices[g.asset][g.to][w] - model.prices[g.asset][g.from][w];
    return out;
}

std::vector<Generator> enumerate_generators(const MarketModel& model, Mode mode) {
    std::vector<Generator> out;
    std::set<RandomVariable> seen;
    for (std::size_t j = 0; j < model.admissible_sets.size(); ++j)
        for (std::size_t asset : model.admissible_sets[j])
            for (std::size_t k = 0; k + 1 < model.time_count(); ++k) {
                Partition part = model.trading_filtrations[j].at(model.grid[k]);
                for (const auto& block : part.blocks()) {
                    Generator g{asset, k, k + 1, j, block, {}, mode == Mode::long_only};
                    g.payoff = generator_payoff(model, g);
                    if (std::all_of(g.payoff.begin(), g.payoff.end(), [](const Rational& v) { return v == 0; }))
                        continue;
                    if (!seen.insert(g.payoff).second) continue;
                    out.push_back(std::move(g));
                }
            }
    return out;
}

linalg::Columns payoff_columns(const std::vector<Generator>& generators) {
    linalg::Columns cols;
    cols.reserve(generators.size());
    for (const auto& g : generators) cols.push_back(g.payoff);
    return cols;
}

TerminalCone terminal_cone_description(const MarketModel& model, Mode mode) {
    TerminalCone cone;
    cone.mode = mode;
    cone.generators = enumerate_generators(model, mode);
    cone.columns = payoff_columns(cone.generators);
    cone.outcome_count = model.outcome_count();
    cone.rank = linalg::rank(cone.columns, model.outcome_count());
    std::ostringstream d;
    d << "K0 = " << (mode == Mode::free ? "span" : "conic hull") << " of " << cone.columns.size()
      << " generator payoffs (rank " << cone.rank << ") in R^" << model.outcome_count()
      << "; C = K0 - nonnegative claims, closed";
    if (cone.columns.empty()) d << "; K0 = {0}, C = nonpositive orthant";
    cone.description = d.str();
    return cone;
}

Strategy strategy_from_coefficients(const MarketModel& model, const std::vector<Generator>& generators,
                                    const std::vector<Rational>& coefficients, Mode mode) {
    if (generators.size() != coefficients.size())
        throw std::invalid_argument("strategy_from_coefficients: one coefficient per generator required");
    Strategy s;
    s.sign_constraint = mode;
    for (std::size_t g = 0; g < generators.size(); ++g)
        if (coefficients[g] != 0) s.asset_set = set_union(s.asset_set, model.admissible_sets.at(generators[g].set));
    if (s.asset_set.empty()) {
        if (model.admissible_sets.empty()) return s;
        s.asset_set = model.admissible_sets.front();
    }
    if (!model.set_index(s.asset_set))
        throw std::invalid_argument("strategy_from_coefficients: union of used asset sets is not admissible");
    const std::size_t n = model.outcome_count();
    std::map<std::size_t, StrategyLeg> legs;
    for (std::size_t g = 0; g < generators.size(); ++g) {
        if (coefficients[g] == 0) continue;
        const auto& gen = generators[g];
        auto [it, inserted] = legs.try_emplace(gen.from);
        if (inserted) {
            it->second.from = gen.from;
            it->second.to = gen.to;
            it->second.holdings.assign(s.asset_set.size(), RandomVariable(n, Rational(0)));
        }
        auto pos = std::lower_bound(s.asset_set.begin(), s.asset_set.end(), gen.asset) - s.asset_set.begin();
        for (std::size_t w : gen.block) it->second.holdings[static_cast<std::size_t>(pos)][w] += coefficients[g];
    }
    for (auto& [from, leg] : legs) s.legs.push_back(std::move(leg));
    return s;
}

RandomVariable combine(const linalg::Columns& columns, const std::vector<Rational>& coefficients,
                       std::size_t outcome_count) {
    if (columns.size() != coefficients.size()) throw std::invalid_argument("combine: dimension mismatch");
    RandomVariable out(outcome_count, Rational(0));
    for (std::size_t g = 0; g < columns.size(); ++g) {
        if (coefficients[g] == 0) continue;
        for (std::size_t w = 0; w < outcome_count; ++w) out[w] += coefficients[g] * columns[g][w];
    }
    return out;
}

}  // namespace platonic::market
