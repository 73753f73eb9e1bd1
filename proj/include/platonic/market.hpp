#pragma once

#include "platonic/linalg.hpp"
#include "platonic/probspace.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace platonic::market {

using prob::Filtration;
using prob::FiniteSpace;
using prob::Partition;
using prob::RandomVariable;

/// Sorted, duplicate-free list of asset indices.
using AssetSet = std::vector<std::size_t>;

/// Sign restriction on holdings.
enum class Mode { free, long_only };

using platonic::to_string;
std::string to_string(Mode mode);

/**
 * Assets priced under the big filtration G, traded under smaller filtrations
 * F^A attached to each admissible asset set A.
 *
 * prices[i][k] is asset i at grid[k]. trading_filtrations[j] belongs to
 * admissible_sets[j]. Filtrations may live on their own time grids; they are
 * read at grid times through Filtration::at.
 */
struct MarketModel {
    FiniteSpace space;
    std::vector<Rational> grid;
    Filtration big_filtration;
    std::vector<std::string> assets;
    std::vector<std::vector<RandomVariable>> prices;
    std::vector<AssetSet> admissible_sets;
    std::vector<Filtration> trading_filtrations;

    std::size_t outcome_count() const { return space.size(); }
    std::size_t time_count() const { return grid.size(); }

    /// Index of `set` among the admissible sets, if present.
    std::optional<std::size_t> set_index(const AssetSet& set) const;

    /// Throws std::out_of_range when `set` is not admissible.
    const Filtration& filtration_of(const AssetSet& set) const;

    std::size_t grid_index(const Rational& t) const;

    std::size_t asset_index(const std::string& name) const;
};

struct Violation {
    std::string invariant;
    std::string detail;
};

/// Every broken invariant of `model`, empty when the model is valid.
std::vector<Violation> validate(const MarketModel& model);

/// Thrown by operations that require a valid model.
class InvalidModel : public std::invalid_argument {
public:
    explicit InvalidModel(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

void require_valid(const MarketModel& model);

/// Adds every missing union of admissible sets. A new union trades under the
/// join of the filtrations of the sets it is built from.
MarketModel close_under_unions(MarketModel model);

/// Sorted union of two asset sets.
AssetSet set_union(const AssetSet& a, const AssetSet& b);

bool is_subset(const AssetSet& small, const AssetSet& big);

/// Holdings held over [grid[from], grid[to]], one variable per asset of the
/// strategy's set, in the set's order.
struct StrategyLeg {
    std::size_t from = 0;
    std::size_t to = 0;
    std::vector<RandomVariable> holdings;
};

struct Strategy {
    AssetSet asset_set;
    std::vector<StrategyLeg> legs;
    Mode sign_constraint = Mode::free;
};

class StrategyError : public std::invalid_argument {
public:
    explicit StrategyError(const std::string& what) : std::invalid_argument(what) {}
};

/// Throws StrategyError for non-admissible sets, bad leg intervals,
/// non-measurable holdings or negative long-only holdings.
void check_strategy(const MarketModel& model, const Strategy& strategy);

/// Gains process (H . S)_t at each grid time; zero at the first grid time.
std::vector<RandomVariable> wealth_process(const MarketModel& model, const Strategy& strategy);

/// Elementary bet 1_B (S^i_u - S^i_t) over adjacent grid times t < u, with B a
/// block of F^A at t.
struct Generator {
    std::size_t asset = 0;
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t set = 0;
    Partition::Block block;
    RandomVariable payoff;
    bool one_sided = false;
};

/// Recomputes the payoff from the other fields.
RandomVariable generator_payoff(const MarketModel& model, const Generator& g);

/// Adjacent-interval generators over every admissible set, asset and block.
/// Zero payoffs are dropped; equal payoffs keep their first occurrence.
std::vector<Generator> enumerate_generators(const MarketModel& model, Mode mode);

/// Payoffs as matrix columns.
linalg::Columns payoff_columns(const std::vector<Generator>& generators);

/// K0 is the span (free) or conic hull (long only) of the columns and
/// C = K0 - nonnegative claims. C is closed on a finite space.
struct TerminalCone {
    Mode mode = Mode::free;
    std::vector<Generator> generators;
    linalg::Columns columns;
    std::size_t rank = 0;
    std::size_t outcome_count = 0;
    std::string description;
};

TerminalCone terminal_cone_description(const MarketModel& model, Mode mode);

/// Strategy over the union of the sets used by `generators` whose terminal
/// gain is sum_g coefficients[g] * payoff(g).
Strategy strategy_from_coefficients(const MarketModel& model, const std::vector<Generator>& generators,
                                    const std::vector<Rational>& coefficients, Mode mode = Mode::free);

/// Sum_g coefficients[g] * columns[g].
RandomVariable combine(const linalg::Columns& columns, const std::vector<Rational>& coefficients,
                       std::size_t outcome_count);

}  // namespace platonic::market
