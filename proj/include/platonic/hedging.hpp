#pragma once

#include "platonic/ftap.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace platonic::hedging {

using ftap::Kind;
using ftap::MeasureCertificate;
using market::MarketModel;
using market::Mode;
using prob::RandomVariable;

/// Pricing was requested in a market that admits arbitrage.
class UnpricedMarket : public std::domain_error {
public:
    explicit UnpricedMarket(const std::string& what) : std::domain_error(what) {}
};

/// x + G lambda >= f with surplus h = x + G lambda - f >= 0, which vanishes
/// wherever the dual measure charges.
struct HedgeCertificate {
    Rational price;
    std::vector<Rational> lambda;
    RandomVariable claim;
    RandomVariable surplus;
    market::Strategy strategy;
    /// sum_w q(w) h(w) against the dual measure; zero in exact mode.
    Rational complementary_slackness;
};

/// Super-replication LP pair on explicit generator columns.
struct SuperhedgeLp {
    Rational primal_value;
    Rational dual_value;
    std::vector<Rational> lambda;
    std::vector<Rational> q;
    lp::LpSolution primal_raw;
    lp::LpSolution dual_raw;
};

/// The probability vectors q with q^T G == 0 (or <= 0), as LP constraints.
lp::LinearProgram dual_polytope(const linalg::Columns& columns, std::size_t outcome_count, Kind kind);

/**
 * Primal: min x s.t. x + G lambda >= f. Dual: max E_q[f] over the dual
 * polytope. Requires the polytope to be nonempty. In exact mode the two
 * values must agree exactly; in float mode a gap above 1e-8 raises
 * lp::NumericalFailure.
 */
SuperhedgeLp superhedge_columns(const linalg::Columns& columns, const RandomVariable& claim, Mode mode,
                                const lp::SolveOptions& options = {});

struct SuperhedgeResult {
    HedgeCertificate hedge;
    MeasureCertificate dual;
    Rational duality_gap;
};

/// Cheapest super-hedge of `claim` and the dual maximiser. Throws
/// UnpricedMarket when the market admits arbitrage for `mode`.
SuperhedgeResult superreplicate(const MarketModel& model, const RandomVariable& claim, Mode mode = Mode::free,
                                const lp::SolveOptions& options = {});

struct Replication {
    Rational price;
    std::vector<Rational> lambda;
};

/// Mixture (1 - s) q* + s Q' of the boundary optimiser q* with a full-support
/// martingale measure Q', within eta of the upper bound.
struct OpennessWitness {
    std::vector<Rational> boundary_optimum;
    std::size_t null_outcome = 0;
    std::vector<Rational> full_support_measure;
    Rational weight;
    Rational eta;
    Rational value;
};

struct PriceInterval {
    Rational lower;
    Rational upper;
    bool lower_attained_full_support = false;
    bool upper_attained_full_support = false;
    std::optional<Replication> replication;
    std::optional<OpennessWitness> openness;

    bool attainable() const { return lower == upper; }
};

/// Min and max of E_Q[claim] over the martingale polytope. Exact mode also
/// returns the replication of an attainable claim or the openness witness
/// of a non-attainable one.
PriceInterval price_interval(const MarketModel& model, const RandomVariable& claim,
                             const lp::SolveOptions& options = {}, const Rational& eta = ratio(1, 1000000));

struct PolarConeReport {
    /// Extreme rays of {z >= 0, z^T G = 0}, scaled to sum one.
    std::vector<std::vector<Rational>> rays;
    /// Vertices of the martingale polytope.
    std::vector<std::vector<Rational>> vertices;
    bool rays_are_vertices = false;
    bool vertices_are_rays = false;

    bool holds() const { return rays_are_vertices && vertices_are_rays; }
};

/// Compares the polar cone of C, computed from minimal supports, with the
/// cone over the martingale polytope's vertices. Spaces of at most
/// `max_outcomes` outcomes only (lp::DimensionGuard otherwise).
PolarConeReport polar_cone_check(const MarketModel& model, std::size_t max_outcomes = 6);

struct AttainabilityReport {
    Rational x;
    Rational superhedge_of_difference;
    Rational superhedge_of_negated_difference;
    bool in_c_and_minus_c = false;
    bool zero_at_vertices = false;
    bool in_span = false;

    bool consistent() const { return in_c_and_minus_c == zero_at_vertices && zero_at_vertices == in_span; }
};

/// Checks f - x in C and -C, E_Q[f - x] = 0 at every vertex Q, and f - x in
/// the generator span. `x` defaults to the super-replication price.
AttainabilityReport attainability_set_check(const MarketModel& model, const RandomVariable& claim,
                                            std::optional<Rational> x = std::nullopt);

}  // namespace platonic::hedging
