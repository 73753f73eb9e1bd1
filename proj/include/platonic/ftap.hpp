#pragma once

#include "platonic/lpsolve.hpp"
#include "platonic/market.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace platonic::ftap {

using market::MarketModel;
using market::Mode;
using prob::RandomVariable;
using platonic::to_string;

enum class Kind { martingale, supermartingale };

std::string to_string(Kind kind);

/// Martingale kind matching a strategy sign constraint.
inline Kind kind_for(Mode mode) { return mode == Mode::free ? Kind::martingale : Kind::supermartingale; }

/// Probability vector q with E_q[g] == 0 (martingale) or <= 0
/// (supermartingale) for every generator payoff g.
struct MeasureCertificate {
    std::vector<Rational> q;
    Kind kind = Kind::martingale;
    Rational min_mass;
    std::vector<Rational> generator_expectations;
    lp::Arithmetic arithmetic = lp::Arithmetic::exact;

    bool full_support() const { return min_mass > 0; }
};

/// Nonnegative, nonzero terminal gain f = G lambda - h with h >= 0.
struct ArbitrageCertificate {
    market::Strategy strategy;
    std::vector<market::Generator> generators;
    std::vector<Rational> lambda;
    RandomVariable terminal_gain;
    RandomVariable consumption;
    lp::Arithmetic arithmetic = lp::Arithmetic::exact;
};

/// Outcome classes with identical generator rows. Both searches solve their
/// LP on the classes, which is exact and keeps large symmetric spaces small.
std::vector<std::vector<std::size_t>> lump_outcomes(const linalg::Columns& columns, std::size_t outcome_count);

struct ArbitrageSearch {
    bool found = false;
    std::vector<Rational> lambda;
    RandomVariable terminal_gain;
    RandomVariable consumption;
    Rational total_mass;
    lp::LpSolution raw;
};

/// max sum f subject to f <= G lambda, 0 <= f <= 1, lambda free (or >= 0 in
/// long-only mode).
ArbitrageSearch search_arbitrage(const linalg::Columns& columns, std::size_t outcome_count, Mode mode,
                                 const lp::SolveOptions& options = {});

enum class MeasureStatus { full_support, boundary, none };

struct MeasureSearch {
    MeasureStatus status = MeasureStatus::none;
    /// Best q found; empty when the constraints are infeasible.
    std::vector<Rational> q;
    Rational epsilon;
    lp::LpSolution raw;
};

/// max eps subject to q >= eps, sum q = 1 and q^T G == 0 (or <= 0).
/// A float-mode optimum below the tolerance is reported as boundary.
MeasureSearch search_measure(const linalg::Columns& columns, std::size_t outcome_count, Kind kind,
                             const lp::SolveOptions& options = {});

/// Verification numbers attached to a measure.
MeasureCertificate make_measure_certificate(const linalg::Columns& columns, std::vector<Rational> q, Kind kind,
                                            lp::Arithmetic arithmetic);

/// Float-mode search that cannot tell a full-support optimum from zero.
class BoundaryResult : public lp::NumericalFailure {
public:
    explicit BoundaryResult(const std::string& what) : lp::NumericalFailure(what) {}
};

std::optional<ArbitrageCertificate> find_arbitrage(const MarketModel& model, Mode mode,
                                                   const lp::SolveOptions& options = {});

/// Full-support certificate or nullopt. Throws BoundaryResult in float mode
/// when the optimum is within tolerance of zero.
std::optional<MeasureCertificate> find_measure(const MarketModel& model, Kind kind,
                                               const lp::SolveOptions& options = {});

struct Verdict {
    bool arbitrage = false;
    std::optional<ArbitrageCertificate> arbitrage_certificate;
    std::optional<MeasureCertificate> measure_certificate;
};

/// Both searches agreed on nothing or on both; carries the raw LP outputs.
class FtapInconsistency : public std::logic_error {
public:
    FtapInconsistency(const std::string& what, ArbitrageSearch arbitrage, MeasureSearch measure)
        : std::logic_error(what), arbitrage_(std::move(arbitrage)), measure_(std::move(measure)) {}
    const ArbitrageSearch& arbitrage() const { return arbitrage_; }
    const MeasureSearch& measure() const { return measure_; }

private:
    ArbitrageSearch arbitrage_;
    MeasureSearch measure_;
};

/// Runs both searches; exactly one must produce a certificate.
Verdict ftap_verdict(const MarketModel& model, Mode mode, const lp::SolveOptions& options = {});

struct SeparatingDensity {
    RandomVariable z;
    /// E_P[Z g] for each generator g.
    std::vector<Rational> pairings;
};

/// Z = dQ/dP for a full-support martingale measure Q, or nullopt.
std::optional<SeparatingDensity> find_separating_density(const MarketModel& model,
                                                         const lp::SolveOptions& options = {});

/**
 * E_Q[S^i_t | F^A_t] for each asset i of `set` and grid time t, indexed
 * [asset position][time]. Null blocks of a non-full-support certificate are
 * averaged under the reference measure. Throws std::logic_error when the
 * projections fail the (super)martingale check on non-null blocks.
 */
std::vector<std::vector<RandomVariable>> project_prices(const MarketModel& model, const MeasureCertificate& cert,
                                                        const market::AssetSet& set, double tolerance = 1e-9);

}  // namespace platonic::ftap
