#include "platonic/ftap.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace platonic::ftap {

using lp::Arithmetic;
using lp::LinearProgram;
using lp::Relation;
using lp::Status;

namespace {

bool is_exact(const lp::SolveOptions& options) { return options.arithmetic == Arithmetic::exact; }

Rational tolerance_of(const lp::SolveOptions& options) {
    return is_exact(options) ? Rational(0) : rational_from_double(options.tolerance);
}

}  // namespace

std::string to_string(Kind kind) { return kind == Kind::martingale ? "martingale" : "supermartingale"; }

std::vector<std::vector<std::size_t>> lump_outcomes(const linalg::Columns& columns, std::size_t n) {
    std::map<std::vector<Rational>, std::size_t> index;
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t w = 0; w < n; ++w) {
        std::vector<Rational> row;
        row.reserve(columns.size());
        for (const auto& c : columns) row.push_back(c[w]);
        auto [it, inserted] = index.try_emplace(std::move(row), classes.size());
        if (inserted) classes.emplace_back();
        classes[it->second].push_back(w);
    }
    return classes;
}

ArbitrageSearch search_arbitrage(const linalg::Columns& columns, std::size_t n, Mode mode,
                                 const lp::SolveOptions& options) {
    const auto classes = lump_outcomes(columns, n);
    const std::size_t m = columns.size();
    LinearProgram lp(m + classes.size(), lp::Sense::maximize);
    for (std::size_t g = 0; g < m; ++g)
        if (mode == Mode::free) lp.set_free(g);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        lp.objective[m + c] = static_cast<long>(classes[c].size());
        lp.set_bounds(m + c, Rational(0), Rational(1));
        std::vector<Rational> row(m + classes.size());
        for (std::size_t g = 0; g < m; ++g) row[g] = -columns[g][classes[c].front()];
        row[m + c] = 1;
        lp.add_constraint(std::move(row), Relation::less_equal, Rational(0));
    }
    ArbitrageSearch out;
    out.raw = lp::solve(lp, options);
    if (out.raw.status != Status::optimal) throw std::logic_error("arbitrage LP is bounded and feasible by design");
    out.total_mass = out.raw.objective;
    out.found = out.total_mass > tolerance_of(options);
    out.lambda.assign(out.raw.primal.begin(), out.raw.primal.begin() + static_cast<long>(m));
    out.terminal_gain.assign(n, Rational(0));
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (std::size_t w : classes[c]) out.terminal_gain[w] = out.raw.primal[m + c];
    out.consumption = market::combine(columns, out.lambda, n);
    for (std::size_t w = 0; w < n; ++w) out.consumption[w] -= out.terminal_gain[w];
    return out;
}

MeasureSearch search_measure(const linalg::Columns& columns, std::size_t n, Kind kind,
                             const lp::SolveOptions& options) {
    const auto classes = lump_outcomes(columns, n);
    const std::size_t k = classes.size();
    const std::size_t eps = k;
    LinearProgram lp(k + 1, lp::Sense::maximize);
    lp.objective[eps] = 1;
    std::vector<Rational> total(k + 1, Rational(1));
    total[eps] = 0;
    lp.add_constraint(std::move(total), Relation::equal, Rational(1));
    for (const auto& col : columns) {
        std::vector<Rational> row(k + 1);
        for (std::size_t c = 0; c < k; ++c) row[c] = col[classes[c].front()];
        lp.add_constraint(std::move(row), kind == Kind::martingale ? Relation::equal : Relation::less_equal,
                          Rational(0));
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<Rational> row(k + 1);
        row[c] = 1;
        row[eps] = -static_cast<long>(classes[c].size());
        lp.add_constraint(std::move(row), Relation::greater_equal, Rational(0));
    }

    MeasureSearch out;
    out.raw = lp::solve(lp, options);
    if (out.raw.status == Status::unbounded) throw std::logic_error("measure LP is bounded by design");
    if (out.raw.status == Status::infeasible) return out;
    out.epsilon = out.raw.primal[eps];
    out.q.assign(n, Rational(0));
    Rational sum = 0;
    for (std::size_t c = 0; c < k; ++c) {
        Rational share = out.raw.primal[c] < 0 ? Rational(0) : Rational(out.raw.primal[c] / static_cast<long>(classes[c].size()));
        for (std::size_t w : classes[c]) {
            out.q[w] = share;
            sum += share;
        }
    }
    if (!is_exact(options) && sum > 0)
        for (auto& v : out.q) v /= sum;
    if (is_exact(options))
        out.status = out.epsilon > 0 ? MeasureStatus::full_support : MeasureStatus::none;
    else
        out.status = out.epsilon >= tolerance_of(options) ? MeasureStatus::full_support : MeasureStatus::boundary;
    return out;
}

MeasureCertificate make_measure_certificate(const linalg::Columns& columns, std::vector<Rational> q, Kind kind,
                                            Arithmetic arithmetic) {
    MeasureCertificate cert;
    cert.kind = kind;
    cert.arithmetic = arithmetic;
    cert.min_mass = q.empty() ? Rational(0) : *std::min_element(q.begin(), q.end());
    for (const auto& col : columns) cert.generator_expectations.push_back(linalg::dot(q, col));
    cert.q = std::move(q);
    return cert;
}

std::optional<ArbitrageCertificate> find_arbitrage(const MarketModel& model, Mode mode,
                                                   const lp::SolveOptions& options) {
    market::require_valid(model);
    auto gens = market::enumerate_generators(model, mode);
    auto search = search_arbitrage(market::payoff_columns(gens), model.outcome_count(), mode, options);
    if (!search.found) return std::nullopt;
    ArbitrageCertificate cert;
    cert.strategy = market::strategy_from_coefficients(model, gens, search.lambda, mode);
    cert.generators = std::move(gens);
    cert.lambda = std::move(search.lambda);
    cert.terminal_gain = std::move(search.terminal_gain);
    cert.consumption = std::move(search.consumption);
    cert.arithmetic = options.arithmetic;
    return cert;
}

std::optional<MeasureCertificate> find_measure(const MarketModel& model, Kind kind, const lp::SolveOptions& options) {
    market::require_valid(model);
    auto cols = market::payoff_columns(
        market::enumerate_generators(model, kind == Kind::martingale ? Mode::free : Mode::long_only));
    auto search = search_measure(cols, model.outcome_count(), kind, options);
    if (search.status == MeasureStatus::boundary)
        throw BoundaryResult("measure search: optimal minimum mass " + to_string(search.epsilon) +
                             " is below the tolerance");
    if (search.status == MeasureStatus::none) return std::nullopt;
    return make_measure_certificate(cols, std::move(search.q), kind, options.arithmetic);
}

Verdict ftap_verdict(const MarketModel& model, Mode mode, const lp::SolveOptions& options) {
    market::require_valid(model);
    auto gens = market::enumerate_generators(model, mode);
    auto cols = market::payoff_columns(gens);
    auto arb = search_arbitrage(cols, model.outcome_count(), mode, options);
    auto meas = search_measure(cols, model.outcome_count(), kind_for(mode), options);

    if (meas.status == MeasureStatus::boundary && !arb.found)
        throw BoundaryResult("ftap verdict: no arbitrage found but the measure search sits on the boundary");
    const bool measure_found = meas.status == MeasureStatus::full_support;
    if (arb.found == measure_found)
        throw FtapInconsistency(arb.found ? "ftap verdict: both an arbitrage and a full-support measure were found"
                                          : "ftap verdict: neither an arbitrage nor a full-support measure was found",
                                std::move(arb), std::move(meas));
    Verdict v;
    v.arbitrage = arb.found;
    if (arb.found) {
        ArbitrageCertificate cert;
        cert.strategy = market::strategy_from_coefficients(model, gens, arb.lambda, mode);
        cert.generators = std::move(gens);
        cert.lambda = std::move(arb.lambda);
        cert.terminal_gain = std::move(arb.terminal_gain);
        cert.consumption = std::move(arb.consumption);
        cert.arithmetic = options.arithmetic;
        v.arbitrage_certificate = std::move(cert);
    } else {
        v.measure_certificate = make_measure_certificate(cols, std::move(meas.q), kind_for(mode), options.arithmetic);
    }
    return v;
}

std::optional<SeparatingDensity> find_separating_density(const MarketModel& model, const lp::SolveOptions& options) {
    auto cert = find_measure(model, Kind::martingale, options);
    if (!cert) return std::nullopt;
    SeparatingDensity out;
    const auto& p = model.space.probs();
    for (std::size_t w = 0; w < p.size(); ++w) out.z.push_back(cert->q[w] / p[w]);
    for (const auto& g : market::enumerate_generators(model, Mode::free)) {
        Rational pairing = 0;
        for (std::size_t w = 0; w < p.size(); ++w) pairing += p[w] * out.z[w] * g.payoff[w];
        out.pairings.push_back(pairing);
    }
    return out;
}

std::vector<std::vector<RandomVariable>> project_prices(const MarketModel& model, const MeasureCertificate& cert,
                                                        const market::AssetSet& set, double tolerance) {
    const auto& f = model.filtration_of(set);
    std::span<const Rational> reference(model.space.probs());
    const bool exact = cert.arithmetic == Arithmetic::exact;
    const Rational tol = exact ? Rational(0) : rational_from_double(tolerance);
    std::vector<std::vector<RandomVariable>> out;
    for (std::size_t i : set) {
        std::vector<RandomVariable> path;
        for (std::size_t k = 0; k < model.time_count(); ++k)
            path.push_back(prob::conditional_expectation(model.prices[i][k], f.at(model.grid[k]), cert.q, reference));
        for (std::size_t t = 0; t < model.time_count(); ++t) {
            auto part = f.at(model.grid[t]);
            for (std::size_t u = t + 1; u < model.time_count(); ++u) {
                auto cond = prob::conditional_expectation(path[u], part, cert.q, reference);
                for (const auto& block : part.blocks()) {
                    Rational mass = 0;
                    for (std::size_t w : block) mass += cert.q[w];
                    if (mass == 0) continue;
                    Rational diff = cond[block.front()] - path[t][block.front()];
                    bool ok = cert.kind == Kind::martingale ? abs(diff) <= tol : diff <= tol;
                    if (!ok)
                        throw std::logic_error("projected price of " + model.assets[i] + " fails the " +
                                               to_string(cert.kind) + " check between t=" + to_string(model.grid[t]) +
                                               " and t=" + to_string(model.grid[u]));
                }
            }
        }
        out.push_back(std::move(path));
    }
    return out;
}

}  // namespace platonic::ftap
