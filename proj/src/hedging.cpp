#include "platonic/hedging.hpp"

#include <algorithm>
#include <set>

namespace platonic::hedging {

using lp::Arithmetic;
using lp::LinearProgram;
using lp::Relation;
using lp::Status;

namespace {

RandomVariable negate(const RandomVariable& x) {
    RandomVariable out(x.size());
    for (std::size_t w = 0; w < x.size(); ++w) out[w] = -x[w];
    return out;
}

void require_priced(const MarketModel& model, Mode mode, const lp::SolveOptions& options) {
    if (ftap::ftap_verdict(model, mode, options).arbitrage)
        throw UnpricedMarket("market admits " + market::to_string(mode) + " arbitrage; the claim has no price");
}

// Largest minimum mass of a measure in the polytope with E_q[f] == value.
bool attained_with_full_support(const linalg::Columns& columns, const RandomVariable& f, const Rational& value,
                                const lp::SolveOptions& options) {
    const std::size_t n = f.size();
    LinearProgram lp = dual_polytope(columns, n, Kind::martingale);
    const std::size_t eps = lp.add_variable(Rational(1));
    lp.objective.assign(n + 1, Rational(0));
    lp.objective[eps] = 1;
    std::vector<Rational> row(f.begin(), f.end());
    row.push_back(0);
    lp.add_constraint(std::move(row), Relation::equal, value);
    for (std::size_t w = 0; w < n; ++w) {
        std::vector<Rational> r(n + 1);
        r[w] = 1;
        r[eps] = -1;
        lp.add_constraint(std::move(r), Relation::greater_equal, Rational(0));
    }
    auto sol = lp::solve(lp, options);
    if (sol.status != Status::optimal) return false;
    Rational tol = options.arithmetic == Arithmetic::exact ? Rational(0) : rational_from_double(options.tolerance);
    return sol.objective > tol;
}

}  // namespace

LinearProgram dual_polytope(const linalg::Columns& columns, std::size_t n, Kind kind) {
    LinearProgram lp(n, lp::Sense::maximize);
    lp.add_constraint(std::vector<Rational>(n, Rational(1)), Relation::equal, Rational(1));
    for (const auto& col : columns)
        lp.add_constraint(col, kind == Kind::martingale ? Relation::equal : Relation::less_equal, Rational(0));
    return lp;
}

SuperhedgeLp superhedge_columns(const linalg::Columns& columns, const RandomVariable& claim, Mode mode,
                                const lp::SolveOptions& options) {
    const std::size_t n = claim.size();
    const std::size_t m = columns.size();
    LinearProgram primal(1 + m, lp::Sense::minimize);
    primal.objective[0] = 1;
    primal.set_free(0);
    for (std::size_t g = 0; g < m; ++g)
        if (mode == Mode::free) primal.set_free(1 + g);
    for (std::size_t w = 0; w < n; ++w) {
        std::vector<Rational> row(1 + m);
        row[0] = 1;
        for (std::size_t g = 0; g < m; ++g) row[1 + g] = columns[g][w];
        primal.add_constraint(std::move(row), Relation::greater_equal, claim[w]);
    }
    LinearProgram dual = dual_polytope(columns, n, ftap::kind_for(mode));
    dual.objective = claim;

    SuperhedgeLp out;
    out.dual_raw = lp::solve(dual, options);
    if (out.dual_raw.status == Status::infeasible)
        throw UnpricedMarket("no " + ftap::to_string(ftap::kind_for(mode)) + " measure exists; the claim has no price");
    out.primal_raw = lp::solve(primal, options);
    if (out.primal_raw.status != Status::optimal || out.dual_raw.status != Status::optimal)
        throw std::logic_error("super-replication LP pair is not jointly optimal");
    out.primal_value = out.primal_raw.objective;
    out.dual_value = out.dual_raw.objective;
    out.lambda.assign(out.primal_raw.primal.begin() + 1, out.primal_raw.primal.end());
    out.q = out.dual_raw.primal;
    if (options.arithmetic == Arithmetic::exact) {
        if (out.primal_value != out.dual_value)
            throw std::logic_error("strong duality failed: primal " + to_string(out.primal_value) + ", dual " +
                                   to_string(out.dual_value));
    } else if (abs(out.primal_value - out.dual_value) > rational_from_double(1e-8)) {
        throw lp::NumericalFailure("super-replication duality gap " +
                                   std::to_string(to_double(abs(out.primal_value - out.dual_value))));
    }
    return out;
}

SuperhedgeResult superreplicate(const MarketModel& model, const RandomVariable& claim, Mode mode,
                                const lp::SolveOptions& options) {
    market::require_valid(model);
    if (claim.size() != model.outcome_count()) throw std::invalid_argument("claim has wrong length");
    require_priced(model, mode, options);
    auto gens = market::enumerate_generators(model, mode);
    auto cols = market::payoff_columns(gens);
    auto lp = superhedge_columns(cols, claim, mode, options);

    SuperhedgeResult out;
    auto& h = out.hedge;
    h.price = lp.primal_value;
    h.lambda = lp.lambda;
    h.claim = claim;
    h.surplus = market::combine(cols, h.lambda, model.outcome_count());
    for (std::size_t w = 0; w < claim.size(); ++w) h.surplus[w] += h.price - claim[w];
    h.strategy = market::strategy_from_coefficients(model, gens, h.lambda, mode);
    out.dual = ftap::make_measure_certificate(cols, lp.q, ftap::kind_for(mode), options.arithmetic);
    h.complementary_slackness = linalg::dot(lp.q, h.surplus);
    out.duality_gap = lp.primal_value - lp.dual_value;
    return out;
}

PriceInterval price_interval(const MarketModel& model, const RandomVariable& claim, const lp::SolveOptions& options,
                             const Rational& eta) {
    market::require_valid(model);
    if (claim.size() != model.outcome_count()) throw std::invalid_argument("claim has wrong length");
    require_priced(model, Mode::free, options);
    const std::size_t n = model.outcome_count();
    auto cols = market::payoff_columns(market::enumerate_generators(model, Mode::free));
    auto top = superhedge_columns(cols, claim, Mode::free, options);
    auto bottom = superhedge_columns(cols, negate(claim), Mode::free, options);

    PriceInterval out;
    out.upper = top.primal_value;
    out.lower = -bottom.primal_value;
    out.upper_attained_full_support = attained_with_full_support(cols, claim, out.upper, options);
    out.lower_attained_full_support = attained_with_full_support(cols, claim, out.lower, options);
    if (options.arithmetic != Arithmetic::exact) return out;

    if (out.lower == out.upper) {
        linalg::Columns with_cash{RandomVariable(n, Rational(1))};
        with_cash.insert(with_cash.end(), cols.begin(), cols.end());
        auto x = linalg::solve_in_span(with_cash, claim);
        if (!x) throw std::logic_error("zero-width price interval but the replication system is inconsistent");
        out.replication = Replication{(*x)[0], std::vector<Rational>(x->begin() + 1, x->end())};
        return out;
    }

    OpennessWitness w;
    w.boundary_optimum = top.q;
    auto null = std::find(top.q.begin(), top.q.end(), Rational(0));
    if (null == top.q.end()) throw std::logic_error("a full-support measure maximises a non-constant price");
    w.null_outcome = static_cast<std::size_t>(null - top.q.begin());
    auto inner = ftap::search_measure(cols, n, Kind::martingale, options);
    if (inner.status != ftap::MeasureStatus::full_support)
        throw std::logic_error("no full-support martingale measure in an arbitrage-free market");
    w.full_support_measure = inner.q;
    Rational gap = out.upper - prob::expectation(claim, inner.q);
    if (gap <= 0) throw std::logic_error("full-support measure reaches the unattained upper bound");
    w.eta = eta;
    w.weight = std::min(Rational(1, 2), Rational(eta / gap));
    std::vector<Rational> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = (1 - w.weight) * top.q[i] + w.weight * inner.q[i];
    w.value = prob::expectation(claim, mix);
    out.openness = std::move(w);
    return out;
}

PolarConeReport polar_cone_check(const MarketModel& model, std::size_t max_outcomes) {
    market::require_valid(model);
    const std::size_t n = model.outcome_count();
    if (n > max_outcomes)
        throw lp::DimensionGuard("polar cone check limited to " + std::to_string(max_outcomes) + " outcomes, got " +
                                 std::to_string(n));
    auto cols = market::payoff_columns(market::enumerate_generators(model, Mode::free));

    std::set<std::vector<Rational>> rays;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> support;
        for (std::size_t w = 0; w < n; ++w)
            if (mask >> w & 1) support.push_back(w);
        linalg::Columns restricted;
        for (const auto& col : cols) {
            linalg::Vector r;
            for (std::size_t w : support) r.push_back(col[w]);
            restricted.push_back(std::move(r));
        }
        auto basis = linalg::left_null_space(restricted, support.size());
        if (basis.size() != 1) continue;
        const auto& v = basis[0];
        bool positive = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x > 0; });
        bool negative = std::all_of(v.begin(), v.end(), [](const Rational& x) { return x < 0; });
        if (!positive && !negative) continue;
        Rational total = 0;
        for (const auto& x : v) total += x;
        std::vector<Rational> ray(n, Rational(0));
        for (std::size_t k = 0; k < support.size(); ++k) ray[support[k]] = v[k] / total;
        rays.insert(std::move(ray));
    }

    PolarConeReport out;
    out.rays.assign(rays.begin(), rays.end());
    out.vertices = lp::enumerate_vertices(dual_polytope(cols, n, Kind::martingale));
    std::set<std::vector<Rational>> vertex_set(out.vertices.begin(), out.vertices.end());
    out.rays_are_vertices = std::all_of(out.rays.begin(), out.rays.end(), [&](const auto& r) { return vertex_set.count(r) > 0; });
    out.vertices_are_rays = std::all_of(out.vertices.begin(), out.vertices.end(), [&](const auto& v) { return rays.count(v) > 0; });
    return out;
}

AttainabilityReport attainability_set_check(const MarketModel& model, const RandomVariable& claim,
                                            std::optional<Rational> x) {
    market::require_valid(model);
    if (claim.size() != model.outcome_count()) throw std::invalid_argument("claim has wrong length");
    require_priced(model, Mode::free, {});
    const std::size_t n = model.outcome_count();
    auto cols = market::payoff_columns(market::enumerate_generators(model, Mode::free));

    AttainabilityReport out;
    out.x = x ? *x : superhedge_columns(cols, claim, Mode::free).primal_value;
    RandomVariable diff(n);
    for (std::size_t w = 0; w < n; ++w) diff[w] = claim[w] - out.x;

    out.superhedge_of_difference = superhedge_columns(cols, diff, Mode::free).primal_value;
    out.superhedge_of_negated_difference = superhedge_columns(cols, negate(diff), Mode::free).primal_value;
    out.in_c_and_minus_c = out.superhedge_of_difference <= 0 && out.superhedge_of_negated_difference <= 0;

    auto vertices = lp::enumerate_vertices(dual_polytope(cols, n, Kind::martingale));
    out.zero_at_vertices = std::all_of(vertices.begin(), vertices.end(),
                                       [&](const auto& q) { return prob::expectation(diff, q) == 0; });
    out.in_span = linalg::solve_in_span(cols, diff).has_value();
    return out;
}

}  // namespace platonic::hedging
