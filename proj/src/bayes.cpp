#include "platonic/bayes.hpp"

#include <algorithm>
#include <stdexcept>

namespace platonic::bayes {

using market::AssetSet;
using prob::FiniteSpace;
using prob::Partition;

namespace {

constexpr std::size_t max_outcomes = 4096;

Rational sum(const std::vector<Rational>& v) {
    Rational s = 0;
    for (const auto& x : v) s += x;
    return s;
}

bool contains(const std::vector<Rational>& times, const Rational& t) {
    return std::find(times.begin(), times.end(), t) != times.end();
}

void check_noise(const NoiseSpec& noise) {
    if (noise.values.empty() || noise.values.size() != noise.probs.size())
        throw std::invalid_argument("noise: one probability per value required");
    for (const auto& p : noise.probs)
        if (p <= 0) throw std::invalid_argument("noise: probabilities must be strictly positive");
    if (sum(noise.probs) != 1) throw std::invalid_argument("noise: probabilities must sum to one");
}

// Digits of `code` in base `radix`, least significant first.
std::vector<std::size_t> digits(std::size_t code, std::size_t radix, std::size_t count) {
    std::vector<std::size_t> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = code % radix;
        code /= radix;
    }
    return out;
}

std::size_t combination_count(std::size_t radix, std::size_t slots, std::size_t base) {
    std::size_t total = base;
    for (std::size_t s = 0; s < slots; ++s) {
        total *= radix;
        if (total > max_outcomes)
            throw std::length_error("scenario would exceed " + std::to_string(max_outcomes) + " outcomes");
    }
    return total;
}

Rational quantize(const Rational& x, const Rational& step) {
    if (step <= 0) return x;
    return floor(x / step + Rational(1, 2)) * step;
}

std::string join_digits(const std::vector<std::size_t>& d) {
    std::string out;
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (k) out += ",";
        out += std::to_string(d[k]);
    }
    return out;
}

void check_setup(const BayesSetup& s, const PathMarket& pm) {
    const std::size_t paths = s.paths.size();
    if (paths == 0) throw std::invalid_argument("bayes setup: no paths");
    if (s.path_filtration.outcome_count() != paths)
        throw std::invalid_argument("bayes setup: path filtration has wrong outcome count");
    if (s.thetas.empty() || s.prior.size() != s.thetas.size() || s.theta_models.size() != s.thetas.size())
        throw std::invalid_argument("bayes setup: one prior weight and one path model per parameter required");
    for (const auto& p : s.prior)
        if (p <= 0) throw std::invalid_argument("bayes setup: prior must be strictly positive");
    if (sum(s.prior) != 1) throw std::invalid_argument("bayes setup: prior must sum to one");
    for (std::size_t j = 0; j < s.thetas.size(); ++j) {
        const auto& row = s.theta_models[j];
        if (row.size() != paths) throw std::invalid_argument("bayes setup: path model of wrong length");
        for (const auto& p : row)
            if (p < 0) throw std::invalid_argument("bayes setup: negative path probability");
        if (sum(row) == 0) throw std::invalid_argument("bayes setup: path model of " + s.thetas[j] + " is all zero");
        if (sum(row) != 1) throw std::invalid_argument("bayes setup: path model of " + s.thetas[j] + " must sum to one");
    }
    if (pm.assets.size() != pm.prices.size()) throw std::invalid_argument("path market: one price path per asset");
    for (const auto& path : pm.prices) {
        if (path.size() != pm.grid.size()) throw std::invalid_argument("path market: one price per grid time");
        for (const auto& x : path)
            if (x.size() != paths) throw std::invalid_argument("path market: price of wrong length");
    }
}

struct BaseOutcome {
    std::size_t path;
    std::optional<std::size_t> theta;
    Rational mass;
    std::string label;
};

BayesMarket build(const BayesSetup& setup, const PathMarket& pm, const ObservationSpec& obs, bool product) {
    check_setup(setup, pm);
    const std::size_t asset_count = pm.assets.size();
    const auto& grid = pm.grid;

    std::vector<Rational> obs_times = obs.times ? *obs.times : grid;
    for (const auto& t : obs_times)
        if (!contains(grid, t)) throw std::invalid_argument("observation time " + to_string(t) + " is not a grid time");
    std::vector<Rational> steps = obs.quantizer;
    if (!steps.empty() && steps.size() != asset_count)
        throw std::invalid_argument("observation: one quantizer step per asset required");
    for (const auto& h : steps)
        if (h < 0) throw std::invalid_argument("observation: negative quantizer step");
    steps.resize(asset_count, Rational(0));
    if (obs.delay < 0) throw std::domain_error("observation: negative delay");
    if (obs.noise) check_noise(*obs.noise);

    BayesMarket out;
    out.setup = setup;
    std::vector<BaseOutcome> base;
    for (std::size_t d = 0; d < setup.paths.size(); ++d) {
        if (product) {
            for (std::size_t j = 0; j < setup.thetas.size(); ++j) {
                Rational mass = setup.theta_models[j][d] * setup.prior[j];
                std::string label = setup.paths[d] + "|" + setup.thetas[j];
                if (mass == 0) out.pruned.push_back(label);
                else base.push_back({d, j, mass, label});
            }
        } else {
            Rational mass = 0;
            for (std::size_t j = 0; j < setup.thetas.size(); ++j) mass += setup.theta_models[j][d] * setup.prior[j];
            if (mass == 0) out.pruned.push_back(setup.paths[d]);
            else base.push_back({d, std::nullopt, mass, setup.paths[d]});
        }
    }

    const std::size_t slots = obs.noise ? obs_times.size() * asset_count : 0;
    const std::size_t radix = obs.noise ? obs.noise->values.size() : 1;
    const std::size_t total = combination_count(radix, slots, base.size());
    const std::size_t per_base = total / base.size();

    std::vector<std::string> labels;
    std::vector<Rational> probs;
    std::vector<std::vector<std::size_t>> noise_of;
    std::vector<std::size_t> theta_of;
    for (const auto& b : base)
        for (std::size_t code = 0; code < per_base; ++code) {
            auto d = digits(code, radix, slots);
            Rational mass = b.mass;
            for (std::size_t s : d) mass *= obs.noise->probs[s];
            labels.push_back(slots ? b.label + "|" + join_digits(d) : b.label);
            probs.push_back(mass);
            noise_of.push_back(std::move(d));
            out.path_of.push_back(b.path);
            if (b.theta) theta_of.push_back(*b.theta);
        }
    if (product) out.theta_of = theta_of;
    const std::size_t n = labels.size();

    auto& m = out.model;
    m.space = FiniteSpace(labels, probs);
    m.grid = grid;
    m.assets = pm.assets;
    for (const auto& path : pm.prices) {
        std::vector<RandomVariable> lifted;
        for (const auto& x : path) {
            RandomVariable y(n);
            for (std::size_t w = 0; w < n; ++w) y[w] = x[out.path_of[w]];
            lifted.push_back(std::move(y));
        }
        m.prices.push_back(std::move(lifted));
    }

    // Slot k * asset_count + i holds the noise on asset i at obs_times[k].
    auto noise_value = [&](std::size_t w, std::size_t slot) { return obs.noise->values[noise_of[w][slot]]; };

    std::vector<Partition> g_parts;
    for (const auto& t : grid) {
        Partition paths = setup.path_filtration.at(t);
        std::vector<RandomVariable> keys(1, RandomVariable(n));
        for (std::size_t w = 0; w < n; ++w) keys[0][w] = static_cast<long>(paths.block_of(out.path_of[w]));
        if (product) {
            RandomVariable theta(n);
            for (std::size_t w = 0; w < n; ++w) theta[w] = static_cast<long>(theta_of[w]);
            keys.push_back(std::move(theta));
        }
        for (std::size_t k = 0; k < obs_times.size() && slots; ++k) {
            if (obs_times[k] > t) continue;
            for (std::size_t i = 0; i < asset_count; ++i) {
                RandomVariable z(n);
                for (std::size_t w = 0; w < n; ++w) z[w] = static_cast<long>(noise_of[w][k * asset_count + i]);
                keys.push_back(std::move(z));
            }
        }
        g_parts.push_back(Partition::generated_by(n, keys));
    }
    m.big_filtration = Filtration(grid, std::move(g_parts));

    std::vector<Partition> f_parts;
    std::vector<RandomVariable> seen;
    for (const auto& t : grid) {
        for (std::size_t k = 0; k < obs_times.size(); ++k) {
            if (obs_times[k] != t) continue;
            std::size_t ki = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), t) - grid.begin());
            for (std::size_t i = 0; i < asset_count; ++i) {
                RandomVariable o(n);
                for (std::size_t w = 0; w < n; ++w) {
                    o[w] = quantize(m.prices[i][ki][w], steps[i]);
                    if (slots) o[w] += noise_value(w, k * asset_count + i);
                }
                seen.push_back(std::move(o));
            }
        }
        f_parts.push_back(seen.empty() ? Partition::trivial(n) : Partition::generated_by(n, seen));
    }
    AssetSet all(asset_count);
    for (std::size_t i = 0; i < asset_count; ++i) all[i] = i;
    m.admissible_sets = {all};
    m.trading_filtrations = {prob::delayed_filtration(Filtration(grid, std::move(f_parts)), obs.delay)};
    return out;
}

void check_spec(const MarketModel& model, const OptionGridSpec& spec) {
    const std::size_t n = model.outcome_count();
    if (spec.payoff.size() != n) throw std::invalid_argument("option " + spec.name + ": payoff of wrong length");
    if (spec.trading_times.size() != spec.prices.size())
        throw std::invalid_argument("option " + spec.name + ": one price per trading time required");
    for (std::size_t k = 0; k < spec.trading_times.size(); ++k) {
        if (!contains(model.grid, spec.trading_times[k]))
            throw std::invalid_argument("option " + spec.name + ": trading time " + to_string(spec.trading_times[k]) +
                                        " is not a grid time");
        if (k && spec.trading_times[k] <= spec.trading_times[k - 1])
            throw std::invalid_argument("option " + spec.name + ": trading times must increase");
        if (spec.prices[k].size() != n) throw std::invalid_argument("option " + spec.name + ": price of wrong length");
    }
    if (!spec.trading_times.empty() && spec.trading_times.back() == model.grid.back() &&
        spec.prices.back() != spec.payoff)
        throw std::invalid_argument("option " + spec.name + ": inconsistent prices, terminal price differs from payoff");
}

// Trading times of `spec` plus the terminal time, with prices.
std::vector<std::pair<Rational, RandomVariable>> trading_schedule(const MarketModel& model, const OptionGridSpec& spec) {
    std::vector<std::pair<Rational, RandomVariable>> out;
    for (std::size_t k = 0; k < spec.trading_times.size(); ++k) out.emplace_back(spec.trading_times[k], spec.prices[k]);
    if (out.empty() || out.back().first != model.grid.back()) out.emplace_back(model.grid.back(), spec.payoff);
    return out;
}

}  // namespace

BayesScenario two_theta_binomial() {
    const std::vector<Rational> grid{Rational(0), ratio(1, 2), Rational(1)};
    std::vector<std::string> paths{"uu", "ud", "du", "dd"};
    Filtration path_filtration(grid, {Partition::trivial(4), Partition(4, {{0, 1}, {2, 3}}), Partition::discrete(4)});
    auto model = [](const Rational& p) {
        Rational q = 1 - p;
        return std::vector<Rational>{p * p, p * q, q * p, q * q};
    };
    BayesScenario out{BayesSetup{paths, path_filtration, {"low", "high"}, {ratio(1, 2), ratio(1, 2)},
                                 {model(ratio(1, 3)), model(ratio(2, 3))}},
                      PathMarket{grid, {"S"}, {}}};
    out.prices.prices = {{RandomVariable(4, Rational(1)),
                          RandomVariable{Rational(2), Rational(2), ratio(1, 2), ratio(1, 2)},
                          RandomVariable{Rational(4), Rational(1), Rational(1), ratio(1, 4)}}};
    return out;
}

Rational NoiseSpec::mean() const {
    Rational m = 0;
    for (std::size_t k = 0; k < values.size() && k < probs.size(); ++k) m += values[k] * probs[k];
    return m;
}

BayesMarket build_product_market(const BayesSetup& setup, const PathMarket& prices, const ObservationSpec& obs) {
    return build(setup, prices, obs, true);
}

BayesMarket build_mixture_market(const BayesSetup& setup, const PathMarket& prices, const ObservationSpec& obs) {
    return build(setup, prices, obs, false);
}

std::vector<PosteriorBlock> posterior(const BayesMarket& bm, const Rational& t) {
    if (!bm.theta_of) throw std::invalid_argument("posterior: the parameter is not an outcome coordinate of a mixture market");
    const auto& probs = bm.model.space.probs();
    const std::size_t thetas = bm.setup.thetas.size();
    std::vector<PosteriorBlock> out;
    const Partition part = bm.model.trading_filtrations.front().at(t);
    for (const auto& block : part.blocks()) {
        PosteriorBlock pb{block, std::vector<Rational>(thetas, Rational(0))};
        Rational mass = 0;
        for (std::size_t w : block) {
            pb.distribution[(*bm.theta_of)[w]] += probs[w];
            mass += probs[w];
        }
        for (auto& v : pb.distribution) v /= mass;
        out.push_back(std::move(pb));
    }
    return out;
}

std::vector<RandomVariable> posterior_process(const BayesMarket& bm, const Rational& t) {
    const std::size_t n = bm.model.outcome_count();
    std::vector<RandomVariable> out(bm.setup.thetas.size(), RandomVariable(n));
    for (const auto& pb : posterior(bm, t))
        for (std::size_t j = 0; j < out.size(); ++j)
            for (std::size_t w : pb.block) out[j][w] = pb.distribution[j];
    return out;
}

std::vector<RandomVariable> option_price_path(const MarketModel& model, const OptionGridSpec& spec) {
    check_spec(model, spec);
    auto schedule = trading_schedule(model, spec);
    std::vector<RandomVariable> path;
    for (const auto& t : model.grid) {
        auto it = std::find_if(schedule.begin(), schedule.end(), [&](const auto& e) { return e.first >= t; });
        path.push_back(it->second);
    }
    return path;
}

MarketModel embed_semistatic(const MarketModel& model, const std::vector<OptionGridSpec>& specs) {
    market::require_valid(model);
    MarketModel out = model;
    AssetSet options;
    bool adapted = true;
    for (const auto& spec : specs) {
        auto path = option_price_path(model, spec);
        for (std::size_t k = 0; k < path.size(); ++k)
            adapted = adapted && model.big_filtration.at(model.grid[k]).measurable(path[k]);
        options.push_back(out.assets.size());
        out.assets.push_back(spec.name);
        out.prices.push_back(std::move(path));
    }
    if (!adapted) out.big_filtration = Filtration::discrete(model.outcome_count(), model.grid);
    if (options.empty()) return out;
    for (std::size_t j = 0; j < model.admissible_sets.size(); ++j) {
        out.admissible_sets.push_back(market::set_union(model.admissible_sets[j], options));
        out.trading_filtrations.push_back(model.trading_filtrations[j]);
    }
    return out;
}

Rational semistatic_direct_price(const MarketModel& model, const std::vector<OptionGridSpec>& specs,
                                 const RandomVariable& claim) {
    market::require_valid(model);
    AssetSet all;
    for (const auto& s : model.admissible_sets) all = market::set_union(all, s);
    const auto& f = model.filtration_of(all);
    auto cols = market::payoff_columns(market::enumerate_generators(model, market::Mode::free));
    for (const auto& spec : specs) {
        check_spec(model, spec);
        auto schedule = trading_schedule(model, spec);
        for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
            const auto& [t, now] = schedule[k];
            const auto& later = schedule[k + 1].second;
            const Partition part = f.at(t);
            for (const auto& block : part.blocks()) {
                RandomVariable col(model.outcome_count(), Rational(0));
                bool zero = true;
                for (std::size_t w : block) {
                    col[w] = later[w] - now[w];
                    zero = zero && col[w] == 0;
                }
                if (!zero) cols.push_back(std::move(col));
            }
        }
    }
    return hedging::superhedge_columns(cols, claim, market::Mode::free).primal_value;
}

OptionGridSpec uncertainty_swap(const BayesMarket& bm, const std::string& name,
                                const std::vector<Rational>& payoff_by_theta, const Rational& price) {
    if (!bm.theta_of) throw std::invalid_argument("uncertainty swap needs the parameter as an outcome coordinate");
    if (payoff_by_theta.size() != bm.setup.thetas.size())
        throw std::invalid_argument("uncertainty swap: one payoff per parameter required");
    const std::size_t n = bm.model.outcome_count();
    OptionGridSpec spec{name, RandomVariable(n), {bm.model.grid.front()}, {RandomVariable(n, price)}};
    for (std::size_t w = 0; w < n; ++w) spec.payoff[w] = payoff_by_theta[(*bm.theta_of)[w]];
    return spec;
}

UncertainPriceMarket build_uncertain_price(const MarketModel& base, const NoiseSpec& noise,
                                           const UncertainPriceOptions& options) {
    market::require_valid(base);
    check_noise(noise);
    UncertainPriceMarket out;
    if (noise.mean() != 0) out.warnings.push_back("noise mean is " + to_string(noise.mean()) + ", not zero");

    const auto& grid = base.grid;
    std::vector<Rational> times = options.noise_times ? *options.noise_times : grid;
    for (const auto& t : times)
        if (!contains(grid, t)) throw std::invalid_argument("noise time " + to_string(t) + " is not a grid time");
    const std::size_t assets = base.assets.size();
    const std::size_t slots = times.size() * assets;
    const std::size_t radix = noise.values.size();
    const std::size_t total = combination_count(radix, slots, base.outcome_count());
    const std::size_t per_base = total / base.outcome_count();

    std::vector<std::string> labels;
    std::vector<Rational> probs;
    std::vector<std::size_t> base_of;
    std::vector<std::vector<std::size_t>> noise_of;
    for (std::size_t b = 0; b < base.outcome_count(); ++b)
        for (std::size_t code = 0; code < per_base; ++code) {
            auto d = digits(code, radix, slots);
            Rational mass = base.space.probs()[b];
            for (std::size_t s : d) mass *= noise.probs[s];
            labels.push_back(base.space.outcomes()[b] + "|" + join_digits(d));
            probs.push_back(mass);
            base_of.push_back(b);
            noise_of.push_back(std::move(d));
        }
    const std::size_t n = labels.size();

    auto& m = out.model;
    m.space = FiniteSpace(labels, probs);
    m.grid = grid;
    m.assets = base.assets;
    std::vector<std::vector<RandomVariable>> lifted_y;
    for (std::size_t i = 0; i < assets; ++i) {
        std::vector<RandomVariable> y_path, s_path;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            RandomVariable y(n), s(n);
            auto slot = std::find(times.begin(), times.end(), grid[k]);
            for (std::size_t w = 0; w < n; ++w) {
                y[w] = base.prices[i][k][base_of[w]];
                s[w] = y[w];
                if (slot != times.end())
                    s[w] += noise.values[noise_of[w][static_cast<std::size_t>(slot - times.begin()) * assets + i]];
            }
            y_path.push_back(std::move(y));
            s_path.push_back(std::move(s));
        }
        lifted_y.push_back(std::move(y_path));
        m.prices.push_back(std::move(s_path));
    }

    std::vector<Partition> g_parts;
    for (const auto& t : grid) {
        Partition y_part = base.big_filtration.at(t);
        std::vector<RandomVariable> keys(1, RandomVariable(n));
        for (std::size_t w = 0; w < n; ++w) keys[0][w] = static_cast<long>(y_part.block_of(base_of[w]));
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (times[k] > t) continue;
            for (std::size_t i = 0; i < assets; ++i) {
                RandomVariable z(n);
                for (std::size_t w = 0; w < n; ++w) z[w] = static_cast<long>(noise_of[w][k * assets + i]);
                keys.push_back(std::move(z));
            }
        }
        g_parts.push_back(Partition::generated_by(n, keys));
    }
    m.big_filtration = Filtration(grid, std::move(g_parts));

    Filtration f = Filtration::trivial(n, grid);
    if (options.source != ObservationSource::none) {
        std::vector<std::vector<RandomVariable>> observed;
        for (std::size_t i = 0; i < assets; ++i) {
            if (options.source == ObservationSource::base) {
                observed.push_back(lifted_y[i]);
                continue;
            }
            std::vector<RandomVariable> path;
            for (const auto& s : m.prices[i]) {
                RandomVariable o(n);
                for (std::size_t w = 0; w < n; ++w) o[w] = quantize(s[w], options.quantizer);
                path.push_back(std::move(o));
            }
            observed.push_back(std::move(path));
        }
        f = Filtration::natural(n, grid, observed);
    }
    AssetSet all(assets);
    for (std::size_t i = 0; i < assets; ++i) all[i] = i;
    m.admissible_sets = {all};
    m.trading_filtrations = {std::move(f)};
    return out;
}

FreeLunchTruncation free_lunch_truncation(std::size_t n) {
    if (n < 1 || n > 16) throw std::length_error("free lunch truncation needs 1 <= n <= 16");
    const std::size_t size = std::size_t{1} << n;
    std::vector<std::string> labels;
    for (std::size_t w = 0; w < size; ++w) {
        std::string bits;
        for (std::size_t k = 1; k <= n; ++k) bits += (w >> (n - k) & 1) ? '1' : '0';
        labels.push_back(bits);
    }
    auto bit = [&](std::size_t w, std::size_t k) { return (w >> (n - k) & 1) == 1; };

    FreeLunchTruncation out;
    auto& m = out.model;
    m.space = FiniteSpace::uniform(labels);
    m.grid = {Rational(0), Rational(1)};
    m.big_filtration = Filtration(m.grid, {Partition::trivial(size), Partition::discrete(size)});
    auto& diag = out.diagnostics;
    diag.n = n;
    diag.g.assign(size, Rational(0));
    AssetSet all;
    for (std::size_t k = 1; k <= n; ++k) {
        Rational b(1, 1);
        b /= Rational(mpz_class(1) << static_cast<mp_bitcnt_t>(k));
        Rational a = 2 - 2 * b;
        RandomVariable f(size, Rational(0));
        for (std::size_t w = 0; w < size; ++w) {
            bool alive = true;
            for (std::size_t j = 1; j < k; ++j) alive = alive && bit(w, j);
            if (!alive) continue;
            f[w] = bit(w, k) ? Rational(-b) : a;
            diag.g[w] += f[w];
        }
        m.assets.push_back("f" + std::to_string(k));
        m.prices.push_back({RandomVariable(size, Rational(0)), std::move(f)});
        all.push_back(k - 1);
    }
    m.admissible_sets = {all};
    m.trading_filtrations = {Filtration::trivial(size, m.grid)};

    const Rational p = Rational(1) / Rational(mpz_class(size));
    diag.minimum = *std::min_element(diag.g.begin(), diag.g.end());
    for (const auto& g : diag.g) {
        Rational capped = g < 1 ? g : Rational(1);
        diag.gap += p * abs(Rational(1 - capped));
        if (g >= 1) diag.prob_at_least_one += p;
    }
    return out;
}

}  // namespace platonic::bayes
