#pragma once

#include "platonic/hedging.hpp"
#include "platonic/market.hpp"

#include <optional>
#include <string>
#include <vector>

// Scenario builders: parameter uncertainty, noisy and delayed observation,
// semi-static option trading, and a family of near free lunches.
namespace platonic::bayes {

using market::MarketModel;
using prob::Filtration;
using prob::RandomVariable;

/// Prices on the path space D, indexed [asset][time].
struct PathMarket {
    std::vector<Rational> grid;
    std::vector<std::string> assets;
    std::vector<std::vector<RandomVariable>> prices;
};

/**
 * Finite parameter set Theta with prior nu and one path distribution P^theta
 * per parameter. Individual P^theta may vanish on some paths; the prior must
 * be strictly positive.
 */
struct BayesSetup {
    std::vector<std::string> paths;
    Filtration path_filtration;
    std::vector<std::string> thetas;
    std::vector<Rational> prior;
    std::vector<std::vector<Rational>> theta_models;
};

/// Finite noise alphabet; drawn independently at every use.
struct NoiseSpec {
    std::vector<Rational> values;
    std::vector<Rational> probs;

    Rational mean() const;
};

/**
 * What traders see. Observations are taken at `times` (default: every grid
 * time), rounded to multiples of quantizer[i] when that step is positive,
 * perturbed by independent noise when given, and arrive `delay` late.
 */
struct ObservationSpec {
    std::optional<std::vector<Rational>> times{};
    std::vector<Rational> quantizer{};
    std::optional<NoiseSpec> noise{};
    Rational delay = 0;
};

/// Built market plus the coordinates of each outcome.
struct BayesMarket {
    MarketModel model;
    std::vector<std::size_t> path_of;
    /// Parameter index per outcome; absent for mixture markets.
    std::optional<std::vector<std::size_t>> theta_of;
    /// Labels of zero-mass (path, parameter) pairs or paths that were dropped.
    std::vector<std::string> pruned;
    BayesSetup setup;
};

struct BayesScenario {
    BayesSetup setup;
    PathMarket prices;
};

/// Two-step binomial paths uu, ud, du, dd on the grid 0, 1/2, 1 with
/// S = 1; (2, 2, 1/2, 1/2); (4, 1, 1, 1/4). Up probability 1/3 or 2/3 per
/// step, equal prior.
BayesScenario two_theta_binomial();

/// Outcomes D x Theta with P(d, theta) = P^theta(d) nu(theta), G = path
/// filtration with theta known from the start, F generated by observations.
BayesMarket build_product_market(const BayesSetup& setup, const PathMarket& prices, const ObservationSpec& obs);

/// Outcomes D under the mixture of the P^theta; theta is not an outcome
/// coordinate, so theta-dependent payoffs cannot be expressed.
BayesMarket build_mixture_market(const BayesSetup& setup, const PathMarket& prices, const ObservationSpec& obs);

struct PosteriorBlock {
    prob::Partition::Block block;
    std::vector<Rational> distribution;
};

/// nu_t(theta | B) for each block B of F_t. Product markets only.
std::vector<PosteriorBlock> posterior(const BayesMarket& market, const Rational& t);

/// nu_t(theta | .) as a random variable, one per parameter.
std::vector<RandomVariable> posterior_process(const BayesMarket& market, const Rational& t);

/**
 * Option j with terminal payoff f^j, tradable only at `trading_times` (a
 * subset of the grid) at the given prices. Between trading times its price
 * is the price at the next trading time, and at the last grid time it is
 * the payoff.
 */
struct OptionGridSpec {
    std::string name;
    RandomVariable payoff;
    std::vector<Rational> trading_times;
    std::vector<RandomVariable> prices;
};

/// Price path of an option on the model grid under the look-forward rule.
std::vector<RandomVariable> option_price_path(const MarketModel& model, const OptionGridSpec& spec);

/**
 * Adds one asset per option. G becomes the constant full-information
 * filtration when the look-forward prices are not G-adapted. Each admissible
 * set A gains a companion A + options trading under F^A.
 */
MarketModel embed_semistatic(const MarketModel& model, const std::vector<OptionGridSpec>& specs);

/// Super-replication price with explicit position variables per option
/// trading interval and block of the largest trading filtration.
Rational semistatic_direct_price(const MarketModel& model, const std::vector<OptionGridSpec>& specs,
                                 const RandomVariable& claim);

/// Theta-dependent terminal payoff sold at time zero for `price`, ready for
/// embed_semistatic.
OptionGridSpec uncertainty_swap(const BayesMarket& market, const std::string& name,
                                const std::vector<Rational>& payoff_by_theta, const Rational& price);

enum class ObservationSource { none, base, quantized_price };

struct UncertainPriceOptions {
    /// Noise times; default every grid time.
    std::optional<std::vector<Rational>> noise_times{};
    ObservationSource source = ObservationSource::base;
    Rational quantizer = 0;
};

struct UncertainPriceMarket {
    MarketModel model;
    std::vector<std::string> warnings;
};

/// S = Y + Z with Z independent noise per asset and noise time. Outcomes are
/// base outcomes times noise draws; G sees Y and the noise drawn so far.
UncertainPriceMarket build_uncertain_price(const MarketModel& base, const NoiseSpec& noise,
                                           const UncertainPriceOptions& options = {});

struct FreeLunchDiagnostics {
    std::size_t n = 0;
    /// E_P |1 - min(g_n, 1)| under the uniform reference measure.
    Rational gap;
    Rational prob_at_least_one;
    Rational minimum;
    RandomVariable g;
};

struct FreeLunchTruncation {
    MarketModel model;
    FreeLunchDiagnostics diagnostics;
};

/**
 * One-period market of n claims priced 0 on the 2^n bit strings. With
 * A_k = {first k bits are 1}, f_k = 1_{A_{k-1}} (a_k 1{bit k = 0} - b_k 1{bit k = 1}),
 * b_k = 2^-k and a_k = 2 - 2^(1-k). Then g_n = f_1 + ... + f_n is 1 off A_n
 * and -(1 - 2^-n) on A_n. Requires 1 <= n <= 16.
 */
FreeLunchTruncation free_lunch_truncation(std::size_t n);

}  // namespace platonic::bayes
