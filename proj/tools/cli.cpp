#include "cli.hpp"

#include "platonic/instances.hpp"
#include "scenario_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <random>
#include <sstream>

namespace platonic::cli {

using io::json;
using market::Mode;
using prob::RandomVariable;

namespace {

struct Settings {
    lp::SolveOptions solve;
    bool table = false;
    unsigned seed = 1;
    bool long_only = false;
    std::string scenario;
    std::string claim;
    std::string set;
    std::string measure = "search";
    std::string report;
    std::string out;
    std::size_t max_n = 10;
    std::size_t count = 200;
};

bool exact(const Settings& s) { return s.solve.arithmetic == lp::Arithmetic::exact; }

// Exact values stay exact strings; float values become JSON numbers.
json num(const Rational& x, const Settings& s) {
    if (exact(s)) return to_string(x);
    return to_double(x);
}

json nums(const std::vector<Rational>& xs, const Settings& s) {
    json out = json::array();
    for (const auto& x : xs) out.push_back(num(x, s));
    return out;
}

Rational max_abs(const std::vector<Rational>& xs) {
    Rational m = 0;
    for (const auto& x : xs) m = std::max(m, abs(x));
    return m;
}

json asset_names(const market::MarketModel& m, const market::AssetSet& set) {
    json out = json::array();
    for (std::size_t i : set) out.push_back(m.assets[i]);
    return out;
}

json strategy_json(const market::MarketModel& m, const market::Strategy& st, const Settings& s) {
    json legs = json::array();
    for (const auto& leg : st.legs) {
        json holdings = json::object();
        for (std::size_t p = 0; p < st.asset_set.size(); ++p)
            holdings[m.assets[st.asset_set[p]]] = nums(leg.holdings[p], s);
        legs.push_back({{"from", to_string(m.grid[leg.from])}, {"to", to_string(m.grid[leg.to])}, {"holdings", holdings}});
    }
    return {{"assets", asset_names(m, st.asset_set)}, {"sign_constraint", market::to_string(st.sign_constraint)},
            {"legs", legs}};
}

json measure_json(const ftap::MeasureCertificate& cert, const Settings& s) {
    Rational total = 0;
    for (const auto& q : cert.q) total += q;
    Rational worst = 0;
    for (const auto& e : cert.generator_expectations)
        worst = std::max(worst, cert.kind == ftap::Kind::martingale ? abs(e) : e);
    return {{"kind", ftap::to_string(cert.kind)},
            {"q", nums(cert.q, s)},
            {"min_mass", num(cert.min_mass, s)},
            {"full_support", cert.full_support()},
            {"residuals", {{"total_mass", num(abs(Rational(total - 1)), s)}, {"generator_expectation", num(worst, s)}}}};
}

json arbitrage_json(const market::MarketModel& m, const ftap::ArbitrageCertificate& cert, const Settings& s) {
    auto terminal = market::wealth_process(m, cert.strategy).back();
    RandomVariable diff(terminal.size());
    Rational mass = 0;
    for (std::size_t w = 0; w < terminal.size(); ++w) {
        diff[w] = terminal[w] - cert.terminal_gain[w] - cert.consumption[w];
        mass += m.space.probs()[w] * cert.terminal_gain[w];
    }
    return {{"strategy", strategy_json(m, cert.strategy, s)},
            {"lambda", nums(cert.lambda, s)},
            {"terminal_gain", nums(cert.terminal_gain, s)},
            {"consumption", nums(cert.consumption, s)},
            {"residuals",
             {{"wealth", num(max_abs(diff), s)},
              {"min_gain", num(*std::min_element(cert.terminal_gain.begin(), cert.terminal_gain.end()), s)},
              {"expected_gain", num(mass, s)}}}};
}

const RandomVariable& claim_of(const io::Scenario& sc, const std::string& name) {
    auto it = sc.claims.find(name);
    if (it == sc.claims.end()) throw std::invalid_argument("unknown claim \"" + name + "\"");
    return it->second;
}

market::AssetSet parse_set(const market::MarketModel& m, const std::string& text) {
    market::AssetSet set;
    std::stringstream ss(text);
    for (std::string name; std::getline(ss, name, ',');) {
        auto it = std::find(m.assets.begin(), m.assets.end(), name);
        if (it == m.assets.end()) throw std::invalid_argument("unknown asset \"" + name + "\"");
        set.push_back(static_cast<std::size_t>(it - m.assets.begin()));
    }
    std::sort(set.begin(), set.end());
    return set;
}

json header(const std::string& command, const io::Scenario& sc, const Settings& s) {
    json r{{"command", command}, {"mode", exact(s) ? "exact" : "float"}, {"outcomes", sc.model.space.outcomes()}};
    if (!sc.notes.empty()) r["notes"] = sc.notes;
    return r;
}

json cmd_validate(const io::Scenario& sc, const Settings& s, int& code) {
    json r = header("validate", sc, s);
    auto violations = market::validate(sc.model);
    r["valid"] = violations.empty();
    r["violations"] = json::array();
    for (const auto& v : violations) r["violations"].push_back({{"invariant", v.invariant}, {"detail", v.detail}});
    r["assets"] = sc.model.assets;
    r["grid"] = nums(sc.model.grid, {});
    r["admissible_sets"] = json::array();
    for (const auto& set : sc.model.admissible_sets) r["admissible_sets"].push_back(asset_names(sc.model, set));
    if (!violations.empty()) code = invalid_model;
    return r;
}

json cmd_ftap(const io::Scenario& sc, const Settings& s) {
    Mode mode = s.long_only ? Mode::long_only : Mode::free;
    auto v = ftap::ftap_verdict(sc.model, mode, s.solve);
    json r = header("ftap", sc, s);
    r["strategies"] = market::to_string(mode);
    r["verdict"] = v.arbitrage ? "ARBITRAGE" : "NO_ARBITRAGE";
    if (v.arbitrage_certificate) r["arbitrage"] = arbitrage_json(sc.model, *v.arbitrage_certificate, s);
    if (v.measure_certificate) r["measure"] = measure_json(*v.measure_certificate, s);
    return r;
}

std::vector<Rational> measure_from_report(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw io::ScenarioError(path, "cannot open report");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw io::ScenarioError(path, e.what());
    }
    if (!doc.contains("measure") || !doc["measure"].contains("q"))
        throw io::ScenarioError(path + "#/measure/q", "report has no measure");
    std::vector<Rational> q;
    for (std::size_t w = 0; w < doc["measure"]["q"].size(); ++w)
        q.push_back(io::parse_rational_json(doc["measure"]["q"][w], path + "#/measure/q/" + std::to_string(w)));
    if (q.size() != n) throw io::ScenarioError(path + "#/measure/q", "measure has wrong length");
    return q;
}

json cmd_project(const io::Scenario& sc, const Settings& s) {
    market::require_valid(sc.model);
    Mode mode = s.long_only ? Mode::long_only : Mode::free;
    auto kind = ftap::kind_for(mode);
    auto set = s.set.empty() ? sc.model.admissible_sets.back() : parse_set(sc.model, s.set);
    if (!sc.model.set_index(set)) throw std::invalid_argument("asset set is not admissible");
    ftap::MeasureCertificate cert;
    if (s.measure == "search") {
        auto found = ftap::find_measure(sc.model, kind, s.solve);
        if (!found) throw hedging::UnpricedMarket("no full-support " + ftap::to_string(kind) + " measure exists");
        cert = *found;
    } else if (s.measure == "from-report") {
        if (s.report.empty()) throw std::invalid_argument("--measure from-report needs --report FILE");
        auto cols = market::payoff_columns(market::enumerate_generators(sc.model, mode));
        cert = ftap::make_measure_certificate(cols, measure_from_report(s.report, sc.model.outcome_count()), kind,
                                              s.solve.arithmetic);
    } else {
        throw std::invalid_argument("--measure must be from-report or search");
    }
    auto proj = ftap::project_prices(sc.model, cert, set, s.solve.tolerance);
    json r = header("project", sc, s);
    r["set"] = asset_names(sc.model, set);
    r["measure"] = measure_json(cert, s);
    r["projections"] = json::object();
    for (std::size_t p = 0; p < set.size(); ++p) {
        json path = json::array();
        for (const auto& x : proj[p]) path.push_back(nums(x, s));
        r["projections"][sc.model.assets[set[p]]] = path;
    }
    r["check"] = ftap::to_string(kind) + " property holds on non-null blocks";
    return r;
}

json cmd_superhedge(const io::Scenario& sc, const Settings& s) {
    Mode mode = s.long_only ? Mode::long_only : Mode::free;
    const auto& f = claim_of(sc, s.claim);
    auto res = hedging::superreplicate(sc.model, f, mode, s.solve);
    json r = header("superhedge", sc, s);
    r["claim"] = s.claim;
    r["strategies"] = market::to_string(mode);
    r["price"] = num(res.hedge.price, s);
    r["hedge"] = {{"lambda", nums(res.hedge.lambda, s)},
                  {"strategy", strategy_json(sc.model, res.hedge.strategy, s)},
                  {"surplus", nums(res.hedge.surplus, s)}};
    r["dual"] = measure_json(res.dual, s);
    Rational min_surplus = *std::min_element(res.hedge.surplus.begin(), res.hedge.surplus.end());
    r["residuals"] = {{"duality_gap", num(abs(res.duality_gap), s)},
                      {"complementary_slackness", num(abs(res.hedge.complementary_slackness), s)},
                      {"negative_surplus", num(min_surplus < 0 ? Rational(-min_surplus) : Rational(0), s)}};
    return r;
}

json cmd_interval(const io::Scenario& sc, const Settings& s) {
    const auto& f = claim_of(sc, s.claim);
    auto iv = hedging::price_interval(sc.model, f, s.solve);
    json r = header("interval", sc, s);
    r["claim"] = s.claim;
    r["lower"] = num(iv.lower, s);
    r["upper"] = num(iv.upper, s);
    r["attainable"] = iv.attainable();
    r["lower_attained_full_support"] = iv.lower_attained_full_support;
    r["upper_attained_full_support"] = iv.upper_attained_full_support;
    if (iv.replication) r["replication"] = {{"price", num(iv.replication->price, s)}, {"lambda", nums(iv.replication->lambda, s)}};
    if (iv.openness) {
        const auto& w = *iv.openness;
        r["openness"] = {{"boundary_optimum", nums(w.boundary_optimum, s)},
                         {"null_outcome", sc.model.space.outcomes()[w.null_outcome]},
                         {"full_support_measure", nums(w.full_support_measure, s)},
                         {"weight", num(w.weight, s)},
                         {"eta", num(w.eta, s)},
                         {"value", num(w.value, s)}};
    }
    return r;
}

json cmd_check_duality(const io::Scenario& sc, const Settings& s) {
    market::require_valid(sc.model);
    if (ftap::ftap_verdict(sc.model, Mode::free, s.solve).arbitrage)
        throw hedging::UnpricedMarket("market admits arbitrage; duality is not defined");
    const std::size_t n = sc.model.outcome_count();
    auto cols = market::payoff_columns(market::enumerate_generators(sc.model, Mode::free));
    std::optional<std::vector<std::vector<Rational>>> vertices;
    if (n <= 12) vertices = lp::enumerate_vertices(hedging::dual_polytope(cols, n, ftap::Kind::martingale));

    json r = header("check-duality", sc, s);
    r["rows"] = json::array();
    bool all = true;
    for (const auto& [name, f] : sc.claims) {
        if (!s.claim.empty() && name != s.claim) continue;
        auto lp = hedging::superhedge_columns(cols, f, Mode::free, s.solve);
        json row{{"claim", name}, {"primal", num(lp.primal_value, s)}, {"dual", num(lp.dual_value, s)},
                 {"gap", num(abs(Rational(lp.primal_value - lp.dual_value)), s)}};
        if (vertices) {
            Rational best = prob::expectation(f, vertices->front());
            for (const auto& v : *vertices) best = std::max(best, prob::expectation(f, v));
            bool agree = exact(s) ? best == lp.dual_value : to_double(abs(Rational(best - lp.dual_value))) <= 1e-8;
            row["vertex_max"] = num(best, s);
            row["vertex_agrees"] = agree;
            all = all && agree;
        }
        r["rows"].push_back(std::move(row));
    }
    if (vertices) r["vertices"] = vertices->size();
    r["consistent"] = all;
    if (!all) throw std::logic_error("vertex oracle disagrees with the dual LP");
    return r;
}

json cmd_bayes_build(const io::Scenario& sc, const Settings& s) {
    if (s.out.empty()) throw std::invalid_argument("bayes build needs --out FILE");
    market::require_valid(sc.model);
    std::ofstream file(s.out);
    if (!file) throw std::runtime_error("cannot write " + s.out);
    file << std::setw(2) << io::to_json(sc.model, sc.claims) << "\n";

    json r = header("bayes build", sc, s);
    r["written"] = s.out;
    r["outcome_count"] = sc.model.outcome_count();
    if (sc.bayes && sc.bayes->theta_of) {
        r["thetas"] = sc.bayes->setup.thetas;
        r["posterior"] = json::array();
        for (const auto& t : sc.model.grid) {
            json blocks = json::array();
            for (const auto& pb : bayes::posterior(*sc.bayes, t)) {
                json labels = json::array();
                for (std::size_t w : pb.block) labels.push_back(sc.model.space.outcomes()[w]);
                blocks.push_back({{"block", labels}, {"distribution", nums(pb.distribution, {})}});
            }
            r["posterior"].push_back({{"time", to_string(t)}, {"blocks", blocks}});
        }
    }
    return r;
}

json cmd_free_lunch(const Settings& s) {
    std::vector<std::future<bayes::FreeLunchTruncation>> jobs;
    for (std::size_t n = 1; n <= s.max_n; ++n)
        jobs.push_back(std::async(std::launch::async, [n] { return bayes::free_lunch_truncation(n); }));
    json r{{"command", "experiment free-lunch"}, {"mode", exact(s) ? "exact" : "float"}, {"rows", json::array()}};
    Rational previous = 0;
    bool decreasing = true, viable = true;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        auto fl = jobs[k].get();
        bool arbitrage = ftap::ftap_verdict(fl.model, Mode::free, s.solve).arbitrage;
        const auto& d = fl.diagnostics;
        if (k) decreasing = decreasing && d.gap < previous;
        viable = viable && !arbitrage;
        previous = d.gap;
        r["rows"].push_back({{"n", d.n},
                             {"verdict", arbitrage ? "ARBITRAGE" : "NO_ARBITRAGE"},
                             {"d_n", to_string(d.gap)},
                             {"d_n_float", to_double(d.gap)},
                             {"P(g>=1)", to_string(d.prob_at_least_one)},
                             {"min_g", to_string(d.minimum)}});
    }
    r["strictly_decreasing"] = decreasing;
    r["all_no_arbitrage"] = viable;
    return r;
}

json cmd_ftap_suite(const Settings& s) {
    Mode mode = s.long_only ? Mode::long_only : Mode::free;
    std::mt19937 rng(s.seed);
    std::size_t arbitrage = 0, viable = 0;
    for (std::size_t k = 0; k < s.count; ++k) {
        auto m = instances::random_market(rng);
        if (ftap::ftap_verdict(m, mode, s.solve).arbitrage) ++arbitrage;
        else ++viable;
    }
    return {{"command", "experiment ftap-suite"}, {"mode", exact(s) ? "exact" : "float"},
            {"strategies", market::to_string(mode)}, {"seed", s.seed}, {"instances", s.count},
            {"arbitrage", arbitrage}, {"no_arbitrage", viable}, {"inconsistencies", 0}};
}

// Flat "key  value" lines; "rows" become a table.
void flatten(const json& value, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& lines) {
    if (value.is_object()) {
        for (const auto& [k, v] : value.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, lines);
    } else if (value.is_array() && std::any_of(value.begin(), value.end(), [](const json& x) { return x.is_structured(); })) {
        for (std::size_t k = 0; k < value.size(); ++k) flatten(value[k], prefix + "[" + std::to_string(k) + "]", lines);
    } else if (value.is_array()) {
        std::string text = "(";
        for (std::size_t k = 0; k < value.size(); ++k)
            text += (k ? ", " : "") + (value[k].is_string() ? value[k].get<std::string>() : value[k].dump());
        lines.emplace_back(prefix, text + ")");
    } else {
        lines.emplace_back(prefix, value.is_string() ? value.get<std::string>() : value.dump());
    }
}

void print_table(const json& report, std::ostream& out) {
    json rest = report;
    if (report.contains("rows") && !report["rows"].empty()) {
        rest.erase("rows");
        std::vector<std::string> columns;
        for (const auto& [k, v] : report["rows"][0].items()) columns.push_back(k);
        std::vector<std::vector<std::string>> cells;
        std::vector<std::size_t> width;
        for (const auto& c : columns) width.push_back(c.size());
        for (const auto& row : report["rows"]) {
            std::vector<std::string> line;
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const json& x = row.contains(columns[c]) ? row[columns[c]] : json("");
                line.push_back(x.is_string() ? x.get<std::string>() : x.dump());
                width[c] = std::max(width[c], line.back().size());
            }
            cells.push_back(std::move(line));
        }
        for (std::size_t c = 0; c < columns.size(); ++c) out << std::left << std::setw(int(width[c] + 2)) << columns[c];
        out << "\n";
        for (const auto& line : cells) {
            for (std::size_t c = 0; c < columns.size(); ++c) out << std::left << std::setw(int(width[c] + 2)) << line[c];
            out << "\n";
        }
    }
    std::vector<std::pair<std::string, std::string>> lines;
    flatten(rest, "", lines);
    std::size_t w = 0;
    for (const auto& [k, v] : lines) w = std::max(w, k.size());
    for (const auto& [k, v] : lines) out << std::left << std::setw(int(w + 2)) << k << v << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Finite platonic market toolkit: arbitrage, super-replication and scenario builders"};
    app.require_subcommand(1);
    app.fallthrough();
    bool use_float = false, use_exact = false, use_json = false;
    app.add_flag("--exact", use_exact, "Exact rational arithmetic (default)");
    app.add_flag("--float", use_float, "Double-precision arithmetic with tolerance --tol")->excludes("--exact");
    app.add_option("--tol", s.solve.tolerance, "Float-mode tolerance")->capture_default_str();
    app.add_option("--seed", s.seed, "Seed for randomized suites")->capture_default_str();
    app.add_flag("--json", use_json, "JSON report (default)");
    app.add_flag("--table", s.table, "Plain-text report")->excludes("--json");
    std::string save;
    app.add_option("--save", save, "Also write the JSON report to this file");

    auto scenario = [&](CLI::App* sub) { sub->add_option("scenario", s.scenario, "Scenario file")->required(); };
    auto* validate = app.add_subcommand("validate", "Check every model invariant");
    scenario(validate);
    auto* ftap_cmd = app.add_subcommand("ftap", "Arbitrage verdict with certificate");
    scenario(ftap_cmd);
    ftap_cmd->add_flag("--long-only", s.long_only, "Long-only strategies vs supermartingale measures");
    auto* project = app.add_subcommand("project", "Optional projections of prices under a measure");
    scenario(project);
    project->add_option("--set", s.set, "Comma-separated admissible asset set (default: largest)");
    project->add_option("--measure", s.measure, "from-report or search")->capture_default_str();
    project->add_option("--report", s.report, "Report holding the measure for --measure from-report");
    project->add_flag("--long-only", s.long_only, "Supermartingale measure");
    auto* superhedge = app.add_subcommand("superhedge", "Cheapest super-replication and dual measure");
    scenario(superhedge);
    superhedge->add_option("--claim", s.claim, "Claim name")->required();
    superhedge->add_flag("--long-only", s.long_only, "Long-only strategies");
    auto* interval = app.add_subcommand("interval", "Arbitrage-free price interval");
    scenario(interval);
    interval->add_option("--claim", s.claim, "Claim name")->required();
    auto* duality = app.add_subcommand("check-duality", "Primal, dual and vertex values for every claim");
    scenario(duality);
    duality->add_option("--claim", s.claim, "Only this claim");
    auto* bayes_cmd = app.add_subcommand("bayes", "Scenario builders");
    bayes_cmd->require_subcommand(1);
    auto* build = bayes_cmd->add_subcommand("build", "Expand builder sections into an explicit scenario");
    scenario(build);
    build->add_option("--out", s.out, "Output scenario file")->required();
    auto* experiment = app.add_subcommand("experiment", "Parameter sweeps");
    experiment->require_subcommand(1);
    auto* free_lunch = experiment->add_subcommand("free-lunch", "Gap d_n of the truncated free-lunch family");
    free_lunch->add_option("--max-n", s.max_n, "Largest n (1..16)")->capture_default_str()->check(CLI::Range(1, 16));
    auto* suite = experiment->add_subcommand("ftap-suite", "Verdicts on random markets");
    suite->add_option("--count", s.count, "Number of markets")->capture_default_str();
    suite->add_flag("--long-only", s.long_only, "Long-only strategies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? ok : parse_error;
    }
    if (use_float) s.solve.arithmetic = lp::Arithmetic::floating;

    auto start = std::chrono::steady_clock::now();
    int code = ok;
    json report;
    try {
        if (*free_lunch) {
            report = cmd_free_lunch(s);
        } else if (*suite) {
            report = cmd_ftap_suite(s);
        } else {
            auto sc = io::load_scenario(s.scenario);
            if (*validate) report = cmd_validate(sc, s, code);
            else if (*ftap_cmd) report = cmd_ftap(sc, s);
            else if (*project) report = cmd_project(sc, s);
            else if (*superhedge) report = cmd_superhedge(sc, s);
            else if (*interval) report = cmd_interval(sc, s);
            else if (*duality) report = cmd_check_duality(sc, s);
            else report = cmd_bayes_build(sc, s);
        }
    } catch (const io::ScenarioError& e) {
        err << "error: " << e.what() << "\n";
        return parse_error;
    } catch (const market::InvalidModel& e) {
        err << "invalid model:\n";
        for (const auto& v : e.violations()) err << "  " << v.invariant << ": " << v.detail << "\n";
        return invalid_model;
    } catch (const ftap::FtapInconsistency& e) {
        err << "FTAP inconsistency: " << e.what() << "\n";
        return inconsistency;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return domain_error;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << "\n";
        return domain_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return parse_error;
    } catch (const std::logic_error& e) {
        err << "internal inconsistency: " << e.what() << "\n";
        return inconsistency;
    } catch (const std::runtime_error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return domain_error;
    }
    report["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!save.empty()) {
        std::ofstream file(save);
        if (!file) {
            err << "error: cannot write " << save << "\n";
            return parse_error;
        }
        file << std::setw(2) << report << "\n";
    }
    if (s.table) print_table(report, out);
    else out << std::setw(2) << report << "\n";
    return code;
}

}  // namespace platonic::cli
