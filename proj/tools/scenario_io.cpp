#include "scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace platonic::io {

using market::AssetSet;
using prob::Filtration;
using prob::Partition;

namespace {

std::string at(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string at(const std::string& where, std::size_t index) { return where + "/" + std::to_string(index); }

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) throw ScenarioError(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioError(where, "missing field \"" + key + "\"");
    return *it;
}

const json& require_array(const json& value, const std::string& where) {
    if (!value.is_array()) throw ScenarioError(where, "expected an array");
    return value;
}

std::string require_string(const json& value, const std::string& where) {
    if (!value.is_string()) throw ScenarioError(where, "expected a string");
    return value.get<std::string>();
}

std::vector<std::string> string_list(const json& value, const std::string& where) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < require_array(value, where).size(); ++k)
        out.push_back(require_string(value[k], at(where, k)));
    return out;
}

std::vector<Rational> rational_list(const json& value, const std::string& where) {
    std::vector<Rational> out;
    for (std::size_t k = 0; k < require_array(value, where).size(); ++k)
        out.push_back(parse_rational_json(value[k], at(where, k)));
    return out;
}

// Outcome labels and named price paths the filtration forms may refer to.
struct Context {
    std::vector<std::string> labels;
    std::vector<Rational> grid;
    std::vector<std::string> asset_names;
    std::vector<std::vector<RandomVariable>> prices;

    std::size_t size() const { return labels.size(); }

    std::size_t outcome(const std::string& label, const std::string& where) const {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw ScenarioError(where, "unknown outcome \"" + label + "\"");
        return static_cast<std::size_t>(it - labels.begin());
    }

    std::size_t asset(const std::string& name, const std::string& where) const {
        auto it = std::find(asset_names.begin(), asset_names.end(), name);
        if (it == asset_names.end()) throw ScenarioError(where, "unknown asset \"" + name + "\"");
        return static_cast<std::size_t>(it - asset_names.begin());
    }
};

// Construction failures of partitions and filtrations are model errors, not
// syntax errors.
template <class F>
auto structural(const std::string& invariant, const std::string& where, F&& build) {
    try {
        return build();
    } catch (const prob::StructuralError& e) {
        throw market::InvalidModel({{invariant, where + ": " + e.what()}});
    }
}

RandomVariable values(const json& value, const Context& ctx, const std::string& where) {
    if (!value.is_array()) return RandomVariable(ctx.size(), parse_rational_json(value, where));
    if (value.size() != ctx.size())
        throw ScenarioError(where, "expected " + std::to_string(ctx.size()) + " values, got " +
                                       std::to_string(value.size()));
    return rational_list(value, where);
}

Partition parse_partition(const json& value, const Context& ctx, const std::string& where) {
    if (value.is_string()) {
        auto name = value.get<std::string>();
        if (name == "trivial") return Partition::trivial(ctx.size());
        if (name == "discrete") return Partition::discrete(ctx.size());
        throw ScenarioError(where, "unknown partition \"" + name + "\"");
    }
    std::vector<Partition::Block> blocks;
    for (std::size_t b = 0; b < require_array(value, where).size(); ++b) {
        Partition::Block block;
        for (std::size_t k = 0; k < require_array(value[b], at(where, b)).size(); ++k)
            block.push_back(ctx.outcome(require_string(value[b][k], at(at(where, b), k)), at(at(where, b), k)));
        blocks.push_back(std::move(block));
    }
    return structural("structure", where, [&] { return Partition(ctx.size(), std::move(blocks)); });
}

Filtration parse_filtration(const json& value, const Context& ctx, const std::string& where) {
    if (value.is_string()) {
        auto name = value.get<std::string>();
        if (name == "trivial") return Filtration::trivial(ctx.size(), ctx.grid);
        if (name == "discrete") return Filtration::discrete(ctx.size(), ctx.grid);
        throw ScenarioError(where, "unknown filtration \"" + name + "\"");
    }
    if (value.is_array()) {
        if (value.size() != ctx.grid.size())
            throw ScenarioError(where, "expected one partition per grid time");
        std::vector<Partition> parts;
        for (std::size_t k = 0; k < value.size(); ++k) parts.push_back(parse_partition(value[k], ctx, at(where, k)));
        return structural("refining", where, [&] { return Filtration(ctx.grid, std::move(parts)); });
    }
    if (!value.is_object()) throw ScenarioError(where, "expected a filtration");
    if (value.contains("natural")) {
        std::vector<std::vector<RandomVariable>> processes;
        auto names = string_list(value["natural"], at(where, "natural"));
        for (const auto& name : names) processes.push_back(ctx.prices[ctx.asset(name, at(where, "natural"))]);
        return Filtration::natural(ctx.size(), ctx.grid, processes);
    }
    if (value.contains("delayed")) {
        Filtration base = parse_filtration(value["delayed"], ctx, at(where, "delayed"));
        return prob::delayed_filtration(base, parse_rational_json(require(value, "by", where), at(where, "by")));
    }
    auto times = rational_list(require(value, "times", where), at(where, "times"));
    const auto& parts_json = require_array(require(value, "partitions", where), at(where, "partitions"));
    if (parts_json.size() != times.size()) throw ScenarioError(where, "expected one partition per time");
    std::vector<Partition> parts;
    for (std::size_t k = 0; k < parts_json.size(); ++k)
        parts.push_back(parse_partition(parts_json[k], ctx, at(at(where, "partitions"), k)));
    return structural("refining", where, [&] { return Filtration(times, std::move(parts)); });
}

// Prices as [asset][time], each time either one value per outcome or a constant.
void parse_assets(const json& value, Context& ctx, const std::string& where) {
    for (std::size_t i = 0; i < require_array(value, where).size(); ++i) {
        std::string w = at(where, i);
        ctx.asset_names.push_back(require_string(require(value[i], "name", w), at(w, "name")));
        const auto& path = require_array(require(value[i], "prices", w), at(w, "prices"));
        if (path.size() != ctx.grid.size()) throw ScenarioError(at(w, "prices"), "expected one entry per grid time");
        std::vector<RandomVariable> out;
        for (std::size_t k = 0; k < path.size(); ++k) out.push_back(values(path[k], ctx, at(at(w, "prices"), k)));
        ctx.prices.push_back(std::move(out));
    }
}

std::vector<Rational> parse_grid(const json& doc, const std::string& where) {
    auto grid = rational_list(require(doc, "grid", where), at(where, "grid"));
    if (grid.empty()) throw ScenarioError(at(where, "grid"), "grid is empty");
    return grid;
}

Scenario parse_explicit(const json& doc) {
    Context ctx;
    const auto& space = require(doc, "space", "");
    ctx.labels = string_list(require(space, "outcomes", "/space"), "/space/outcomes");
    ctx.grid = parse_grid(doc, "");
    parse_assets(require(doc, "assets", ""), ctx, "/assets");

    Scenario out;
    auto& m = out.model;
    m.space = structural("structure", "/space", [&] {
        if (!space.contains("probs")) return prob::FiniteSpace::uniform(ctx.labels);
        return prob::FiniteSpace(ctx.labels, rational_list(space["probs"], "/space/probs"));
    });
    m.grid = ctx.grid;
    m.assets = ctx.asset_names;
    m.prices = ctx.prices;
    m.big_filtration = doc.contains("big_filtration")
                           ? parse_filtration(doc["big_filtration"], ctx, "/big_filtration")
                           : Filtration::natural(ctx.size(), ctx.grid, ctx.prices);

    std::map<std::string, Filtration> named{{"default", m.big_filtration}};
    if (doc.contains("trading_filtrations")) {
        const auto& tf = doc["trading_filtrations"];
        if (!tf.is_object()) throw ScenarioError("/trading_filtrations", "expected an object of named filtrations");
        for (const auto& [name, spec] : tf.items())
            named[name] = parse_filtration(spec, ctx, "/trading_filtrations/" + name);
    }
    if (doc.contains("admissible_sets")) {
        const auto& sets = require_array(doc["admissible_sets"], "/admissible_sets");
        for (std::size_t j = 0; j < sets.size(); ++j) {
            std::string w = at("/admissible_sets", j);
            AssetSet set;
            for (const auto& name : string_list(require(sets[j], "assets", w), at(w, "assets")))
                set.push_back(ctx.asset(name, at(w, "assets")));
            std::sort(set.begin(), set.end());
            std::string fname = sets[j].contains("filtration") ? require_string(sets[j]["filtration"], at(w, "filtration"))
                                                               : "default";
            auto it = named.find(fname);
            if (it == named.end()) throw ScenarioError(at(w, "filtration"), "unknown filtration \"" + fname + "\"");
            m.admissible_sets.push_back(std::move(set));
            m.trading_filtrations.push_back(it->second);
        }
    } else {
        AssetSet all(m.assets.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        m.admissible_sets = {all};
        m.trading_filtrations = {m.big_filtration};
    }
    if (doc.value("close_under_unions", false)) m = market::close_under_unions(std::move(m));
    return out;
}

bayes::NoiseSpec parse_noise(const json& value, const std::string& where) {
    return {rational_list(require(value, "values", where), at(where, "values")),
            rational_list(require(value, "probs", where), at(where, "probs"))};
}

Scenario parse_bayes(const json& section) {
    const std::string where = "/bayes";
    Context ctx;
    ctx.labels = string_list(require(section, "paths", where), at(where, "paths"));
    ctx.grid = parse_grid(section, where);
    parse_assets(require(section, "assets", where), ctx, at(where, "assets"));

    bayes::BayesSetup setup;
    setup.paths = ctx.labels;
    setup.path_filtration = section.contains("path_filtration")
                                ? parse_filtration(section["path_filtration"], ctx, at(where, "path_filtration"))
                                : Filtration::natural(ctx.size(), ctx.grid, ctx.prices);
    setup.thetas = string_list(require(section, "thetas", where), at(where, "thetas"));
    setup.prior = rational_list(require(section, "prior", where), at(where, "prior"));
    const auto& models = require(section, "models", where);
    for (const auto& theta : setup.thetas)
        setup.theta_models.push_back(
            rational_list(require(models, theta, at(where, "models")), at(at(where, "models"), theta)));

    bayes::ObservationSpec obs;
    if (section.contains("observation")) {
        const auto& o = section["observation"];
        std::string w = at(where, "observation");
        if (o.contains("times")) obs.times = rational_list(o["times"], at(w, "times"));
        if (o.contains("quantizer")) obs.quantizer = rational_list(o["quantizer"], at(w, "quantizer"));
        if (o.contains("noise")) obs.noise = parse_noise(o["noise"], at(w, "noise"));
        if (o.contains("delay")) obs.delay = parse_rational_json(o["delay"], at(w, "delay"));
    }
    bayes::PathMarket pm{ctx.grid, ctx.asset_names, ctx.prices};
    std::string construction = section.value("construction", std::string("product"));
    if (construction != "product" && construction != "mixture")
        throw ScenarioError(at(where, "construction"), "expected \"product\" or \"mixture\"");

    Scenario out;
    out.bayes = construction == "product" ? bayes::build_product_market(setup, pm, obs)
                                          : bayes::build_mixture_market(setup, pm, obs);
    out.model = out.bayes->model;
    for (const auto& label : out.bayes->pruned) out.notes.push_back("pruned zero-mass outcome " + label);
    return out;
}

Scenario parse_free_lunch(const json& section) {
    const auto& n = require(section, "n", "/free_lunch");
    if (!n.is_number_unsigned()) throw ScenarioError("/free_lunch/n", "expected a positive integer");
    auto fl = bayes::free_lunch_truncation(n.get<std::size_t>());
    Scenario out;
    out.model = std::move(fl.model);
    out.free_lunch = std::move(fl.diagnostics);
    return out;
}

void apply_noise(Scenario& sc, const json& section) {
    const std::string where = "/noise";
    bayes::UncertainPriceOptions options;
    if (section.contains("times")) options.noise_times = rational_list(section["times"], at(where, "times"));
    std::string source = section.value("observe", std::string("base"));
    if (source == "none") options.source = bayes::ObservationSource::none;
    else if (source == "base") options.source = bayes::ObservationSource::base;
    else if (source == "quantized_price") options.source = bayes::ObservationSource::quantized_price;
    else throw ScenarioError(at(where, "observe"), "expected \"none\", \"base\" or \"quantized_price\"");
    if (section.contains("quantizer")) options.quantizer = parse_rational_json(section["quantizer"], at(where, "quantizer"));
    auto built = bayes::build_uncertain_price(sc.model, parse_noise(section, where), options);
    sc.model = std::move(built.model);
    sc.bayes.reset();
    for (auto& w : built.warnings) sc.notes.push_back(std::move(w));
}

Context model_context(const MarketModel& m) {
    return {m.space.outcomes(), m.grid, m.assets, m.prices};
}

RandomVariable parse_claim(const json& value, const Scenario& sc, const std::string& where) {
    Context ctx = model_context(sc.model);
    if (!value.is_object()) return values(value, ctx, where);
    for (const char* kind : {"call", "put"}) {
        if (!value.contains(kind)) continue;
        const auto& terminal = sc.model.prices[ctx.asset(require_string(value[kind], at(where, kind)), at(where, kind))].back();
        Rational strike = parse_rational_json(require(value, "strike", where), at(where, "strike"));
        RandomVariable out;
        for (const auto& s : terminal) {
            Rational x = std::string(kind) == "call" ? Rational(s - strike) : Rational(strike - s);
            out.push_back(x > 0 ? x : Rational(0));
        }
        return out;
    }
    if (value.contains("theta")) {
        if (!sc.bayes || !sc.bayes->theta_of) throw ScenarioError(where, "theta claims need a product bayes market");
        const auto& thetas = sc.bayes->setup.thetas;
        RandomVariable out;
        for (std::size_t j : *sc.bayes->theta_of)
            out.push_back(parse_rational_json(require(value["theta"], thetas[j], at(where, "theta")),
                                              at(at(where, "theta"), thetas[j])));
        return out;
    }
    if (value.contains("by_label")) {
        Rational fallback = value.contains("default") ? parse_rational_json(value["default"], at(where, "default")) : Rational(0);
        RandomVariable out(ctx.size(), fallback);
        for (const auto& [label, x] : value["by_label"].items())
            out[ctx.outcome(label, at(where, "by_label"))] = parse_rational_json(x, at(at(where, "by_label"), label));
        return out;
    }
    throw ScenarioError(where, "unknown claim form");
}

RandomVariable claim_or_name(const json& value, const Scenario& sc, const std::string& where) {
    if (value.is_string()) {
        auto it = sc.claims.find(value.get<std::string>());
        if (it != sc.claims.end()) return it->second;
    }
    return parse_claim(value, sc, where);
}

void apply_options(Scenario& sc, const json& section) {
    std::vector<bayes::OptionGridSpec> specs;
    Context ctx = model_context(sc.model);
    for (std::size_t j = 0; j < require_array(section, "/options").size(); ++j) {
        std::string w = at("/options", j);
        const auto& o = section[j];
        std::string name = require_string(require(o, "name", w), at(w, "name"));
        if (o.contains("theta_payoff")) {
            if (!sc.bayes) throw ScenarioError(w, "uncertainty swaps need a bayes market");
            std::vector<Rational> by_theta;
            for (const auto& theta : sc.bayes->setup.thetas)
                by_theta.push_back(parse_rational_json(require(o["theta_payoff"], theta, at(w, "theta_payoff")),
                                                       at(at(w, "theta_payoff"), theta)));
            specs.push_back(bayes::uncertainty_swap(*sc.bayes, name, by_theta,
                                                    parse_rational_json(require(o, "price", w), at(w, "price"))));
            continue;
        }
        bayes::OptionGridSpec spec{name, claim_or_name(require(o, "payoff", w), sc, at(w, "payoff")),
                                   rational_list(require(o, "trading_times", w), at(w, "trading_times")), {}};
        const auto& prices = require_array(require(o, "prices", w), at(w, "prices"));
        for (std::size_t k = 0; k < prices.size(); ++k)
            spec.prices.push_back(values(prices[k], ctx, at(at(w, "prices"), k)));
        specs.push_back(std::move(spec));
    }
    sc.model = bayes::embed_semistatic(sc.model, specs);
}

}  // namespace

Rational parse_rational_json(const json& value, const std::string& where) {
    try {
        if (value.is_string()) return parse_rational(value.get<std::string>());
        if (value.is_number_integer()) return Rational(value.get<long>());
        if (value.is_number_float()) return rational_from_double(value.get<double>());
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(where, e.what());
    }
    throw ScenarioError(where, "expected a rational (\"a/b\" string or number)");
}

json rational_json(const Rational& value) { return to_string(value); }

json partition_json(const Partition& part, const std::vector<std::string>& labels) {
    json out = json::array();
    for (const auto& block : part.blocks()) {
        json b = json::array();
        for (std::size_t w : block) b.push_back(labels[w]);
        out.push_back(std::move(b));
    }
    return out;
}

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ScenarioError("", "scenario must be a JSON object");
    const auto& version = require(doc, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != schema_version)
        throw ScenarioError("/schema_version", "unsupported schema version, expected 1");

    Scenario sc = doc.contains("bayes")        ? parse_bayes(doc["bayes"])
                  : doc.contains("free_lunch") ? parse_free_lunch(doc["free_lunch"])
                                               : parse_explicit(doc);
    if (doc.contains("noise")) apply_noise(sc, doc["noise"]);
    if (doc.contains("claims")) {
        const auto& claims = doc["claims"];
        if (!claims.is_object()) throw ScenarioError("/claims", "expected an object of named claims");
        for (const auto& [name, value] : claims.items()) sc.claims[name] = parse_claim(value, sc, "/claims/" + name);
    }
    if (doc.contains("options")) apply_options(sc, doc["options"]);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path, "cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line:column.
        std::size_t line = 1, column = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ScenarioError(path + ":" + std::to_string(line) + ":" + std::to_string(column), e.what());
    }
    try {
        return parse_scenario(doc);
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + "#" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
    }
}

json to_json(const MarketModel& m, const std::map<std::string, RandomVariable>& claims) {
    const auto& labels = m.space.outcomes();
    auto values_json = [](const RandomVariable& x) {
        json out = json::array();
        for (const auto& v : x) out.push_back(rational_json(v));
        return out;
    };
    auto filtration_json = [&](const Filtration& f) {
        json out{{"times", json::array()}, {"partitions", json::array()}};
        for (const auto& t : f.times()) out["times"].push_back(rational_json(t));
        for (const auto& p : f.partitions()) out["partitions"].push_back(partition_json(p, labels));
        return out;
    };

    json doc;
    doc["schema_version"] = schema_version;
    doc["space"]["outcomes"] = labels;
    doc["space"]["probs"] = values_json(m.space.probs());
    doc["grid"] = values_json(m.grid);
    doc["big_filtration"] = filtration_json(m.big_filtration);
    doc["assets"] = json::array();
    for (std::size_t i = 0; i < m.assets.size(); ++i) {
        json path = json::array();
        for (const auto& x : m.prices[i]) path.push_back(values_json(x));
        doc["assets"].push_back({{"name", m.assets[i]}, {"prices", std::move(path)}});
    }
    doc["trading_filtrations"] = json::object();
    doc["admissible_sets"] = json::array();
    for (std::size_t j = 0; j < m.admissible_sets.size(); ++j) {
        std::string name = "F" + std::to_string(j);
        doc["trading_filtrations"][name] = filtration_json(m.trading_filtrations[j]);
        json names = json::array();
        for (std::size_t i : m.admissible_sets[j]) names.push_back(m.assets[i]);
        doc["admissible_sets"].push_back({{"assets", std::move(names)}, {"filtration", name}});
    }
    if (!claims.empty()) {
        doc["claims"] = json::object();
        for (const auto& [name, x] : claims) doc["claims"][name] = values_json(x);
    }
    return doc;
}

}  // namespace platonic::io
