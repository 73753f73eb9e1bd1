#include "platonic/instances.hpp"
#include "scenario_io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

using namespace platonic;
using io::json;

namespace {

Rational R(long n, long d = 1) { return ratio(n, d); }

std::string scenario(const std::string& name) { return std::string(PLATONIC_SCENARIO_DIR) + "/" + name; }

void expect_same(const market::MarketModel& a, const market::MarketModel& b) {
    EXPECT_EQ(a.space, b.space);
    EXPECT_EQ(a.grid, b.grid);
    EXPECT_EQ(a.big_filtration, b.big_filtration);
    EXPECT_EQ(a.assets, b.assets);
    EXPECT_EQ(a.prices, b.prices);
    EXPECT_EQ(a.admissible_sets, b.admissible_sets);
    EXPECT_EQ(a.trading_filtrations, b.trading_filtrations);
}

json binomial_doc() {
    return json::parse(R"({
        "schema_version": 1,
        "space": {"outcomes": ["up", "down"]},
        "grid": ["0", "1"],
        "assets": [{"name": "S", "prices": ["1", ["2", "1/2"]]}],
        "claims": {"call": {"call": "S", "strike": "1"}}
    })");
}

std::string error_location(const json& doc) {
    try {
        io::parse_scenario(doc);
    } catch (const io::ScenarioError& e) {
        return e.where();
    }
    return "no error";
}

}  // namespace

TEST(ScenarioIo, RoundTripIsStructurallyIdentical) {
    std::mt19937 rng(81);
    for (int trial = 0; trial < 40; ++trial) {
        auto m = instances::random_market(rng);
        m = instances::with_reference(m, instances::random_full_support(rng, m.outcome_count()));
        std::map<std::string, prob::RandomVariable> claims{{"f", instances::random_claim(rng, m.outcome_count())}};
        auto doc = io::to_json(m, claims);
        auto back = io::parse_scenario(json::parse(doc.dump()));
        expect_same(back.model, m);
        EXPECT_EQ(back.claims, claims);
        EXPECT_EQ(io::to_json(back.model, back.claims), doc);
    }
    for (const auto& m : {instances::delayed_binomial(), instances::two_asset_delayed(),
                          bayes::free_lunch_truncation(3).model}) {
        auto back = io::parse_scenario(io::to_json(m));
        expect_same(back.model, m);
    }
}

TEST(ScenarioIo, ShorthandForms) {
    auto sc = io::parse_scenario(binomial_doc());
    EXPECT_EQ(sc.model.space.probs(), (std::vector<Rational>{R(1, 2), R(1, 2)}));
    EXPECT_EQ(sc.model.prices[0][0], (prob::RandomVariable{R(1), R(1)}));
    EXPECT_EQ(sc.claims.at("call"), (prob::RandomVariable{R(1), R(0)}));
    EXPECT_EQ(sc.model.big_filtration.partitions().back(), prob::Partition::discrete(2));
    EXPECT_EQ(sc.model.admissible_sets, (std::vector<market::AssetSet>{{0}}));

    auto doc = binomial_doc();
    doc["space"]["probs"] = {0.25, "3/4"};
    doc["claims"]["digital"] = {{"by_label", {{"up", 1}}}};
    doc["claims"]["put"] = {{"put", "S"}, {"strike", "1"}};
    sc = io::parse_scenario(doc);
    EXPECT_EQ(sc.model.space.probs(), (std::vector<Rational>{R(1, 4), R(3, 4)}));
    EXPECT_EQ(sc.claims.at("digital"), (prob::RandomVariable{R(1), R(0)}));
    EXPECT_EQ(sc.claims.at("put"), (prob::RandomVariable{R(0), R(1, 2)}));
}

TEST(ScenarioIo, GoldenFilesMatchInstances) {
    auto sc = io::load_scenario(scenario("delayed_binomial.json"));
    expect_same(sc.model, instances::delayed_binomial());
    EXPECT_EQ(sc.claims.at("call"), (prob::RandomVariable{R(3), R(0), R(0), R(0)}));

    auto bayes_sc = io::load_scenario(scenario("two_theta_bayes.json"));
    auto golden = bayes::two_theta_binomial();
    auto built = bayes::build_product_market(golden.setup, golden.prices, {});
    expect_same(bayes_sc.model, built.model);
    ASSERT_TRUE(bayes_sc.bayes);
    EXPECT_EQ(bayes_sc.claims.at("regime")[1], 1);

    auto fl = io::load_scenario(scenario("free_lunch.json"));
    ASSERT_TRUE(fl.free_lunch);
    EXPECT_EQ(fl.model.outcome_count(), 16u);

    auto semi = io::load_scenario(scenario("semistatic_call.json"));
    EXPECT_EQ(semi.model.assets, (std::vector<std::string>{"S", "C"}));

    auto noisy = io::load_scenario(scenario("noisy_price.json"));
    EXPECT_EQ(noisy.model.outcome_count(), 4u);
    EXPECT_EQ(noisy.claims.at("digital"), (prob::RandomVariable{R(1), R(1), R(0), R(0)}));
}

TEST(ScenarioIo, ErrorsCarryLocations) {
    auto doc = binomial_doc();
    doc["schema_version"] = 2;
    EXPECT_EQ(error_location(doc), "/schema_version");

    doc = binomial_doc();
    doc["assets"][0]["prices"][1] = {"2"};
    EXPECT_EQ(error_location(doc), "/assets/0/prices/1");

    doc = binomial_doc();
    doc["assets"][0]["prices"][1][1] = "one half";
    EXPECT_EQ(error_location(doc), "/assets/0/prices/1/1");

    doc = binomial_doc();
    doc["big_filtration"] = json::array({"trivial", json::array({json::array({"up", "sideways"})})});
    EXPECT_EQ(error_location(doc), "/big_filtration/1/0/1");

    doc = binomial_doc();
    doc.erase("grid");
    EXPECT_EQ(error_location(doc), "");

    std::string path = ::testing::TempDir() + "broken.json";
    std::ofstream(path) << "{\n  \"schema_version\": 1,\n  \"space\": ]\n}";
    try {
        io::load_scenario(path);
        FAIL();
    } catch (const io::ScenarioError& e) {
        EXPECT_EQ(e.where(), path + ":3:12");
    }
}

TEST(ScenarioIo, BrokenStructureIsAModelError) {
    auto doc = binomial_doc();
    doc["big_filtration"] = json::array({"discrete", "trivial"});
    EXPECT_THROW(io::parse_scenario(doc), market::InvalidModel);

    doc = binomial_doc();
    doc["space"]["probs"] = {"1/2", "1/3"};
    EXPECT_THROW(io::parse_scenario(doc), market::InvalidModel);

    doc = binomial_doc();
    doc["big_filtration"] = "trivial";
    auto sc = io::parse_scenario(doc);
    EXPECT_FALSE(market::validate(sc.model).empty());
}
