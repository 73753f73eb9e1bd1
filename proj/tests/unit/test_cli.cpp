#include "cli.hpp"
#include "scenario_io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using platonic::io::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;

    json report() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "platonic");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = platonic::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) { return std::string(PLATONIC_SCENARIO_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
    std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST(Cli, FtapOnBinomial) {
    auto r = run({"ftap", scenario("binomial.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rep = r.report();
    EXPECT_EQ(rep["verdict"], "NO_ARBITRAGE");
    EXPECT_EQ(rep["measure"]["q"], json::array({"1/3", "2/3"}));
    EXPECT_EQ(rep["measure"]["residuals"]["generator_expectation"], "0");
    EXPECT_EQ(rep["mode"], "exact");
}

TEST(Cli, SuperhedgeCall) {
    auto r = run({"superhedge", scenario("binomial.json"), "--claim", "call"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.report()["price"], "1/3");
    EXPECT_EQ(r.report()["residuals"]["duality_gap"], "0");

    r = run({"--float", "superhedge", scenario("delayed_binomial.json"), "--claim", "call"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.report()["price"].get<double>(), 0.5, 1e-9);
    EXPECT_LE(r.report()["residuals"]["duality_gap"].get<double>(), 1e-8);

    r = run({"superhedge", scenario("binomial.json"), "--claim", "nothing"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, IntervalAndDuality) {
    auto r = run({"interval", scenario("delayed_binomial.json"), "--claim", "call"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.report()["lower"], "0");
    EXPECT_EQ(r.report()["upper"], "1/2");
    EXPECT_FALSE(r.report()["attainable"].get<bool>());
    EXPECT_TRUE(r.report().contains("openness"));

    r = run({"check-duality", scenario("semistatic_call.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.report()["consistent"].get<bool>());
    for (const auto& row : r.report()["rows"]) EXPECT_EQ(row["primal"], row["dual"]);
    // With the call tradable at 1/4 the market is complete.
    EXPECT_EQ(r.report()["rows"][0]["primal"], "1/4");
}

TEST(Cli, ArbitrageCertificate) {
    auto path = write_temp("riskless.json", R"({
        "schema_version": 1,
        "space": {"outcomes": ["up", "down"]},
        "grid": ["0", "1"],
        "assets": [{"name": "S", "prices": ["1", "2"]}],
        "claims": {"one": "1"}
    })");
    auto r = run({"ftap", path});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rep = r.report();
    EXPECT_EQ(rep["verdict"], "ARBITRAGE");
    EXPECT_EQ(rep["arbitrage"]["residuals"]["wealth"], "0");
    EXPECT_EQ(run({"superhedge", path, "--claim", "one"}).code, 4);
}

TEST(Cli, ProjectFromReportAndSearch) {
    auto r = run({"ftap", scenario("delayed_binomial.json")});
    ASSERT_EQ(r.code, 0);
    auto report = write_temp("ftap_report.json", r.out);
    auto from = run({"project", scenario("delayed_binomial.json"), "--set", "S", "--measure", "from-report", "--report", report});
    ASSERT_EQ(from.code, 0) << from.err;
    auto search = run({"project", scenario("delayed_binomial.json"), "--measure", "search"});
    ASSERT_EQ(search.code, 0) << search.err;
    EXPECT_EQ(from.report()["projections"], search.report()["projections"]);
    EXPECT_EQ(from.report()["projections"]["S"][0], json::array({"1", "1", "1", "1"}));
}

TEST(Cli, BayesBuildWritesExplicitScenario) {
    std::string out = ::testing::TempDir() + "built.json";
    auto r = run({"bayes", "build", scenario("two_theta_bayes.json"), "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rep = r.report();
    EXPECT_EQ(rep["outcome_count"], 8);
    EXPECT_EQ(rep["posterior"][1]["blocks"][0]["distribution"], json::array({"1/3", "2/3"}));
    auto rebuilt = run({"ftap", out});
    auto original = run({"ftap", scenario("two_theta_bayes.json")});
    ASSERT_EQ(rebuilt.code, 0);
    EXPECT_EQ(rebuilt.report()["measure"], original.report()["measure"]);
}

TEST(Cli, FreeLunchExperiment) {
    auto r = run({"experiment", "free-lunch", "--max-n", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rep = r.report();
    EXPECT_TRUE(rep["strictly_decreasing"].get<bool>());
    EXPECT_TRUE(rep["all_no_arbitrage"].get<bool>());
    ASSERT_EQ(rep["rows"].size(), 8u);
    EXPECT_EQ(rep["rows"][0]["d_n"], "3/4");
    EXPECT_EQ(rep["rows"][7]["d_n"], "511/65536");
    EXPECT_EQ(run({"experiment", "free-lunch", "--max-n", "40"}).code, 1);
}

TEST(Cli, ReportsAreDeterministic) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"experiment", "ftap-suite", "--count", "30", "--seed", "7"},
             {"ftap", scenario("semistatic_call.json")},
             {"interval", scenario("noisy_price.json"), "--claim", "digital"}}) {
        auto a = run(args).report();
        auto b = run(args).report();
        a.erase("timing_ms");
        b.erase("timing_ms");
        EXPECT_EQ(a, b);
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"validate", scenario("binomial.json")}).code, 0);
    EXPECT_EQ(run({"validate", "/nonexistent/file.json"}).code, 1);
    EXPECT_EQ(run({"ftap", write_temp("syntax.json", "{ \"schema_version\": 1, ]")}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);

    auto unadapted = write_temp("unadapted.json", R"({
        "schema_version": 1,
        "space": {"outcomes": ["up", "down"]},
        "grid": ["0", "1"],
        "big_filtration": "trivial",
        "assets": [{"name": "S", "prices": ["1", ["2", "1/2"]]}]
    })");
    auto r = run({"validate", unadapted});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.report()["valid"].get<bool>());
    EXPECT_EQ(run({"ftap", unadapted}).code, 2);
    EXPECT_NE(run({"ftap", unadapted}).err.find("adapted"), std::string::npos);

    auto syntax = run({"ftap", write_temp("located.json", "{\n\"schema_version\": 1,\n\"grid\": [\"0\", }")});
    EXPECT_NE(syntax.err.find("located.json:3:"), std::string::npos) << syntax.err;
}

TEST(Cli, SaveWritesTheJsonReport) {
    std::string path = ::testing::TempDir() + "saved.json";
    auto r = run({"--table", "--save", path, "ftap", scenario("binomial.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    EXPECT_EQ(json::parse(in)["verdict"], "NO_ARBITRAGE");
}

TEST(Cli, TableOutput) {
    auto r = run({"--table", "experiment", "free-lunch", "--max-n", "3"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("15/64"), std::string::npos);
    EXPECT_NE(r.out.find("strictly_decreasing"), std::string::npos);
    r = run({"superhedge", scenario("binomial.json"), "--claim", "call", "--table"});
    EXPECT_NE(r.out.find("price"), std::string::npos);
}
