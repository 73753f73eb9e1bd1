#pragma once

#include "platonic/bayes.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Scenario files: JSON, schema_version 1, rationals as "a/b" strings.
namespace platonic::io {

using json = nlohmann::json;
using market::MarketModel;
using prob::RandomVariable;

/// Malformed scenario; `where` is a JSON pointer or a line:column position.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct Scenario {
    MarketModel model;
    std::map<std::string, RandomVariable> claims;
    /// Set when the model came from a "bayes" section.
    std::optional<bayes::BayesMarket> bayes;
    std::optional<bayes::FreeLunchDiagnostics> free_lunch;
    std::vector<std::string> notes;
};

inline constexpr int schema_version = 1;

Scenario parse_scenario(const json& doc);

/// Reads and parses; syntax errors carry line:column.
Scenario load_scenario(const std::string& path);

/// Explicit form: every filtration as per-time partitions of outcome labels.
json to_json(const MarketModel& model, const std::map<std::string, RandomVariable>& claims = {});

Rational parse_rational_json(const json& value, const std::string& where);

json rational_json(const Rational& value);

json partition_json(const prob::Partition& part, const std::vector<std::string>& labels);

}  // namespace platonic::io
