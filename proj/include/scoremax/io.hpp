#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "scoremax/agent.hpp"
#include "scoremax/contracts.hpp"
#include "scoremax/model.hpp"
#include "scoremax/optimizer.hpp"

namespace scoremax::io {

using Json = nlohmann::ordered_json;

Json environment_to_json(const EnvironmentSpec& env);
// Exact keys: delta, periods, prior, cost, lambda{g1,g0,b1,b0}. Missing or
// mistyped fields raise ValidationError naming the dotted path (prefix
// included); unknown keys raise ParseError.
EnvironmentSpec environment_from_json(const Json& j, const std::string& prefix = "");

// CSV columns period,kind,r0,r1 with kind in G|B|N|AUX.
std::string contract_to_csv(const MenuContract& contract);
MenuContract contract_from_csv(const std::string& text);
Json contract_to_json(const MenuContract& contract);

// CSV columns option,r0,r1.
std::string rule_to_csv(const StaticScoringRule& rule);
StaticScoringRule rule_from_csv(const std::string& text);
Json rule_to_json(const StaticScoringRule& rule);

// period,mu_n,mu_g,mu_b; undefined posteriors are left empty.
std::string beliefs_to_csv(const BeliefSystem& beliefs);
// period,value,stop_value,action
std::string best_response_to_csv(const BestResponse& br);

// {tau_star, mode, contract, scan, lp_stats}
Json report_to_json(const SolveReport& report);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace scoremax::io
