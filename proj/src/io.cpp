#include "scoremax/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scoremax/error.hpp"

namespace scoremax::io {

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

double number_field(const Json& j, const std::string& key, const std::string& prefix) {
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::ValidationError, join(prefix, key) + " is missing");
  if (!it->is_number()) fail(ErrorCode::ValidationError, join(prefix, key) + " must be a number");
  return it->get<double>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known,
                    const std::string& prefix) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(ErrorCode::ParseError, "unknown key " + join(prefix, it.key()));
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

// Data rows of a CSV with the given header; blank lines are skipped.
std::vector<std::pair<int, std::vector<std::string>>> csv_rows(const std::string& text,
                                                               const std::string& header,
                                                               size_t columns) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  bool seen_header = false;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) fail(ErrorCode::ParseError, "expected header '" + header + "'");
      seen_header = true;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != columns)
      fail(ErrorCode::ParseError, "line " + std::to_string(n) + ": expected " +
                                      std::to_string(columns) + " columns");
    for (auto& c : cells) c = trim(c);
    rows.emplace_back(n, std::move(cells));
  }
  if (!seen_header) fail(ErrorCode::ParseError, "missing header '" + header + "'");
  return rows;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

Json environment_to_json(const EnvironmentSpec& env) {
  Json j;
  j["delta"] = env.delta;
  j["periods"] = env.periods;
  j["prior"] = env.prior;
  j["cost"] = env.cost;
  j["lambda"] = {{"g1", env.lambda.g1}, {"g0", env.lambda.g0}, {"b1", env.lambda.b1},
                 {"b0", env.lambda.b0}};
  return j;
}

EnvironmentSpec environment_from_json(const Json& j, const std::string& prefix) {
  if (!j.is_object()) fail(ErrorCode::ValidationError, (prefix.empty() ? "environment" : prefix) +
                                                           " must be an object");
  reject_unknown(j, {"delta", "periods", "prior", "cost", "lambda"}, prefix);
  EnvironmentSpec env;
  env.delta = number_field(j, "delta", prefix);
  auto periods = j.find("periods");
  if (periods == j.end()) fail(ErrorCode::ValidationError, join(prefix, "periods") + " is missing");
  if (!periods->is_number_integer())
    fail(ErrorCode::ValidationError, join(prefix, "periods") + " must be an integer");
  env.periods = periods->get<int>();
  env.prior = number_field(j, "prior", prefix);
  env.cost = number_field(j, "cost", prefix);
  auto lam = j.find("lambda");
  const std::string lp = join(prefix, "lambda");
  if (lam == j.end()) fail(ErrorCode::ValidationError, lp + " is missing");
  if (!lam->is_object()) fail(ErrorCode::ValidationError, lp + " must be an object");
  reject_unknown(*lam, {"g1", "g0", "b1", "b0"}, lp);
  env.lambda.g1 = number_field(*lam, "g1", lp);
  env.lambda.g0 = number_field(*lam, "g0", lp);
  env.lambda.b1 = number_field(*lam, "b1", lp);
  env.lambda.b0 = number_field(*lam, "b0", lp);
  return validate_environment(env);
}

std::string contract_to_csv(const MenuContract& contract) {
  std::ostringstream out;
  out << "period,kind,r0,r1\n";
  for (const auto& o : contract.options())
    out << o.period << ',' << option_tag(o.kind) << ',' << format_double(o.reward.r0) << ','
        << format_double(o.reward.r1) << '\n';
  return out.str();
}

MenuContract contract_from_csv(const std::string& text) {
  struct Row {
    int period;
    std::string kind;
    RewardPair r;
  };
  std::vector<Row> rows;
  int tau = -1;
  for (const auto& [line, cells] : csv_rows(text, "period,kind,r0,r1", 4)) {
    Row row{parse_int(cells[0], line), cells[1],
            RewardPair{parse_double(cells[2], line), parse_double(cells[3], line)}};
    if (row.kind != "G" && row.kind != "B" && row.kind != "N" && row.kind != "AUX")
      fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": unknown kind '" +
                                      row.kind + "'");
    if (row.kind == "N") {
      if (tau >= 0) fail(ErrorCode::ParseError, "duplicate terminal option");
      tau = row.period;
    }
    rows.push_back(std::move(row));
  }
  if (tau < 0) fail(ErrorCode::ParseError, "contract has no terminal (N) option");

  MenuContract c;
  c.tau = tau;
  auto place = [&](std::vector<RewardPair>& v, int size, int index, const Row& row) {
    if (index < 0 || index >= size)
      fail(ErrorCode::ParseError, std::string(row.kind) + " option at period " +
                                      std::to_string(row.period) + " outside 0.." +
                                      std::to_string(tau));
    if (v.empty()) v.assign(size, RewardPair{-1.0, -1.0});
    if (v[index].r0 != -1.0 || v[index].r1 != -1.0)
      fail(ErrorCode::ParseError, "duplicate " + row.kind + " option at period " +
                                      std::to_string(row.period));
    v[index] = row.r;
  };
  std::vector<RewardPair> aux;
  for (const auto& row : rows) {
    if (row.kind == "N")
      c.terminal = row.r;
    else if (row.kind == "G")
      place(c.good, tau, row.period - 1, row);
    else if (row.kind == "B")
      place(c.bad, tau, row.period - 1, row);
    else
      place(aux, tau, row.period, row);
  }
  auto complete = [](const std::vector<RewardPair>& v, const char* kind) {
    for (const auto& r : v)
      if (r.r0 == -1.0 && r.r1 == -1.0)
        fail(ErrorCode::ParseError, std::string("incomplete ") + kind + " options");
  };
  complete(c.good, "G");
  complete(c.bad, "B");
  complete(aux, "AUX");
  if (!aux.empty()) c.aux = std::move(aux);
  c.validate();
  return c;
}

Json contract_to_json(const MenuContract& contract) {
  Json arr = Json::array();
  for (const auto& o : contract.options())
    arr.push_back({{"period", o.period}, {"kind", option_tag(o.kind)}, {"r0", o.reward.r0},
                   {"r1", o.reward.r1}});
  return arr;
}

std::string rule_to_csv(const StaticScoringRule& rule) {
  std::ostringstream out;
  out << "option,r0,r1\n";
  for (size_t i = 0; i < rule.options.size(); ++i)
    out << i << ',' << format_double(rule.options[i].r0) << ','
        << format_double(rule.options[i].r1) << '\n';
  return out.str();
}

StaticScoringRule rule_from_csv(const std::string& text) {
  std::vector<RewardPair> options;
  for (const auto& [line, cells] : csv_rows(text, "option,r0,r1", 3)) {
    parse_int(cells[0], line);
    options.push_back(make_reward(parse_double(cells[1], line), parse_double(cells[2], line)));
  }
  if (options.empty()) fail(ErrorCode::EmptyMenu, "scoring rule has no options");
  return StaticScoringRule::from_options(options, "csv");
}

Json rule_to_json(const StaticScoringRule& rule) {
  Json arr = Json::array();
  for (size_t i = 0; i < rule.options.size(); ++i)
    arr.push_back({{"option", i}, {"r0", rule.options[i].r0}, {"r1", rule.options[i].r1}});
  return arr;
}

std::string beliefs_to_csv(const BeliefSystem& beliefs) {
  std::ostringstream out;
  out << "period,mu_n,mu_g,mu_b\n";
  for (int k = 0; k <= beliefs.periods(); ++k) {
    out << k << ',' << format_double(beliefs.no_info(k));
    for (Signal s : kSignals) {
      out << ',';
      if (k == 0) continue;
      if (auto p = beliefs.posterior(s, k)) out << format_double(*p);
    }
    out << '\n';
  }
  return out.str();
}

std::string best_response_to_csv(const BestResponse& br) {
  std::ostringstream out;
  out << "period,value,stop_value,action\n";
  for (size_t k = 0; k < br.value.size(); ++k)
    out << k << ',' << format_double(br.value[k]) << ',' << format_double(br.stop_value[k])
        << ',' << (br.work[k] ? "work" : "stop") << '\n';
  return out.str();
}

Json report_to_json(const SolveReport& report) {
  Json j;
  j["tau_star"] = report.tau_star;
  j["mode"] = report.mode;
  if (report.contract)
    j["contract"] = contract_to_json(*report.contract);
  else if (report.rule)
    j["contract"] = rule_to_json(*report.rule);
  else
    j["contract"] = Json::array();
  Json scan = Json::array();
  Json stats = Json::array();
  for (const auto& e : report.scan) {
    scan.push_back(Json::array({e.tau, e.feasible}));
    stats.push_back({{"tau", e.tau},
                     {"variables", e.variables},
                     {"rows", e.rows},
                     {"active_rows", e.active_rows},
                     {"rounds", e.rounds},
                     {"iterations", e.iterations},
                     {"max_residual", e.max_residual},
                     {"arithmetic", e.arithmetic}});
  }
  j["scan"] = std::move(scan);
  j["lp_stats"] = std::move(stats);
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoError, "read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  out.close();
  if (!out) fail(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace scoremax::io
