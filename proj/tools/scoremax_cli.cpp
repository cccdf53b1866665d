#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "scoremax/scoremax.h"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string mode = "dynamic";
  std::string contract;
  std::string fixtures;
  double tol = 1e-9;
};

int report_failure(scoremax_status st) {
  std::fprintf(stderr, "scoremax: %s\n", scoremax_last_error());
  (void)st;
  return 1;
}

int execute(const char* command, const Flags& f) {
  scoremax_config* cfg = nullptr;
  scoremax_status st = f.config.empty() ? scoremax_config_create(&cfg)
                                        : scoremax_config_load(f.config.c_str(), 1, &cfg);
  if (st != SCOREMAX_OK) return report_failure(st);

  std::string mode = command;
  if (mode == "solve") mode = f.mode == "static" ? "solve-static" : "solve-dynamic";
  st = scoremax_config_set_mode(cfg, mode.c_str());
  if (st == SCOREMAX_OK) st = scoremax_config_set_out(cfg, f.out.c_str());
  if (st == SCOREMAX_OK && mode.rfind("solve", 0) == 0) st = scoremax_config_set_tol(cfg, f.tol);
  if (st == SCOREMAX_OK && !f.contract.empty())
    st = scoremax_config_set_contract(cfg, f.contract.c_str());
  if (st == SCOREMAX_OK && !f.fixtures.empty())
    st = scoremax_config_set_fixtures(cfg, f.fixtures.c_str());

  int code = 1;
  if (st == SCOREMAX_OK) st = scoremax_run(cfg, &code);
  scoremax_config_free(cfg);
  if (st != SCOREMAX_OK) return report_failure(st);
  if (code == 1) std::fprintf(stderr, "scoremax: %s\n", scoremax_last_error());
  if (code == 2) std::fprintf(stderr, "scoremax: verification failed, see %s.report.json\n",
                              f.out.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effort-maximizing reward contracts for a Poisson learning agent"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "Solve for the effort-maximizing contract");
  solve->add_option("--config", f.config, "Environment config (JSON)")->required();
  solve->add_option("--mode", f.mode, "dynamic or static")
      ->check(CLI::IsMember({"dynamic", "static"}));
  solve->add_option("--tol", f.tol, "LP feasibility tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--out", f.out, "Output path prefix")->required();

  auto* br = app.add_subcommand("best-response", "Agent best response to a contract CSV");
  br->add_option("--config", f.config, "Environment config (JSON)")->required();
  br->add_option("--contract", f.contract, "Contract CSV")->required();
  br->add_option("--out", f.out, "Output path prefix")->required();

  auto* analytic = app.add_subcommand("analytic", "Continuous-time perfect-learning solution");
  analytic->add_option("--config", f.config, "Environment config (JSON)")->required();
  analytic->add_option("--out", f.out, "Output path prefix")->required();

  auto* verify = app.add_subcommand("verify", "Run the theorem verification suite");
  verify->add_option("--fixtures", f.fixtures, "Directory of fixture JSON files");
  verify->add_option("--out", f.out, "Output path prefix")->required();

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep over a grid");
  sweep->add_option("--config", f.config, "Config with a sweep grid (JSON)")->required();
  sweep->add_option("--out", f.out, "Output path prefix")->required();

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {solve, br, analytic, verify, sweep})
    if (sub->parsed()) return execute(sub->get_name().c_str(), f);
  return 1;
}
