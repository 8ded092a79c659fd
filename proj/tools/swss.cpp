// Command line front end: analyze, verify, whatif, simulate-ctmc, simulate-sde.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swss/commands.hpp"

namespace {

struct Globals {
  std::string spec;
  std::uint64_t seed = 1;
  std::string out;
  bool json = false;
  int threads = 1;
};

void emit(const Globals& g, const swss::CommandResult& r, const std::string& file_name) {
  if (!g.out.empty() && !file_name.empty()) {
    swss::write_json((std::filesystem::path(g.out) / file_name).string(), r.report);
  }
  if (g.json || g.out.empty()) {
    std::cout << r.report.dump(2) << "\n";
  } else {
    std::cout << r.report.at("command").get<std::string>() << ": "
              << r.report.at("status").get<std::string>() << " (" << g.out << ")\n";
  }
}

}  // namespace

auto main(int argc, char** argv) -> int {
  CLI::App app{"Safety staffing analysis and simulation for tree-structured many-server networks"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--spec,--net", g.spec, "network spec (JSON)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output directory");
  app.add_flag("--json", g.json, "print the JSON report to stdout");
  app.add_option("--threads", g.threads, "worker threads for replications")
      ->check(CLI::PositiveNumber);

  swss::AnalyzeOptions an;
  std::int64_t an_n = 0;
  auto* analyze = app.add_subcommand("analyze", "SWSS, drift and stability report");
  analyze->add_option("--p", an.p, "class weights, comma separated")->delimiter(',');
  analyze->add_option("--anchor", an.anchor, "anchor edge class:pool");
  auto* an_n_opt = analyze->add_option("--n", an_n, "scale of the n-th system")
                       ->check(CLI::PositiveNumber);
  analyze->add_flag("--certify", an.certify, "attach stability certificates");

  swss::VerifyOptions ve;
  auto* verify = app.add_subcommand("verify", "cross-check identities on random trees");
  verify->add_option("--trials", ve.trials, "number of instances")->check(CLI::PositiveNumber);
  verify->add_flag("--corrupt-gains", ve.corrupt_gains, "perturb one gain (negative control)");

  swss::WhatifOptions wi;
  auto* whatif = app.add_subcommand("whatif", "move capacity between pools and re-analyze");
  whatif->add_option("--from", wi.from_pool, "source pool id")->required();
  whatif->add_option("--to", wi.to_pool, "destination pool id")->required();
  whatif->add_option("--delta", wi.delta, "capacity moved out of the source pool")->required();
  whatif->add_option("--p", wi.p, "class weights, comma separated")->delimiter(',');

  swss::CtmcOptions ct;
  auto* ctmc = app.add_subcommand("simulate-ctmc", "simulate the n-th queueing system");
  ctmc->add_option("--n", ct.n, "system scale")->check(CLI::PositiveNumber);
  ctmc->add_option("--policy", ct.policy, "scheduling policy")
      ->check(CLI::IsMember({"bsp", "constant"}));
  ctmc->add_option("--anchor", ct.anchor, "anchor edge class:pool (constant policy)");
  ctmc->add_option("--m0", ct.m0, "radius factor of the constant-control region");
  ctmc->add_option("--horizon", ct.horizon, "simulated time");
  ctmc->add_option("--reps", ct.reps, "replications")->check(CLI::PositiveNumber);
  ctmc->add_option("--burn-in", ct.burn_in, "discarded fraction of each run");
  ctmc->add_option("--p", ct.p, "class weights, comma separated")->delimiter(',');

  swss::SdeOptions sd;
  bool no_recenter = false;
  auto* sde = app.add_subcommand("simulate-sde", "simulate the limiting diffusion");
  sde->add_option("--control", sd.control, "control")->check(CLI::IsMember({"barv"}));
  sde->add_option("--anchor", sd.anchor, "anchor edge class:pool");
  sde->add_option("--dt", sd.dt, "time step")->check(CLI::PositiveNumber);
  sde->add_option("--horizon", sd.horizon, "simulated time");
  sde->add_option("--reps", sd.reps, "replications")->check(CLI::PositiveNumber);
  sde->add_option("--thin", sd.thin, "keep every k-th step")->check(CLI::PositiveNumber);
  sde->add_option("--burn-in", sd.burn_in, "discarded fraction of each run");
  sde->add_option("--p", sd.p, "class weights, comma separated")->delimiter(',');
  sde->add_flag("--no-recenter", no_recenter, "keep the original drift offset h");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return swss::kExitUsage;
  }

  const bool needs_spec = !verify->parsed();
  if (needs_spec && g.spec.empty()) {
    std::cerr << "--spec is required\n" << app.help();
    return swss::kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      an.spec_path = g.spec;
      an.seed = g.seed;
      if (an_n_opt->count() > 0) an.n = an_n;
      const auto r = swss::run_analyze(an);
      emit(g, r, "analysis.json");
      return r.exit_code;
    }
    if (verify->parsed()) {
      ve.seed = g.seed;
      ve.spec_path = g.spec;
      const auto r = swss::run_verify(ve);
      emit(g, r, "verify.json");
      return r.exit_code;
    }
    if (whatif->parsed()) {
      wi.spec_path = g.spec;
      const auto r = swss::run_whatif(wi);
      emit(g, r, "whatif.json");
      return r.exit_code;
    }
    if (ctmc->parsed()) {
      ct.spec_path = g.spec;
      ct.seed = g.seed;
      ct.out_dir = g.out;
      ct.threads = g.threads;
      const auto r = swss::run_simulate_ctmc(ct);
      emit(g, r, "");
      return r.exit_code;
    }
    if (sde->parsed()) {
      sd.spec_path = g.spec;
      sd.seed = g.seed;
      sd.out_dir = g.out;
      sd.threads = g.threads;
      sd.recenter = !no_recenter;
      const auto r = swss::run_simulate_sde(sd);
      emit(g, r, "");
      return r.exit_code;
    }
  } catch (const swss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return swss::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return swss::kExitCheck;
  }
  return swss::kExitUsage;
}
