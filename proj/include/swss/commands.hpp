#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swss/errors.hpp"
#include "swss/io.hpp"

namespace swss {

/// Report plus the exit status it implies (0 ok, 4 a check failed).
/// Module errors propagate as swss::Error.
struct CommandResult {
  int exit_code = 0;
  Json report;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitModel = 3;
inline constexpr int kExitCheck = 4;
inline constexpr int kExitUsage = 64;

auto exit_code_for(const Error& e) -> int;

struct AnalyzeOptions {
  std::string spec_path;
  std::vector<double> p;  // empty: from the file, else uniform
  std::string anchor;     // "class:pool" ids; empty: file, else smallest edge
  std::optional<std::int64_t> n;
  bool certify = false;
  std::uint64_t seed = 1;
};
auto run_analyze(const AnalyzeOptions& o) -> CommandResult;

struct VerifyOptions {
  std::uint64_t seed = 1;
  int trials = 100;
  std::string spec_path;       // non-empty: every trial uses this network
  bool corrupt_gains = false;  // negative control: perturb one gain
};
auto run_verify(const VerifyOptions& o) -> CommandResult;

struct WhatifOptions {
  std::string spec_path;
  std::string from_pool;
  std::string to_pool;
  double delta = 0.0;
  std::vector<double> p;
};
auto run_whatif(const WhatifOptions& o) -> CommandResult;

struct CtmcOptions {
  std::string spec_path;
  std::int64_t n = 400;
  std::string policy = "bsp";  // or "constant"
  std::string anchor;
  double m0 = 1.0;
  double horizon = 50.0;
  int reps = 1;
  std::uint64_t seed = 1;
  double burn_in = 0.2;
  std::vector<double> p;
  std::string out_dir;  // empty: no files
  int threads = 1;
};
auto run_simulate_ctmc(const CtmcOptions& o) -> CommandResult;

struct SdeOptions {
  std::string spec_path;
  std::string control = "barv";
  std::string anchor;
  double dt = 1e-3;
  double horizon = 100.0;
  int reps = 1;
  std::uint64_t seed = 1;
  int thin = 10;
  double burn_in = 0.2;
  std::vector<double> p;
  bool recenter = true;
  std::string out_dir;
  int threads = 1;
};
auto run_simulate_sde(const SdeOptions& o) -> CommandResult;

}  // namespace swss
