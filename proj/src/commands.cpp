#include "swss/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "swss/ctmc.hpp"
#include "swss/drift.hpp"
#include "swss/errors.hpp"
#include "swss/gains.hpp"
#include "swss/random_network.hpp"
#include "swss/sde.hpp"
#include "swss/stability.hpp"

namespace swss {

auto exit_code_for(const Error& e) -> int {
  switch (category_of(e.kind())) {
    case ErrorCategory::Parse:
      return kExitParse;
    case ErrorCategory::Model:
      return kExitModel;
    case ErrorCategory::Check:
      return kExitCheck;
  }
  return kExitCheck;
}

namespace {

constexpr double kIdentityTolerance = 1e-8;

auto rel_diff(double a, double b) -> double {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

auto class_id(const ValidatedNetwork& net, int i) -> const std::string& {
  return net.spec.classes[static_cast<std::size_t>(i)];
}
auto pool_id(const ValidatedNetwork& net, int j) -> const std::string& {
  return net.spec.pools[static_cast<std::size_t>(j)];
}

auto edge_json(const ValidatedNetwork& net, Edge e) -> Json {
  return {{"class", class_id(net, e.cls)}, {"pool", pool_id(net, e.pool)}};
}

auto find_pool(const ValidatedNetwork& net, const std::string& id) -> int {
  const auto j = net.pool_index(id);
  if (!j) throw Error(ErrorKind::PreconditionFailed, "unknown pool id '" + id + "'");
  return *j;
}

/// "class:pool" by ids.
auto parse_anchor(const ValidatedNetwork& net, const std::string& text) -> Edge {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::PreconditionFailed, "anchor must look like class:pool, got '" + text + "'");
  }
  const std::string c = text.substr(0, colon);
  const auto i = net.class_index(c);
  if (!i) throw Error(ErrorKind::PreconditionFailed, "unknown class id '" + c + "'");
  const Edge e{*i, find_pool(net, text.substr(colon + 1))};
  if (!net.find_edge(e.cls, e.pool)) {
    throw Error(ErrorKind::AnchorNotEdge, "anchor " + text + " is not an edge");
  }
  return e;
}

auto resolve_anchor(const ValidatedNetwork& net, const SpecFile& file, const std::string& flag)
    -> Edge {
  if (!flag.empty()) return parse_anchor(net, flag);
  if (file.anchor) return *file.anchor;
  return default_anchor(net);
}

auto resolve_p(const ValidatedNetwork& net, const SpecFile& file, const std::vector<double>& flag)
    -> Eigen::VectorXd {
  const int I = net.num_classes();
  Eigen::VectorXd p;
  if (!flag.empty()) {
    p = Eigen::Map<const Eigen::VectorXd>(flag.data(), static_cast<Eigen::Index>(flag.size()));
  } else if (file.p) {
    p = *file.p;
  } else {
    p = Eigen::VectorXd::Constant(I, 1.0 / I);
  }
  if (p.size() != I) {
    throw Error(ErrorKind::InvalidP, "p needs " + std::to_string(I) + " entries");
  }
  validate_p(p, I);
  return p;
}

auto swss_json(const SwssResult& r) -> Json {
  return {{"vartheta_p", round12(r.vartheta_p)},
          {"kappa", to_json(r.kappa)},
          {"theta", to_json(r.theta)},
          {"lambda_hat", to_json(r.lambda_hat)},
          {"R", to_json(r.R)},
          {"Gamma", to_json(r.Gamma)},
          {"anchor_spread", round12(r.anchor_spread)},
          {"residual", round12(r.residual)}};
}

auto status_of(bool ok) -> const char* { return ok ? "OK" : "FAILED"; }

/// Residual check: passes when value <= tolerance.
void add_check(Json& checks, const std::string& name, double value, double tol) {
  const bool ok = std::isfinite(value) && value <= tol;
  checks.push_back({{"name", name},
                    {"value", round12(value)},
                    {"tolerance", round12(tol)},
                    {"status", status_of(ok)}});
}

/// Positivity check: passes when value > 0.
void add_positive(Json& checks, const std::string& name, double value) {
  checks.push_back({{"name", name},
                    {"value", round12(value)},
                    {"requirement", "> 0"},
                    {"status", status_of(value > 0.0)}});
}

auto all_ok(const Json& checks) -> bool {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Json& c) { return c.at("status") == "OK"; });
}

auto max_gain_residual(const GainTable& gains, const DriftModel& model) -> double {
  const Eigen::MatrixXd g = gains_from_B1(model);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index l = 0; l < g.cols(); ++l) {
      worst = std::max(worst, rel_diff(g(i, l), gains.class_to_class(i, l)));
    }
  }
  return worst;
}

auto harmonic_residual(const SwssResult& r) -> double {
  if (r.vartheta_p == 0.0) return 0.0;
  return rel_diff(1.0 / r.vartheta_p, r.R.cwiseInverse().sum());
}

auto gamma_residual(const SwssResult& r) -> double {
  return std::abs(r.Gamma.cwiseInverse().sum() - 1.0);
}

auto transience_json(const ValidatedNetwork& net, const TransienceCertificate& c) -> Json {
  return {{"kind", "transience"},
          {"beta", round12(c.beta)},
          {"drift_weight", round12(c.drift_weight)},
          {"sigma_norm2", round12(c.sigma_norm2)},
          {"min_margin", round12(c.min_margin)},
          {"min_log_generator", round12(c.min_log_generator)},
          {"worst_x", to_json(c.worst_x)},
          {"worst_pool", pool_id(net, c.worst_pool)},
          {"samples", c.sample_count},
          {"max_radius", round12(c.max_radius)},
          {"seed", c.seed}};
}

auto lyapunov_json(const LyapunovCertificate& c) -> Json {
  Json radii = Json::array();
  for (double r : c.radii) radii.push_back(round12(r));
  return {{"kind", "lyapunov_sde"},
          {"S", to_json(c.s.S)},
          {"kappa_circ", round12(c.s.kappa_circ)},
          {"min_eig_S", round12(c.s.min_eig_S)},
          {"min_eig_lyap", round12(c.s.min_eig_lyap)},
          {"min_eig_phi", round12(c.s.min_eig_phi)},
          {"search_iterations", c.s.iterations},
          {"epsilon", round12(c.epsilon)},
          {"kappa0", round12(c.kappa0)},
          {"kappa1", round12(c.kappa1)},
          {"eta", round12(c.eta)},
          {"delta", round12(c.delta)},
          {"p", to_json(c.p)},
          {"radii", radii},
          {"directions", c.directions},
          {"far_radius", round12(c.far_radius)},
          {"worst_far_ratio", round12(c.worst_far_ratio)},
          {"worst_x", to_json(c.worst_x)},
          {"seed", c.seed}};
}

auto ctmc_cert_json(const CtmcCertificate& c, const StaffingPlan& plan) -> Json {
  return {{"kind", "lyapunov_ctmc"},
          {"n", plan.n},
          {"policy", "bsp"},
          {"epsilon", round12(c.epsilon)},
          {"C0", round12(c.C0)},
          {"C1", round12(c.C1)},
          {"worst_far_ratio", round12(c.worst_far_ratio)},
          {"worst_state", c.worst_state},
          {"samples", c.sample_count},
          {"far_radius", round12(c.far_radius)},
          {"seed", c.seed}};
}

auto plan_json(const ValidatedNetwork& net, const StaffingPlan& plan) -> Json {
  Json designated = Json::array();
  for (int i : plan.designated) designated.push_back(class_id(net, i));
  return {{"n", plan.n},
          {"N_tilde", plan.N_tilde},
          {"N_tilde_class", plan.N_tilde_class},
          {"N_pool", plan.N_pool},
          {"designated_class", designated},
          {"target", to_json(plan.target)},
          {"c0", round12(plan.c0)}};
}

/// Runs a certificate step; check-category failures become FAILED entries.
template <typename F>
void certify_step(Json& certs, Json& checks, const std::string& name, F&& step) {
  try {
    certs[name] = step();
    checks.push_back({{"name", name + "_certificate"}, {"status", "OK"}});
  } catch (const Error& e) {
    if (category_of(e.kind()) != ErrorCategory::Check) throw;
    certs[name] = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    checks.push_back({{"name", name + "_certificate"},
                      {"status", "FAILED"},
                      {"message", e.what()}});
  }
}

struct AnalyzeInputs {
  SpecFile file;
  std::vector<double> p;
  std::string anchor;
  std::optional<std::int64_t> n;
  bool certify = false;
  std::uint64_t seed = 1;
};

auto analyze_file(const AnalyzeInputs& in) -> CommandResult {
  const ValidatedNetwork net = validate_topology(in.file.spec);
  const FluidSolution fluid = solve_fluid(net);
  const Eigen::VectorXd p = resolve_p(net, in.file, in.p);
  const Edge anchor = resolve_anchor(net, in.file, in.anchor);

  std::optional<NthSystemParams> nth = net.spec.nth;
  if (in.n) nth = nth_system_from_limits(net, *in.n);
  if (nth) validate_nth(net, *nth);

  const GainTable gains = compute_gains(net);
  const SwssResult lim = compute_swss(net, fluid, p);
  const SwssResult oracle = lp_oracle(net, fluid, p);
  std::optional<SwssResult> lim_nth;
  if (nth) lim_nth = compute_swss_nth(net, fluid, *nth, p);
  const DriftModel model = build_drift(net, fluid, anchor);
  const double vt_drift = swss_from_drift(model, p);
  const IdlenessMargin margin = idleness_margin(model);
  const Eigen::VectorXd w = left_weights(model);
  const StabilityReport stab = classify(lim, lim_nth);

  Json report;
  report["command"] = "analyze";
  SpecFile echo = in.file;
  echo.p = p;
  echo.anchor = anchor;
  if (nth) echo.spec.nth = nth;
  report["input"] = spec_to_json(echo);
  report["fluid"] = {{"xi_star", to_json(fluid.xi_star)},
                     {"z_star", to_json(fluid.z_star)},
                     {"x_star", to_json(fluid.x_star)},
                     {"residual", round12(fluid.residual)}};
  report["gains"] = {{"class_to_pool", to_json(gains.class_to_pool)},
                     {"class_to_class", to_json(gains.class_to_class)},
                     {"pool_to_pool", to_json(gains.pool_to_pool)}};
  report["swss"] = {{"limiting", swss_json(lim)}};
  if (lim_nth) report["swss"]["nth"] = swss_json(*lim_nth);
  report["oracle"] = {{"vartheta_p", round12(oracle.vartheta_p)},
                      {"kappa", to_json(oracle.kappa)},
                      {"residual", round12(oracle.residual)}};
  report["drift"] = {{"anchor", edge_json(net, anchor)},
                     {"h", to_json(model.h)},
                     {"B1", to_json(model.B1)},
                     {"B2", to_json(model.B2)},
                     {"sigma_diag", to_json(model.sigma)},
                     {"left_weights", to_json(w)},
                     {"idleness_margin", round12(margin.margin)},
                     {"idleness_margin_pool", pool_id(net, margin.pool)},
                     {"vartheta_p", round12(vt_drift)},
                     {"abs_diff_closed_form", round12(std::abs(vt_drift - lim.vartheta_p))}};

  Json stability = {{"classification", to_string(stab.classification)},
                    {"vartheta_p", round12(stab.vartheta_p)}};
  if (stab.vartheta_p_n) {
    stability["vartheta_p_n"] = round12(*stab.vartheta_p_n);
    stability["nth_classification"] = to_string(*stab.nth_classification);
  }

  Json checks = Json::array();
  add_check(checks, "closed_form_vs_oracle", rel_diff(lim.vartheta_p, oracle.vartheta_p),
            kIdentityTolerance);
  add_check(checks, "closed_form_vs_drift", rel_diff(lim.vartheta_p, vt_drift), kIdentityTolerance);
  add_check(checks, "anchor_spread", lim.anchor_spread, kIdentityTolerance);
  add_check(checks, "gains_vs_B1", max_gain_residual(gains, model), kIdentityTolerance);
  add_positive(checks, "left_weights_min", w.minCoeff());
  add_check(checks, "harmonic_identity", harmonic_residual(lim), kIdentityTolerance);
  add_check(checks, "gamma_identity", gamma_residual(lim), kIdentityTolerance);
  add_positive(checks, "idleness_margin", margin.margin);

  if (in.certify) {
    Json certs = Json::object();
    if (stab.classification == Classification::Transient) {
      certify_step(certs, checks, "transience", [&] {
        return transience_json(net, transience_certificate(model, 4096, in.seed));
      });
    } else if (stab.classification == Classification::Stabilizable) {
      certify_step(certs, checks, "lyapunov_sde", [&] {
        const SMatrix s = find_S(model);
        const Eigen::VectorXd pe = choose_p_for_eta(s.S, anchor.cls, lim.vartheta_p, p);
        SdeCheckOptions opts;
        opts.seed = in.seed;
        return lyapunov_json(check_drift_inequality_sde(recentered(model, lim.vartheta_p, pe), s,
                                                        lim.vartheta_p, pe, opts));
      });
      if (nth) {
        certify_step(certs, checks, "lyapunov_ctmc", [&] {
          const StaffingPlan plan = synthesize_staffing(net, fluid, *nth, lim);
          CtmcCheckOptions opts;
          opts.seed = in.seed;
          const auto cert = check_drift_inequality_ctmc(net, *nth, plan, *bsp_policy(net, plan),
                                                        lim.vartheta_p, opts);
          return ctmc_cert_json(cert, plan);
        });
      }
    } else {
      certs["note"] = "no certificate is issued at vartheta_p = 0";
    }
    stability["certificates"] = certs;
  }
  report["stability"] = stability;

  const bool ok = all_ok(checks);
  report["checks"] = checks;
  report["status"] = status_of(ok);
  return {ok ? kExitOk : kExitCheck, report};
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

auto rep_path(const std::string& dir, const char* prefix, int r) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_rep_%03d.csv", prefix, r);
  return (std::filesystem::path(dir) / buf).string();
}

void write_ctmc_csv(const std::string& path, const ValidatedNetwork& net, const Trajectory& tr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const auto I = static_cast<std::size_t>(tr.num_classes);
  const auto J = static_cast<std::size_t>(tr.num_pools);
  out << "t";
  for (std::size_t i = 0; i < I; ++i) out << ",x_" << net.spec.classes[i];
  for (std::size_t i = 0; i < I; ++i) out << ",q_" << net.spec.classes[i];
  for (std::size_t j = 0; j < J; ++j) out << ",y_" << net.spec.pools[j];
  out << "\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    out << format12(tr.t[k]);
    for (std::size_t i = 0; i < I; ++i) out << ',' << tr.x[k * I + i];
    for (std::size_t i = 0; i < I; ++i) out << ',' << tr.q[k * I + i];
    for (std::size_t j = 0; j < J; ++j) out << ',' << tr.y[k * J + j];
    out << "\n";
  }
}

void write_sde_csv(const std::string& path, const ValidatedNetwork& net, const SdeTrajectory& tr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t";
  for (const auto& c : net.spec.classes) out << ",x_" << c;
  out << "\n";
  for (Eigen::Index k = 0; k < tr.samples.cols(); ++k) {
    out << format12(tr.sample_time(k));
    for (Eigen::Index i = 0; i < tr.samples.rows(); ++i) out << ',' << format12(tr.samples(i, k));
    out << "\n";
  }
}

}  // namespace

auto run_analyze(const AnalyzeOptions& o) -> CommandResult {
  return analyze_file({load_spec(o.spec_path), o.p, o.anchor, o.n, o.certify, o.seed});
}

auto run_verify(const VerifyOptions& o) -> CommandResult {
  if (o.trials < 1) throw Error(ErrorKind::PreconditionFailed, "trials must be >= 1");
  std::mt19937_64 rng(o.seed);
  std::optional<SpecFile> fixed;
  if (!o.spec_path.empty()) fixed = load_spec(o.spec_path);

  double closed_oracle = 0.0, closed_drift = 0.0, spread = 0.0, gain_res = 0.0;
  double harmonic = 0.0, gamma = 0.0, realloc = 0.0, sign = 0.0;
  double w_min = std::numeric_limits<double>::infinity();
  double margin_min = std::numeric_limits<double>::infinity();
  int max_classes = 0, max_pools = 0;

  for (int t = 0; t < o.trials; ++t) {
    const NetworkSpec spec = fixed ? fixed->spec : random_crp_network_bounded(rng, 8, 8);
    const ValidatedNetwork net = validate_topology(spec);
    const FluidSolution fluid = solve_fluid(net);
    const int I = net.num_classes();
    const int J = net.num_pools();
    max_classes = std::max(max_classes, I);
    max_pools = std::max(max_pools, J);
    const Eigen::VectorXd p = (fixed && t == 0) ? resolve_p(net, *fixed, {})
                                                : random_simplex_point(rng, I);

    const SwssResult r = compute_swss(net, fluid, p);
    const SwssResult orc = lp_oracle(net, fluid, p);
    const DriftModel model = build_drift(net, fluid, fixed && fixed->anchor ? *fixed->anchor
                                                                            : default_anchor(net));
    GainTable gains = compute_gains(net);
    if (o.corrupt_gains) gains.class_to_class(0, I - 1) *= 1.01;
    const Eigen::VectorXd w = left_weights(model);

    closed_oracle = std::max(closed_oracle, rel_diff(r.vartheta_p, orc.vartheta_p));
    closed_drift = std::max(closed_drift, rel_diff(r.vartheta_p, swss_from_drift(model, p)));
    spread = std::max(spread, r.anchor_spread);
    gain_res = std::max(gain_res, max_gain_residual(gains, model));
    w_min = std::min(w_min, w.minCoeff());
    harmonic = std::max(harmonic, harmonic_residual(r));
    gamma = std::max(gamma, gamma_residual(r));
    margin_min = std::min(margin_min, idleness_margin(model).margin);

    if (J >= 2) {
      const ValidatedNetwork moved = validate_topology(reallocate(net, 0, J - 1, 0.37));
      const SwssResult rm = compute_swss(moved, solve_fluid(moved), p);
      realloc = std::max(realloc, rel_diff(rm.vartheta_p, r.vartheta_p));
    }

    // vartheta_p <e^T B1^{-1}, p> does not depend on p
    const Eigen::VectorXd p2 = random_simplex_point(rng, I);
    const double v2 = compute_swss(net, fluid, p2).vartheta_p;
    double s = rel_diff(r.vartheta_p * w.dot(p), v2 * w.dot(p2));
    if (classify(r.vartheta_p) != classify(v2)) s = std::max(s, 1.0);
    sign = std::max(sign, s);
  }

  Json checks = Json::array();
  add_check(checks, "closed_form_vs_oracle", closed_oracle, kIdentityTolerance);
  add_check(checks, "closed_form_vs_drift", closed_drift, kIdentityTolerance);
  add_check(checks, "anchor_spread", spread, kIdentityTolerance);
  add_check(checks, "gains_vs_B1", gain_res, kIdentityTolerance);
  add_positive(checks, "left_weights_min", w_min);
  add_check(checks, "harmonic_identity", harmonic, kIdentityTolerance);
  add_check(checks, "gamma_identity", gamma, kIdentityTolerance);
  add_positive(checks, "idleness_margin_min", margin_min);
  add_check(checks, "reallocation_invariance", realloc, kIdentityTolerance);
  add_check(checks, "sign_invariance_in_p", sign, kIdentityTolerance);

  const bool ok = all_ok(checks);
  Json report;
  report["command"] = "verify";
  report["mode"] = fixed ? "spec" : "random";
  report["seed"] = o.seed;
  report["trials"] = o.trials;
  report["max_classes"] = max_classes;
  report["max_pools"] = max_pools;
  report["checks"] = checks;
  report["status"] = status_of(ok);
  return {ok ? kExitOk : kExitCheck, report};
}

auto run_whatif(const WhatifOptions& o) -> CommandResult {
  const SpecFile file = load_spec(o.spec_path);
  const ValidatedNetwork net = validate_topology(file.spec);
  const int from = find_pool(net, o.from_pool);
  const int to = find_pool(net, o.to_pool);
  const Eigen::VectorXd p = resolve_p(net, file, o.p);
  const double before = compute_swss(net, solve_fluid(net), p).vartheta_p;

  SpecFile moved = file;
  moved.spec = reallocate(net, from, to, o.delta);
  moved.p = p;
  CommandResult inner = analyze_file({moved, {}, {}, std::nullopt, false, 1});
  const double after = inner.report["swss"]["limiting"]["vartheta_p"].get<double>();

  Json checks = inner.report["checks"];
  add_check(checks, "vartheta_unchanged", rel_diff(before, after), kIdentityTolerance);
  const bool ok = all_ok(checks);

  Json report;
  report["command"] = "whatif";
  report["from"] = o.from_pool;
  report["to"] = o.to_pool;
  report["delta"] = round12(o.delta);
  report["vartheta_p_before"] = round12(before);
  report["vartheta_p_after"] = round12(after);
  report["nu_hat_before"] = to_json(file.spec.nu_hat);
  report["nu_hat_after"] = to_json(moved.spec.nu_hat);
  inner.report.erase("checks");
  inner.report.erase("status");
  report["analysis"] = inner.report;
  report["checks"] = checks;
  report["status"] = status_of(ok);
  return {ok ? kExitOk : kExitCheck, report};
}

auto run_simulate_ctmc(const CtmcOptions& o) -> CommandResult {
  if (o.reps < 1 || !(o.horizon > 0.0)) {
    throw Error(ErrorKind::PreconditionFailed, "need reps >= 1 and horizon > 0");
  }
  const SpecFile file = load_spec(o.spec_path);
  const ValidatedNetwork net = validate_topology(file.spec);
  const FluidSolution fluid = solve_fluid(net);
  const Eigen::VectorXd p = resolve_p(net, file, o.p);
  const NthSystemParams nth = (net.spec.nth && net.spec.nth->n == o.n)
                                  ? *net.spec.nth
                                  : nth_system_from_limits(net, o.n);
  validate_nth(net, nth);
  const SwssResult lim = compute_swss(net, fluid, p);
  const StaffingPlan plan = synthesize_staffing(net, fluid, nth, lim);

  PolicyPtr policy;
  Json policy_json = {{"name", o.policy}};
  if (o.policy == "bsp") {
    policy = bsp_policy(net, plan);
  } else if (o.policy == "constant") {
    const Edge anchor = resolve_anchor(net, file, o.anchor);
    policy = constant_control_policy(net, fluid, plan, anchor, o.m0);
    policy_json["anchor"] = edge_json(net, anchor);
    policy_json["m0"] = round12(o.m0);
  } else {
    throw Error(ErrorKind::PreconditionFailed, "unknown policy '" + o.policy + "'");
  }

  const auto trajs = simulate_ctmc_replications(net, nth, *policy, plan.N_tilde_class, o.horizon,
                                                o.seed, o.reps, o.threads);
  std::vector<Eigen::MatrixXd> scaled;
  scaled.reserve(trajs.size());
  for (const auto& tr : trajs) {
    scaled.push_back(diffusion_scale(tr, net, fluid, nth, &plan, ScaleMode::Tilde));
  }
  const TrajectoryStats st = stationary_stats(trajs, scaled, o.burn_in);

  Json reps = Json::array();
  for (const auto& tr : trajs) {
    reps.push_back({{"replication", tr.replication},
                    {"records", tr.size()},
                    {"arrivals", tr.arrivals},
                    {"departures", tr.departures}});
  }
  Json levels = Json::array();
  for (double l : st.levels) levels.push_back(round12(l));
  Json quantiles = Json::array();
  for (double q : st.norm_quantiles) quantiles.push_back(round12(q));
  Json windows = Json::array();
  for (double m : st.window_medians) windows.push_back(round12(m));

  Json report;
  report["command"] = "simulate-ctmc";
  report["n"] = o.n;
  report["policy"] = policy_json;
  report["horizon"] = round12(o.horizon);
  report["reps"] = o.reps;
  report["seed"] = o.seed;
  report["p"] = to_json(p);
  report["vartheta_p"] = round12(lim.vartheta_p);
  report["classification"] = to_string(classify(lim.vartheta_p));
  report["staffing"] = plan_json(net, plan);
  report["replications"] = reps;
  report["stats"] = {{"replications", st.replications},
                     {"seed", st.seed},
                     {"burn_in", round12(st.burn_in)},
                     {"observed_time", round12(st.observed_time)},
                     {"levels", levels},
                     {"norm_quantiles", quantiles},
                     {"mean_idleness", round12(st.mean_idleness)},
                     {"tail_slope", round12(st.tail_slope)},
                     {"tail_r2", round12(st.tail_r2)},
                     {"tail_points", st.tail_points},
                     {"window_medians", windows}};
  report["status"] = "OK";

  if (!o.out_dir.empty()) {
    ensure_dir(o.out_dir);
    for (const auto& tr : trajs) write_ctmc_csv(rep_path(o.out_dir, "ctmc", tr.replication), net, tr);
    write_json((std::filesystem::path(o.out_dir) / "ctmc_summary.json").string(), report);
  }
  return {kExitOk, report};
}

auto run_simulate_sde(const SdeOptions& o) -> CommandResult {
  if (o.reps < 1) throw Error(ErrorKind::PreconditionFailed, "need reps >= 1");
  if (o.control != "barv") {
    throw Error(ErrorKind::PreconditionFailed, "unknown control '" + o.control + "'");
  }
  const SpecFile file = load_spec(o.spec_path);
  const ValidatedNetwork net = validate_topology(file.spec);
  const FluidSolution fluid = solve_fluid(net);
  const Eigen::VectorXd p = resolve_p(net, file, o.p);
  const Edge anchor = resolve_anchor(net, file, o.anchor);
  const SwssResult lim = compute_swss(net, fluid, p);
  DriftModel model = build_drift(net, fluid, anchor);
  if (o.recenter) model = recentered(model, lim.vartheta_p, p);

  const auto trajs = simulate_sde_replications(model, barv_control(net, anchor),
                                               Eigen::VectorXd::Zero(net.num_classes()), o.dt,
                                               o.horizon, o.seed, o.reps, o.threads, o.thin);
  const IdlenessEstimate est = estimate_idleness(trajs, o.burn_in);

  Json idle = {{"estimate", round12(est.mean)},
               {"stderr", round12(est.stderr_)},
               {"batches", est.batches}};
  // the stationary mean is only meaningful for the recentered stabilizable model
  if (o.recenter && lim.vartheta_p > 0.0) {
    const double target = idleness_target(model, p, lim.vartheta_p);
    idle["target"] = round12(target);
    idle["relative_error"] = round12(std::abs(est.mean - target) / target);
    idle["within_3_stderr"] = std::abs(est.mean - target) <= 3.0 * est.stderr_;
  } else {
    idle["target"] = nullptr;
  }

  Json report;
  report["command"] = "simulate-sde";
  report["control"] = o.control;
  report["anchor"] = edge_json(net, anchor);
  report["dt"] = round12(o.dt);
  report["horizon"] = round12(o.horizon);
  report["reps"] = o.reps;
  report["thin"] = o.thin;
  report["seed"] = o.seed;
  report["burn_in"] = round12(o.burn_in);
  report["recentered"] = o.recenter;
  report["p"] = to_json(p);
  report["vartheta_p"] = round12(lim.vartheta_p);
  report["classification"] = to_string(classify(lim.vartheta_p));
  report["h"] = to_json(model.h);
  report["idleness"] = idle;
  report["status"] = "OK";

  if (!o.out_dir.empty()) {
    ensure_dir(o.out_dir);
    for (const auto& tr : trajs) write_sde_csv(rep_path(o.out_dir, "sde", tr.replication), net, tr);
    write_json((std::filesystem::path(o.out_dir) / "sde_summary.json").string(), report);
  }
  return {kExitOk, report};
}

}  // namespace swss
