#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swss/ctmc.hpp"
#include "swss/errors.hpp"
#include "swss/fixtures.hpp"
#include "swss/gains.hpp"
#include "swss/random_network.hpp"

using namespace swss;

namespace {

using Counts = std::vector<std::int64_t>;

struct Staffed {
  ValidatedNetwork net;
  FluidSolution fluid;
  NthSystemParams nth;
  SwssResult swss;
  StaffingPlan plan;
};

auto make(const NetworkSpec& spec, std::int64_t n, const Eigen::VectorXd& p) -> Staffed {
  auto net = validate_topology(spec);
  auto fluid = solve_fluid(net);
  auto nth = nth_system_from_limits(net, n);
  auto swss = compute_swss(net, fluid, p);
  auto plan = synthesize_staffing(net, fluid, nth, swss);
  return {std::move(net), std::move(fluid), std::move(nth), std::move(swss), std::move(plan)};
}

auto n_setup(std::int64_t n) -> Staffed {
  return make(fixtures::n_network(), n, Eigen::Vector2d(0.5, 0.5));
}

// explicit BSP of the N network written out case by case
auto n_network_bsp(const StaffingPlan& plan, std::int64_t x1, std::int64_t x2) -> Counts {
  const std::int64_t N1 = plan.N_pool[0];
  const std::int64_t N2 = plan.N_pool[1];
  const std::int64_t t12 = plan.N_tilde[1];
  const std::int64_t t22 = plan.N_tilde[2];
  const std::int64_t over = std::max<std::int64_t>(x1 - N1, 0);
  const std::int64_t z11 = std::min(x1, N1);
  const std::int64_t z12 = x2 >= t22 ? std::min(over, t12) : std::min(over, N2 - x2);
  const std::int64_t z22 = x1 >= N1 + t12 ? std::min(x2, t22) : std::min(x2, N2 - over);
  return {z11, z12, z22};
}

// M/M/N stationary mean number of idle servers
auto erlang_idle_mean(double lambda, double mu, int servers) -> double {
  const double a = lambda / mu;
  std::vector<double> w(static_cast<std::size_t>(servers) + 1);
  w[0] = 1.0;
  for (int k = 1; k <= servers; ++k) w[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k) - 1] * a / k;
  const double rho = a / servers;
  const double tail = w[static_cast<std::size_t>(servers)] * rho / (1.0 - rho);
  double total = tail;
  double idle = 0.0;
  for (int k = 0; k <= servers; ++k) {
    total += w[static_cast<std::size_t>(k)];
    idle += (servers - k) * w[static_cast<std::size_t>(k)];
  }
  return idle / total;
}

void expect_feasible(const ValidatedNetwork& net, const StaffingPlan& plan, const Counts& x,
                     const Counts& z) {
  Counts q;
  Counts y;
  queues_and_idleness(net, plan.N_pool, x, z, q, y);
  for (auto v : z) EXPECT_GE(v, 0);
  for (auto v : q) EXPECT_GE(v, 0);
  for (auto v : y) EXPECT_GE(v, 0);
}

}  // namespace

TEST(Staffing, NFixtureAtN400) {
  const Staffed s = n_setup(400);
  ASSERT_EQ(s.nth.N_n, (Counts{420, 420}));
  EXPECT_EQ(s.plan.N_tilde, (Counts{420, 200, 220}));
  EXPECT_EQ(s.plan.N_tilde_class, (Counts{620, 220}));
  EXPECT_EQ(s.plan.designated, (std::vector<int>{0, 0}));
  EXPECT_DOUBLE_EQ(s.plan.target(2), 220.0);
  EXPECT_NEAR(s.plan.c0, 10.0 / 20.0, 1e-12);
}

TEST(Staffing, RejectsSmallN) {
  const Staffed s = n_setup(4);
  SwssResult bad = s.swss;
  bad.kappa.setConstant(-50.0);
  try {
    synthesize_staffing(s.net, s.fluid, s.nth, bad);
    FAIL() << "expected NTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NTooSmall);
  }
}

TEST(Staffing, RandomTreeInvariants) {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int t = 0; t < 80; ++t) {
    const NetworkSpec spec = random_crp_network_bounded(rng, 6, 6);
    const auto net = validate_topology(spec);
    const Eigen::VectorXd p = random_simplex_point(rng, net.num_classes());
    try {
      const Staffed s = make(spec, 10000, p);
      for (int j = 0; j < net.num_pools(); ++j) {
        std::int64_t sum = 0;
        for (int e : net.edges_of_pool[static_cast<std::size_t>(j)]) {
          sum += s.plan.N_tilde[static_cast<std::size_t>(e)];
          if (net.edge(e).cls != s.plan.designated[static_cast<std::size_t>(j)]) {
            EXPECT_LE(std::abs(static_cast<double>(s.plan.N_tilde[static_cast<std::size_t>(e)]) -
                               s.plan.target(e)),
                      1.0);
          }
        }
        EXPECT_EQ(sum, s.nth.N_n[static_cast<std::size_t>(j)]);
      }
      ++checked;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NTooSmall);
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(Bsp, MatchesExplicitNNetworkRule) {
  const Staffed s = n_setup(400);
  const auto policy = bsp_policy(s.net, s.plan);
  Counts z;
  for (std::int64_t x1 = 0; x1 <= 1100; x1 += 7) {
    for (std::int64_t x2 = 0; x2 <= 700; x2 += 5) {
      policy->assign({x1, x2}, z);
      EXPECT_EQ(z, n_network_bsp(s.plan, x1, x2)) << x1 << ", " << x2;
    }
  }
}

TEST(Bsp, EmptyAndSaturatedStates) {
  const Staffed s = n_setup(400);
  const auto policy = bsp_policy(s.net, s.plan);
  Counts z;
  policy->assign({0, 0}, z);
  EXPECT_EQ(z, (Counts{0, 0, 0}));
  const Counts huge{100000, 100000};
  policy->assign(huge, z);
  Counts q;
  Counts y;
  queues_and_idleness(s.net, s.plan.N_pool, huge, z, q, y);
  EXPECT_EQ(y, (Counts{0, 0}));
  for (std::size_t e = 0; e < z.size(); ++e) EXPECT_GE(z[e], s.plan.N_tilde[e]);
}

TEST(Bsp, RandomTreesSatisfyDefinition) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 60; ++t) {
    const NetworkSpec spec = random_crp_network_bounded(rng, 6, 6);
    const auto net = validate_topology(spec);
    Staffed s;
    try {
      s = make(spec, 2500, random_simplex_point(rng, net.num_classes()));
    } catch (const Error&) {
      continue;
    }
    const auto policy = bsp_policy(s.net, s.plan);
    std::uniform_real_distribution<double> scale(0.0, 2.0);
    Counts z;
    Counts q;
    Counts y;
    for (int k = 0; k < 50; ++k) {
      Counts x(static_cast<std::size_t>(net.num_classes()));
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::llround(scale(rng) * static_cast<double>(s.plan.N_tilde_class[i]));
      }
      policy->assign(x, z);
      expect_feasible(net, s.plan, x, z);
      queues_and_idleness(net, s.plan.N_pool, x, z, q, y);
      for (int e = 0; e < net.num_edges(); ++e) {
        const auto i = static_cast<std::size_t>(net.edge(e).cls);
        const auto j = static_cast<std::size_t>(net.edge(e).pool);
        const auto ze = z[static_cast<std::size_t>(e)];
        const auto te = s.plan.N_tilde[static_cast<std::size_t>(e)];
        EXPECT_EQ(std::min(q[i], y[j]), 0);
        if (x[i] <= s.plan.N_tilde_class[i]) {
          EXPECT_LE(ze, te);
          EXPECT_EQ(q[i], 0);
        } else {
          EXPECT_GE(ze, te);
        }
      }
    }
  }
}

TEST(ConstantControl, JointWorkConservationInsideRegion) {
  const Staffed s = n_setup(400);
  const auto policy = constant_control_policy(s.net, s.fluid, s.plan, Edge{1, 1});
  Counts z;
  Counts q;
  Counts y;
  // balanced headcount: no queue, no idleness
  const Counts x{630, 210};
  policy->assign(x, z);
  queues_and_idleness(s.net, s.plan.N_pool, x, z, q, y);
  EXPECT_EQ(q, (Counts{0, 0}));
  EXPECT_EQ(y, (Counts{0, 0}));

  // one extra job waits at the anchor class
  const Counts x1{630, 211};
  policy->assign(x1, z);
  queues_and_idleness(s.net, s.plan.N_pool, x1, z, q, y);
  EXPECT_EQ(q, (Counts{0, 1}));
  EXPECT_EQ(y, (Counts{0, 0}));

  // shortfall idles the anchor pool
  const Counts x2{625, 210};
  policy->assign(x2, z);
  queues_and_idleness(s.net, s.plan.N_pool, x2, z, q, y);
  EXPECT_EQ(q, (Counts{0, 0}));
  EXPECT_EQ(y, (Counts{0, 5}));
}

TEST(ConstantControl, FallsBackToBspOutsideRegion) {
  const Staffed s = n_setup(400);
  const auto policy = constant_control_policy(s.net, s.fluid, s.plan, Edge{1, 1});
  const auto bsp = bsp_policy(s.net, s.plan);
  Counts z;
  Counts zb;
  for (const Counts& x : {Counts{2000, 100}, Counts{0, 0}, Counts{50, 900}}) {
    policy->assign(x, z);
    bsp->assign(x, zb);
    EXPECT_EQ(z, zb);
  }
  EXPECT_THROW(constant_control_policy(s.net, s.fluid, s.plan, Edge{1, 0}), Error);
}

TEST(ConstantControl, FeasibleEverywhere) {
  const Staffed s = n_setup(100);
  const auto policy = constant_control_policy(s.net, s.fluid, s.plan, Edge{1, 1});
  Counts z;
  for (std::int64_t x1 = 0; x1 <= 400; x1 += 3) {
    for (std::int64_t x2 = 0; x2 <= 250; x2 += 3) {
      policy->assign({x1, x2}, z);
      expect_feasible(s.net, s.plan, {x1, x2}, z);
    }
  }
}

TEST(SimulateCtmc, ZeroHorizon) {
  const Staffed s = n_setup(100);
  const auto policy = bsp_policy(s.net, s.plan);
  const auto tr = simulate_ctmc(s.net, s.nth, *policy, s.plan.N_tilde_class, 0.0, 1);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.x, s.plan.N_tilde_class);
  EXPECT_EQ(tr.arrivals + tr.departures, 0);
}

TEST(SimulateCtmc, DeterministicAcrossThreadCounts) {
  const Staffed s = n_setup(100);
  const auto policy = bsp_policy(s.net, s.plan);
  const auto a = simulate_ctmc_replications(s.net, s.nth, *policy, s.plan.N_tilde_class, 5.0, 42, 4, 1);
  const auto b = simulate_ctmc_replications(s.net, s.nth, *policy, s.plan.N_tilde_class, 5.0, 42, 4, 3);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t r = 0; r < a.size(); ++r) {
    EXPECT_EQ(a[r].t, b[r].t);
    EXPECT_EQ(a[r].x, b[r].x);
    EXPECT_EQ(a[r].y, b[r].y);
  }
  EXPECT_NE(a[0].t, a[1].t);
}

TEST(SimulateCtmc, AccountingAndFeasibility) {
  const Staffed s = n_setup(100);
  const auto policy = bsp_policy(s.net, s.plan);
  const Counts x0{10, 300};
  const auto tr = simulate_ctmc(s.net, s.nth, *policy, x0, 20.0, 9);
  const std::size_t K = tr.size();
  EXPECT_EQ(static_cast<std::int64_t>(K) - 1, tr.arrivals + tr.departures);
  const std::int64_t start = x0[0] + x0[1];
  const std::int64_t end = tr.x[2 * (K - 1)] + tr.x[2 * (K - 1) + 1];
  EXPECT_EQ(end - start, tr.arrivals - tr.departures);
  for (std::size_t k = 0; k < K; ++k) {
    for (int i = 0; i < 2; ++i) EXPECT_GE(tr.q[2 * k + static_cast<std::size_t>(i)], 0);
    for (int j = 0; j < 2; ++j) EXPECT_GE(tr.y[2 * k + static_cast<std::size_t>(j)], 0);
    if (k > 0) {
      EXPECT_GT(tr.t[k], tr.t[k - 1]);
      std::int64_t jump = 0;
      for (int i = 0; i < 2; ++i) jump += std::abs(tr.x[2 * k + static_cast<std::size_t>(i)] - tr.x[2 * (k - 1) + static_cast<std::size_t>(i)]);
      EXPECT_EQ(jump, 1);
    }
  }
}

TEST(SimulateCtmc, SingleStationMatchesErlangC) {
  // one class, one pool: BSP is FCFS on an M/M/N queue
  const auto spec = fixtures::single_edge(1.0, 1.0, 0.0, 1.0);
  const Staffed s = make(spec, 25, Eigen::VectorXd::Ones(1));
  ASSERT_EQ(s.nth.N_n[0], 30);
  const auto policy = bsp_policy(s.net, s.plan);
  const auto trajs = simulate_ctmc_replications(s.net, s.nth, *policy, {30}, 4000.0, 5, 2, 2);
  std::vector<Eigen::MatrixXd> scaled;
  for (const auto& tr : trajs) {
    scaled.push_back(diffusion_scale(tr, s.net, s.fluid, s.nth, &s.plan, ScaleMode::Tilde));
  }
  const auto st = stationary_stats(trajs, scaled, 0.05);
  const double expected = erlang_idle_mean(25.0, 1.0, 30);
  EXPECT_NEAR(st.mean_idleness * 5.0, expected, 0.05 * expected);
}

TEST(DiffusionScale, Centerings) {
  const Staffed s = n_setup(400);
  Trajectory tr;
  tr.n = 400;
  tr.num_classes = 2;
  tr.num_pools = 2;
  tr.horizon = 1.0;
  tr.t = {0.0, 0.5};
  tr.x = {630, 210, 620, 220};
  tr.y = {0, 0, 0, 0};
  const auto breve = diffusion_scale(tr, s.net, s.fluid, s.nth, nullptr, ScaleMode::Breve);
  const auto tilde = diffusion_scale(tr, s.net, s.fluid, s.nth, &s.plan, ScaleMode::Tilde);
  EXPECT_NEAR(breve.col(0).norm(), 0.0, 1e-12);
  EXPECT_NEAR(tilde.col(1).norm(), 0.0, 1e-12);
  const Eigen::VectorXd shift = (centering(s.net, s.fluid, s.nth, nullptr, ScaleMode::Breve) -
                                 centering(s.net, s.fluid, s.nth, &s.plan, ScaleMode::Tilde)) /
                                20.0;
  for (int k = 0; k < 2; ++k) EXPECT_LT((tilde.col(k) - breve.col(k) - shift).norm(), 1e-12);
  EXPECT_THROW(diffusion_scale(tr, s.net, s.fluid, s.nth, nullptr, ScaleMode::Tilde), Error);
  const Staffed other = n_setup(100);
  try {
    diffusion_scale(tr, s.net, s.fluid, s.nth, &other.plan, ScaleMode::Tilde);
    FAIL() << "expected ModeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModeMismatch);
  }
}

TEST(StationaryStats, ConstantTrajectory) {
  Trajectory tr;
  tr.n = 4;
  tr.num_classes = 1;
  tr.num_pools = 1;
  tr.horizon = 10.0;
  tr.t = {0.0};
  tr.x = {7};
  tr.y = {2};
  Eigen::MatrixXd scaled(1, 1);
  scaled << 1.5;
  const auto st = stationary_stats({tr}, {scaled}, 0.2);
  for (double qv : st.norm_quantiles) EXPECT_DOUBLE_EQ(qv, 1.5);
  EXPECT_DOUBLE_EQ(st.mean_idleness, 1.0);
  EXPECT_DOUBLE_EQ(st.observed_time, 8.0);
  for (double m : st.window_medians) EXPECT_DOUBLE_EQ(m, 1.5);
  EXPECT_THROW(stationary_stats({}, {}, 0.2), Error);
}

TEST(StationaryStats, WeightedQuantile) {
  EXPECT_DOUBLE_EQ(weighted_quantile({{1.0, 1.0}, {2.0, 3.0}}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(weighted_quantile({{1.0, 1.0}, {2.0, 3.0}}, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(weighted_quantile({{3.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}}, 0.9), 3.0);
}

TEST(CtmcDriftInequality, NFixtureBsp) {
  const Staffed s = n_setup(400);
  const auto policy = bsp_policy(s.net, s.plan);
  const auto cert = check_drift_inequality_ctmc(s.net, s.nth, s.plan, *policy, s.swss.vartheta_p);
  EXPECT_GT(cert.C1, 0.0);
  EXPECT_GT(cert.C0, 0.0);
  EXPECT_GT(cert.sample_count, 2000);
  // at the center V = 1 and the slack is at least C0 - C1
  const double r0 =
      ctmc_generator_ratio(s.net, s.nth, s.plan, *policy, cert.epsilon, s.plan.N_tilde_class);
  EXPECT_TRUE(std::isfinite(r0));
  EXPECT_LE(r0, cert.C0 - cert.C1 + 1e-12);
  EXPECT_DOUBLE_EQ(ctmc_lyapunov(cert.epsilon, Eigen::Vector2d::Zero()), 1.0);
}

TEST(CtmcDriftInequality, RejectsNonPositiveSafetyStaffing) {
  const Staffed s = n_setup(400);
  const auto policy = bsp_policy(s.net, s.plan);
  EXPECT_THROW(check_drift_inequality_ctmc(s.net, s.nth, s.plan, *policy, -1.0), Error);
}
