#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/LU>

#include "swss/drift.hpp"
#include "swss/errors.hpp"
#include "swss/fixtures.hpp"
#include "swss/sde.hpp"
#include "swss/stability.hpp"

using namespace swss;

namespace {

const Edge kNAnchor{1, 1};

auto n_net() -> ValidatedNetwork { return validate_topology(fixtures::n_network()); }

auto n_model(const ValidatedNetwork& net) -> DriftModel {
  return build_drift(net, solve_fluid(net), kNAnchor);
}

auto constant_trajectory(const Eigen::VectorXd& x, int samples) -> SdeTrajectory {
  SdeTrajectory tr;
  tr.dt = 0.1;
  tr.steps = samples - 1;
  tr.samples = x.replicate(1, samples);
  return tr;
}

}  // namespace

TEST(BarvControl, ConstantVertex) {
  const auto net = n_net();
  const auto c = barv_control(net, kNAnchor);
  ASSERT_TRUE(c.constant.has_value());
  for (const Eigen::Vector2d x : {Eigen::Vector2d(0, 0), Eigen::Vector2d(-3, 7)}) {
    const auto [uc, us] = c.eval(x);
    EXPECT_EQ(uc, Eigen::Vector2d(0, 1));
    EXPECT_EQ(us, Eigen::Vector2d(0, 1));
  }
  try {
    barv_control(net, Edge{1, 0});
    FAIL() << "expected AnchorNotEdge";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AnchorNotEdge);
  }
}

TEST(SimulateSde, NoiselessRunConvergesToFixedPoint) {
  const auto net = n_net();
  DriftModel model = recentered(n_model(net), 2.0, Eigen::Vector2d(0.5, 0.5));
  model.sigma.setZero();
  const auto tr = simulate_sde(model, barv_control(net, kNAnchor), Eigen::Vector2d(3, -4),
                               1e-3, 40.0, 1);
  // h - B1 x + <e,x>^- B2 e_jhat = -B1 x + h on <e,x> <= 0 since B2 e_jhat = 0
  const Eigen::VectorXd fixed = model.B1.partialPivLu().solve(model.h);
  ASSERT_LE(fixed.sum(), 0.0);
  EXPECT_LT((tr.samples.rightCols(1) - fixed).norm(), 1e-6);
  EXPECT_EQ(tr.samples.cols(), 40001);
}

TEST(SimulateSde, ConstantDriftMatchesGeneralPath) {
  const auto net = n_net();
  const DriftModel model = recentered(n_model(net), 2.0, Eigen::Vector2d(0.5, 0.5));
  ControlFunction general = barv_control(net, kNAnchor);
  general.constant.reset();
  const auto a = simulate_sde(model, barv_control(net, kNAnchor), Eigen::Vector2d(1, -1), 1e-2, 5.0, 3);
  const auto b = simulate_sde(model, general, Eigen::Vector2d(1, -1), 1e-2, 5.0, 3);
  EXPECT_LT((a.samples - b.samples).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SimulateSde, DeterministicAndThinned) {
  const auto net = n_net();
  const DriftModel model = recentered(n_model(net), 2.0, Eigen::Vector2d(0.5, 0.5));
  const auto c = barv_control(net, kNAnchor);
  const auto a = simulate_sde_replications(model, c, Eigen::Vector2d::Zero(), 1e-3, 2.0, 5, 3, 1, 10);
  const auto b = simulate_sde_replications(model, c, Eigen::Vector2d::Zero(), 1e-3, 2.0, 5, 3, 3, 10);
  const auto full = simulate_sde(model, c, Eigen::Vector2d::Zero(), 1e-3, 2.0, 5, 1, 1);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(a[r].samples, b[r].samples);
  EXPECT_EQ(a[1].samples.cols(), 201);
  for (Eigen::Index k = 0; k < a[1].samples.cols(); ++k) {
    EXPECT_EQ(a[1].samples.col(k), full.samples.col(10 * k));
  }
}

TEST(SimulateSde, ReportsBlowUp) {
  const auto net = n_net();
  DriftModel model = n_model(net);
  model.B1 = -1e3 * model.B1;  // violently unstable
  try {
    simulate_sde(model, barv_control(net, kNAnchor), Eigen::Vector2d(1, 1), 1e-1, 100.0, 1);
    FAIL() << "expected NonFiniteState";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteState);
  }
}

TEST(EstimateIdleness, ConstantTrajectories) {
  const auto neg = estimate_idleness({constant_trajectory(Eigen::Vector2d(-1.0, -0.5), 200)}, 0.2);
  EXPECT_DOUBLE_EQ(neg.mean, 1.5);
  EXPECT_DOUBLE_EQ(neg.stderr_, 0.0);
  EXPECT_EQ(neg.batches, 32);
  const auto pos = estimate_idleness({constant_trajectory(Eigen::Vector2d(1.0, 0.5), 200)}, 0.2);
  EXPECT_DOUBLE_EQ(pos.mean, 0.0);
  EXPECT_THROW(estimate_idleness({constant_trajectory(Eigen::Vector2d(1.0, 0.5), 5)}, 0.2), Error);
}

TEST(EstimateIdleness, NFixtureMatchesTarget) {
  // short run; the full-length check lives in the acceptance suite
  const auto net = n_net();
  const DriftModel base = n_model(net);
  const Eigen::Vector2d p(0.5, 0.5);
  const DriftModel model = recentered(base, 2.0, p);
  const auto trajs = simulate_sde_replications(model, barv_control(net, kNAnchor),
                                               Eigen::Vector2d::Zero(), 1e-3, 1000.0, 11, 2, 2, 10);
  const auto est = estimate_idleness(trajs, 0.2);
  const double target = idleness_target(model, p, 2.0);
  EXPECT_NEAR(target, 1.5, 1e-12);
  EXPECT_NEAR(est.mean, target, std::max(4.0 * est.stderr_, 0.05 * target));
}

TEST(WindowMeans, Basic) {
  SdeTrajectory tr;
  tr.dt = 1.0;
  tr.steps = 4;
  tr.samples.resize(1, 5);
  tr.samples << 100, 1, 2, 3, 4;
  const auto w = window_means({tr}, 2, [](const Eigen::VectorXd& x) { return x(0); });
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0], 1.5);
  EXPECT_DOUBLE_EQ(w[1], 3.5);
}
