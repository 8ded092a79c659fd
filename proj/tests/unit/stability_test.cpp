#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "swss/drift.hpp"
#include "swss/errors.hpp"
#include "swss/fixtures.hpp"
#include "swss/gains.hpp"
#include "swss/random_network.hpp"
#include "swss/stability.hpp"

using namespace swss;

namespace {

const Edge kNAnchor{1, 1};  // (class 2, pool 2)

auto n_drift(double nu_hat) -> DriftModel {
  NetworkSpec spec = fixtures::n_network();
  spec.nu_hat = Eigen::Vector2d(nu_hat, nu_hat);
  const auto net = validate_topology(spec);
  return build_drift(net, solve_fluid(net), kNAnchor);
}

auto min_eig(const Eigen::MatrixXd& A) -> double {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (A + A.transpose()))
      .eigenvalues()
      .minCoeff();
}

void expect_valid_S(const SMatrix& s, const DriftModel& model) {
  const Eigen::Index n = s.S.rows();
  EXPECT_LT((s.S - s.S.transpose()).norm(), 1e-12);
  EXPECT_NEAR(s.S.trace(), static_cast<double>(n), 1e-9);
  EXPECT_GT(min_eig(s.S), 0.0);
  EXPECT_GT(s.kappa_circ, 0.0);
  EXPECT_GT(min_eig(s.S * model.B1 + model.B1.transpose() * s.S -
                    2.0 * s.kappa_circ * Eigen::MatrixXd::Identity(n, n)),
            0.0);
  EXPECT_GE(min_eig(phi_matrix(s.S, model.B1, model.anchor.cls)), -1e-9);
}

auto relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) -> double {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace

TEST(Classify, SignRule) {
  EXPECT_EQ(classify(2.0), Classification::Stabilizable);
  EXPECT_EQ(classify(0.0), Classification::NotPositiveRecurrent);
  EXPECT_EQ(classify(5e-10), Classification::NotPositiveRecurrent);
  EXPECT_EQ(classify(-5e-10), Classification::NotPositiveRecurrent);
  EXPECT_EQ(classify(-0.3), Classification::Transient);
  EXPECT_EQ(to_string(Classification::Stabilizable), "Stabilizable");
}

TEST(Classify, NFixtureWithNth) {
  const auto net = validate_topology(fixtures::n_network());
  const auto fluid = solve_fluid(net);
  const Eigen::Vector2d p(0.5, 0.5);
  const SwssResult lim = compute_swss(net, fluid, p);
  const auto report = classify(lim);
  EXPECT_EQ(report.classification, Classification::Stabilizable);
  EXPECT_NEAR(report.vartheta_p, 2.0, 1e-12);
  EXPECT_FALSE(report.vartheta_p_n.has_value());

  SwssResult negative = lim;
  negative.vartheta_p = -1.0;
  const auto both = classify(lim, negative);
  ASSERT_TRUE(both.nth_classification.has_value());
  EXPECT_EQ(*both.nth_classification, Classification::Transient);
  EXPECT_DOUBLE_EQ(*both.vartheta_p_n, -1.0);
}

TEST(Transience, NFixtureNegativeHats) {
  const DriftModel model = n_drift(-1.0);
  EXPECT_NEAR(model.h(0), 2.0, 1e-12);
  EXPECT_NEAR(model.h(1), 0.5, 1e-12);
  EXPECT_NEAR(swss_from_drift(model, Eigen::Vector2d(0.5, 0.5)), -2.0, 1e-12);

  const auto cert = transience_certificate(model, 4000, 7);
  EXPECT_NEAR(cert.drift_weight, 1.5, 1e-12);
  EXPECT_NEAR(cert.sigma_norm2, 2.0, 1e-12);
  EXPECT_NEAR(cert.beta, 0.375, 1e-12);
  EXPECT_GT(cert.min_margin, 0.0);
  EXPECT_TRUE(std::isfinite(cert.min_log_generator));
  EXPECT_EQ(cert.sample_count, 4001);

  // at the origin the tanh term vanishes
  const Eigen::Vector2d zero(0, 0);
  const Eigen::Vector2d e1(1, 0);
  EXPECT_NEAR(transience_generator(model, cert.beta, zero, e1, e1), 0.375 * 1.5, 1e-12);
  EXPECT_NEAR(transience_bracket(model, cert.beta, zero, e1), 1.5, 1e-12);
}

TEST(Transience, BracketMatchesDirectGenerator) {
  const DriftModel model = n_drift(-1.0);
  const double beta = 0.375;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Vector2d x(g(rng), g(rng));
    const Eigen::VectorXd uc = random_simplex_point(rng, 2);
    const Eigen::VectorXd us = random_simplex_point(rng, 2);
    const double y = beta * left_weights(model).dot(x);
    const double direct = transience_generator(model, beta, x, uc, us);
    const double via = beta / std::pow(std::cosh(y), 2) * transience_bracket(model, beta, x, us);
    EXPECT_NEAR(direct, via, 1e-12 * (1.0 + std::abs(via)));
  }
}

TEST(Transience, RejectsStabilizableRegime) {
  try {
    transience_certificate(n_drift(1.0), 100, 1);
    FAIL() << "expected NotTransientRegime";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotTransientRegime);
  }
}

TEST(Transience, RandomTreesWithNegativeSafetyStaffing) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 60; ++t) {
    NetworkSpec spec = random_crp_network_bounded(rng, 6, 6);
    spec.nu_hat.setConstant(-2.0);
    spec.lambda_hat.setZero();
    spec.mu_hat.setZero();
    const auto net = validate_topology(spec);
    const auto fluid = solve_fluid(net);
    const Eigen::VectorXd p = random_simplex_point(rng, net.num_classes());
    ASSERT_LT(compute_swss(net, fluid, p).vartheta_p, 0.0);
    const DriftModel model = build_drift(net, fluid, default_anchor(net));
    const auto cert = transience_certificate(model, 300, static_cast<std::uint64_t>(t));
    EXPECT_GT(cert.min_margin, 0.0);
  }
}

TEST(FindS, LyapunovSolveOnNFixture) {
  const DriftModel model = n_drift(1.0);
  const Eigen::MatrixXd S0 = lyapunov_solve(model.B1);
  EXPECT_NEAR(S0(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(S0(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(S0(0, 1), 0.0, 1e-12);
  const Eigen::MatrixXd L = S0 * model.B1 + model.B1.transpose() * S0;
  EXPECT_LT((L - 2.0 * Eigen::Matrix2d::Identity()).norm(), 1e-12);
}

TEST(FindS, NFixture) {
  const DriftModel model = n_drift(1.0);
  const SMatrix s = find_S(model);
  expect_valid_S(s, model);
  EXPECT_GE(s.min_eig_phi, -1e-9);
  EXPECT_GT(s.min_eig_lyap, 0.0);
  // Phi >= 0 forces S e_ihat to be parallel to the left weights
  const Eigen::VectorXd col = s.S.col(kNAnchor.cls);
  const Eigen::VectorXd w = left_weights(model);
  EXPECT_NEAR(col(0) * w(1) - col(1) * w(0), 0.0, 1e-9);

  const Eigen::VectorXd p =
      choose_p_for_eta(s.S, kNAnchor.cls, 2.0, Eigen::Vector2d(0.5, 0.5));
  EXPECT_GT(2.0 * p.dot(s.S.col(kNAnchor.cls)), 0.0);
}

TEST(FindS, SingleClass) {
  const auto net = validate_topology(fixtures::single_edge(3.0, 1.0, 0.0, 1.0));
  const DriftModel model = build_drift(net, solve_fluid(net), Edge{0, 0});
  const SMatrix s = find_S(model);
  EXPECT_NEAR(s.S(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(s.kappa_circ, 3.0, 1e-8);
  EXPECT_NEAR(phi_matrix(s.S, model.B1, 0)(0, 0), 0.0, 1e-12);
}

TEST(FindS, RandomTreesSatisfyInvariantsWhenFound) {
  std::mt19937_64 rng(5);
  int found = 0;
  for (int t = 0; t < 60; ++t) {
    const auto net = validate_topology(random_crp_network_bounded(rng, 5, 5));
    const auto fluid = solve_fluid(net);
    const DriftModel model = build_drift(net, fluid, default_anchor(net));
    try {
      const SMatrix s = find_S(model);
      expect_valid_S(s, model);
      ++found;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NotFound);
    }
  }
  RecordProperty("found", found);
  EXPECT_GT(found, 0);
}

TEST(ChooseP, FallsBackToSoftmax) {
  Eigen::Matrix2d S;
  S << 1.0, -0.5, -0.5, 1.0;
  const Eigen::VectorXd p = choose_p_for_eta(S, 1, 1.0, Eigen::Vector2d(0.9, 0.1));
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  EXPECT_GT(p.dot(S.col(1)), 0.0);
  EXPECT_GT(p(1), p(0));
}

TEST(LyapunovFunction, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd M(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) M(a, b) = g(rng);
    const Eigen::MatrixXd S = M * M.transpose() + Eigen::MatrixXd::Identity(n, n);
    const double eps = std::exp(std::uniform_real_distribution<double>(-5.0, 0.0)(rng));
    Eigen::VectorXd x(n);
    for (int a = 0; a < n; ++a) x(a) = g(rng);

    const double hg = 1e-6;
    Eigen::VectorXd fd_grad(n);
    for (int a = 0; a < n; ++a) {
      const Eigen::VectorXd d = hg * Eigen::VectorXd::Unit(n, a);
      fd_grad(a) = (lyapunov_value(S, eps, x + d) - lyapunov_value(S, eps, x - d)) / (2 * hg);
    }
    EXPECT_LT(relative_error(lyapunov_gradient(S, eps, x), fd_grad), 1e-6) << t;

    const double hh = 1e-4;
    Eigen::MatrixXd fd_hess(n, n);
    for (int a = 0; a < n; ++a) {
      const Eigen::VectorXd d = hh * Eigen::VectorXd::Unit(n, a);
      fd_hess.col(a) =
          (lyapunov_gradient(S, eps, x + d) - lyapunov_gradient(S, eps, x - d)) / (2 * hh);
    }
    EXPECT_LT(relative_error(lyapunov_hessian(S, eps, x), fd_hess), 1e-4) << t;
  }
}

TEST(LyapunovFunction, GeneratorRatioMatchesExplicitForm) {
  const DriftModel model = n_drift(1.0);
  const SMatrix s = find_S(model);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 5.0);
  const double eps = 0.01;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Vector2d x(g(rng), g(rng));
    const Eigen::VectorXd b = eval_drift(model, x, Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 1));
    const Eigen::MatrixXd H = lyapunov_hessian(s.S, eps, x);
    double lv = b.dot(lyapunov_gradient(s.S, eps, x));
    for (int i = 0; i < 2; ++i) lv += 0.5 * model.sigma(i) * model.sigma(i) * H(i, i);
    const double ratio = sde_generator_ratio(model, s.S, eps, x);
    EXPECT_NEAR(ratio * lyapunov_value(s.S, eps, x), lv, 1e-10 * (1.0 + std::abs(lv)));
  }
}

TEST(DriftInequalitySde, NFixtureCertificate) {
  const DriftModel model = n_drift(1.0);
  const Eigen::Vector2d p(0.5, 0.5);
  const SMatrix s = find_S(model);
  const auto cert = check_drift_inequality_sde(recentered(model, 2.0, p), s, 2.0, p);
  EXPECT_GT(cert.kappa1, 0.0);
  EXPECT_GT(cert.kappa0, 0.0);
  EXPECT_GT(cert.eta, 0.0);
  EXPECT_GT(cert.delta, 0.0);
  EXPECT_GE(cert.epsilon, 1e-6);
  EXPECT_LE(cert.epsilon, 1e-2);
  EXPECT_LT(cert.worst_far_ratio, 0.0);
}

TEST(DriftInequalitySde, RejectsNonPositiveSafetyStaffing) {
  const DriftModel model = n_drift(1.0);
  const SMatrix s = find_S(model);
  try {
    check_drift_inequality_sde(model, s, 0.0, Eigen::Vector2d(0.5, 0.5));
    FAIL() << "expected PreconditionFailed";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionFailed);
  }
}

TEST(IdlenessTarget, NFixture) {
  const DriftModel model = n_drift(1.0);
  EXPECT_NEAR(idleness_target(model, Eigen::Vector2d(0.5, 0.5), 2.0), 1.5, 1e-12);
  // linear in vartheta
  EXPECT_NEAR(idleness_target(model, Eigen::Vector2d(0.5, 0.5), 6.0), 4.5, 1e-12);
}

TEST(IdlenessTarget, UnitVectorMatchesGains) {
  // at p = e_i the target is w_i vartheta_{e_i} with w = e^T B1^{-1}
  const auto net = validate_topology(fixtures::n_network());
  const auto fluid = solve_fluid(net);
  const DriftModel model = build_drift(net, fluid, kNAnchor);
  const Eigen::VectorXd w = left_weights(model);
  const auto data = limiting_second_order(net, fluid);
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(2, i);
    const double vt = solve_second_order(net, data, e).vartheta_p;
    EXPECT_NEAR(idleness_target(model, e, vt), w(i) * vt, 1e-12);
    EXPECT_NEAR(vt, -model.h.dot(w) / w(i), 1e-9);
  }
}
