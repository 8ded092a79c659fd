#include "swss/fixtures.hpp"

namespace swss::fixtures {

namespace {

// lambda_i = sum_j mu_ij nu_j xi_ij, so that xi is the fluid allocation
auto critical_lambda(const NetworkSpec& s, const Eigen::VectorXd& xi)
    -> Eigen::VectorXd {
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.classes.size()));
  for (std::size_t e = 0; e < s.edges.size(); ++e) {
    const auto k = static_cast<Eigen::Index>(e);
    lambda(s.edges[e].cls) += s.mu(k) * s.nu(s.edges[e].pool) * xi(k);
  }
  return lambda;
}

}  // namespace

auto n_network() -> NetworkSpec {
  NetworkSpec s;
  s.classes = {"1", "2"};
  s.pools = {"1", "2"};
  s.edges = {{0, 0}, {0, 1}, {1, 1}};
  s.mu = Eigen::Vector3d(1.0, 2.0, 1.0);
  s.mu_hat = Eigen::Vector3d::Zero();
  s.lambda = Eigen::Vector2d(2.0, 0.5);
  s.lambda_hat = Eigen::Vector2d::Zero();
  s.nu = Eigen::Vector2d(1.0, 1.0);
  s.nu_hat = Eigen::Vector2d(1.0, 1.0);
  return s;
}

auto m_network(const Eigen::Vector4d& mu, const Eigen::Vector3d& nu, double xi12,
               const Eigen::Vector2d& lambda_hat, const Eigen::Vector4d& mu_hat,
               const Eigen::Vector3d& nu_hat) -> NetworkSpec {
  NetworkSpec s;
  s.classes = {"1", "2"};
  s.pools = {"1", "2", "3"};
  s.edges = {{0, 0}, {0, 1}, {1, 1}, {1, 2}};
  s.mu = mu;
  s.mu_hat = mu_hat;
  s.nu = nu;
  s.nu_hat = nu_hat;
  s.lambda_hat = lambda_hat;
  s.lambda = critical_lambda(s, Eigen::Vector4d(1.0, xi12, 1.0 - xi12, 1.0));
  return s;
}

auto w_network(const Eigen::Vector4d& mu, const Eigen::Vector2d& nu, double xi11,
               double xi22, const Eigen::Vector3d& lambda_hat,
               const Eigen::Vector4d& mu_hat, const Eigen::Vector2d& nu_hat)
    -> NetworkSpec {
  NetworkSpec s;
  s.classes = {"1", "2", "3"};
  s.pools = {"1", "2"};
  s.edges = {{0, 0}, {1, 0}, {1, 1}, {2, 1}};
  s.mu = mu;
  s.mu_hat = mu_hat;
  s.nu = nu;
  s.nu_hat = nu_hat;
  s.lambda_hat = lambda_hat;
  s.lambda = critical_lambda(s, Eigen::Vector4d(xi11, 1.0 - xi11, xi22, 1.0 - xi22));
  return s;
}

auto single_edge(double mu, double nu, double lambda_hat, double nu_hat)
    -> NetworkSpec {
  NetworkSpec s;
  s.classes = {"1"};
  s.pools = {"1"};
  s.edges = {{0, 0}};
  s.mu = Eigen::VectorXd::Constant(1, mu);
  s.mu_hat = Eigen::VectorXd::Zero(1);
  s.nu = Eigen::VectorXd::Constant(1, nu);
  s.nu_hat = Eigen::VectorXd::Constant(1, nu_hat);
  s.lambda = Eigen::VectorXd::Constant(1, mu * nu);
  s.lambda_hat = Eigen::VectorXd::Constant(1, lambda_hat);
  return s;
}

}  // namespace swss::fixtures
